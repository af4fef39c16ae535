"""Configuration-space construction: the labeled transition system.

Nodes are configurations, node 0 is the initial configuration, edges carry
action ids.  Numbering is the sequential BFS order with actions expanded in
canonical model order, so rebuilding is bit-identical.
"""

from collections import deque
from dataclasses import dataclass

from .explore import Limits, bfs_graph
from .model import (Configuration, SystemModel, apply_action, config_text,
                    enabled_action_ids)

Trace = tuple[int, ...]


@dataclass(frozen=True)
class Lts:
    model: SystemModel
    nodes: tuple[Configuration, ...]
    edges: tuple[tuple[int, int, int], ...]  # (source, action id, target)
    enabled_count: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_edges(self) -> list[list[tuple[int, int]]]:
        """Adjacency as (action id, target) lists, in edge order."""
        adj = [[] for _ in self.nodes]
        for src, aid, tgt in self.edges:
            adj[src].append((aid, tgt))
        return adj

    def node_text(self, i: int) -> str:
        return config_text(self.model, self.nodes[i])


def build_lts(model: SystemModel, limits: Limits = Limits()) -> Lts:
    def successors(config):
        for aid in enabled_action_ids(model, config):
            yield aid, apply_action(model, config, model.actions[aid])

    from .model import initial_configuration
    nodes, _, edges = bfs_graph(initial_configuration(model), successors, limits)
    counts = [0] * len(nodes)
    for src, _, _ in edges:
        counts[src] += 1
    return Lts(model, tuple(nodes), tuple(edges), tuple(counts))


def shortest_path(lts: Lts, predicate) -> Trace | None:
    """BFS-shortest action sequence from node 0 to a node satisfying predicate.

    Among shortest targets the lowest node index wins; None if unreachable.
    """
    n = lts.node_count
    dist = [-1] * n
    parent: list[tuple[int, int] | None] = [None] * n  # (prev node, action id)
    dist[0] = 0
    adj = lts.out_edges()
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for aid, v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = (u, aid)
                queue.append(v)
    best = None
    for i in range(n):
        if dist[i] >= 0 and predicate(lts.nodes[i]):
            if best is None or (dist[i], i) < (dist[best], best):
                best = i
    if best is None:
        return None
    path = []
    node = best
    while parent[node] is not None:
        prev, aid = parent[node]
        path.append(aid)
        node = prev
    return tuple(reversed(path))


def path_target(lts: Lts, trace: Trace) -> int:
    """Node index reached by replaying trace edges from node 0."""
    adj = lts.out_edges()
    node = 0
    for aid in trace:
        for a, tgt in adj[node]:
            if a == aid:
                node = tgt
                break
        else:
            raise ValueError(f"action {aid} has no edge from node {node}")
    return node


def strongly_connected(lts: Lts) -> bool:
    """True iff every node reaches and is reached by node 0."""
    if lts.node_count == 1:
        return True
    fwd = [[] for _ in lts.nodes]
    bwd = [[] for _ in lts.nodes]
    for src, _, tgt in lts.edges:
        fwd[src].append(tgt)
        bwd[tgt].append(src)

    def covers(adj):
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == lts.node_count

    return covers(fwd) and covers(bwd)


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def to_dot(lts: Lts) -> str:
    lines = ["digraph configurations {", "  node [shape=box];"]
    for i in range(lts.node_count):
        style = ", style=bold" if i == 0 else ""
        lines.append(f"  n{i} [label={_quote(lts.node_text(i))}{style}];")
    for src, aid, tgt in lts.edges:
        label = lts.model.actions[aid].arrow_label
        lines.append(f"  n{src} -> n{tgt} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_text(lts: Lts) -> str:
    """Line-oriented dump for diffing: one node line, one edge line each."""
    lines = []
    for i in range(lts.node_count):
        lines.append(f"node {i} {lts.node_text(i)}")
    for src, aid, tgt in lts.edges:
        lines.append(f"edge {src} {tgt} {lts.model.actions[aid].label}")
    return "\n".join(lines) + "\n"
