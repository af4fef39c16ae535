"""Shared breadth-first graph construction with hard limits.

Used by the configuration-space, marking-graph, and global-position-graph
builders so all three number their nodes the same way: BFS layer order,
successors of one node in the order the step function yields them.
"""

import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, TypeVar

N = TypeVar("N", bound=Hashable)

DEFAULT_MAX_NODES = 1_000_000
DEFAULT_MAX_EDGES = 5_000_000


class LimitExceeded(Exception):
    """State-space explosion guard; no partial result is returned."""

    def __init__(self, kind: str, count: int, limit: int):
        super().__init__(f"{kind} limit exceeded: {count} > {limit}")
        self.kind = kind
        self.count = count
        self.limit = limit


@dataclass(frozen=True)
class Limits:
    max_nodes: int = DEFAULT_MAX_NODES
    max_edges: int = DEFAULT_MAX_EDGES

    @classmethod
    def from_env(cls, max_nodes: int | None = None,
                 max_edges: int | None = None) -> "Limits":
        """CLI defaults: explicit flags beat environment, which beats built-ins."""
        if max_nodes is None:
            max_nodes = int(os.environ.get("IMDSKIT_MAX_NODES", DEFAULT_MAX_NODES))
        if max_edges is None:
            max_edges = int(os.environ.get("IMDSKIT_MAX_EDGES", DEFAULT_MAX_EDGES))
        return cls(max_nodes, max_edges)


def bfs_graph(initial: N,
              successors: Callable[[N], Iterable[tuple[int, N]]],
              limits: Limits = Limits(),
              ) -> tuple[list[N], dict[N, int], list[tuple[int, int, int]]]:
    """Explore from initial; returns (nodes, node index map, edges).

    Edges are (source index, label, target index) in discovery order.
    Raises LimitExceeded instead of returning a truncated graph.
    """
    nodes = [initial]
    index = {initial: 0}
    edges = []
    queue = deque([0])
    while queue:
        src = queue.popleft()
        for label, target in successors(nodes[src]):
            ti = index.get(target)
            if ti is None:
                if len(nodes) >= limits.max_nodes:
                    raise LimitExceeded("nodes", len(nodes) + 1, limits.max_nodes)
                ti = len(nodes)
                nodes.append(target)
                index[target] = ti
                queue.append(ti)
            if len(edges) >= limits.max_edges:
                raise LimitExceeded("edges", len(edges) + 1, limits.max_edges)
            edges.append((src, label, ti))
    return nodes, index, edges
