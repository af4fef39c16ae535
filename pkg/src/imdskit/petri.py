"""Place/transition net equivalent of a system model, plus structural analysis.

Conversion: one place per declared server state and per referenced message,
one transition per action consuming its two input places and producing two
output places (one for terminating actions).  Tokens start on the initial
state and initial message places.  The reachable-marking graph is then
isomorphic to the configuration space, which check_iso_with_lts verifies
explicitly.

The color tag on places ("state" vs "message") is rendering metadata only;
the net itself is an ordinary 1-weighted place/transition net.
"""

from dataclasses import dataclass
from math import gcd

from .explore import LimitExceeded, Limits, bfs_graph
from .lts import Lts
from .model import Message, ServerState, SystemModel
from .views import agent_messages


@dataclass(frozen=True)
class Place:
    name: str
    kind: str  # "state" | "message"
    origin: ServerState | Message


@dataclass(frozen=True)
class Transition:
    name: str
    action_id: int


@dataclass(frozen=True)
class PetriNet:
    name: str
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    pre: tuple[tuple[int, ...], ...]  # place indices consumed, per transition
    post: tuple[tuple[int, ...], ...]  # place indices produced, per transition
    initial_marking: tuple[int, ...]

    def place_index(self, name: str) -> int:
        for i, p in enumerate(self.places):
            if p.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class MarkingGraph:
    net: PetriNet
    nodes: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int, int], ...]  # (source, transition id, target)


@dataclass(frozen=True)
class IsoResult:
    ok: bool
    mapping: tuple[int, ...] | None  # lts node index -> marking-graph node index
    mismatch: str | None

    def __bool__(self):
        return self.ok


def state_place_name(p: ServerState) -> str:
    return f"S_{p.server}_{p.value}"


def message_place_name(m: Message) -> str:
    return f"M_{m.agent}_{m.server}_{m.service}"


def to_petri(model: SystemModel) -> PetriNet:
    places = []
    index: dict = {}
    for s in model.servers:
        for v in s.values:
            origin = ServerState(s.name, v)
            index[origin] = len(places)
            places.append(Place(state_place_name(origin), "state", origin))
    for agent in model.agents:
        for m in agent_messages(model, agent):
            index[m] = len(places)
            places.append(Place(message_place_name(m), "message", m))

    transitions, pre, post = [], [], []
    for k, a in enumerate(model.actions):
        transitions.append(Transition(
            f"T{k}_{a.in_message.server}_{a.in_message.service}", k))
        pre.append(tuple(sorted((index[a.in_message], index[a.in_state]))))
        outs = {index[a.out_state]}
        if a.out_message is not None:
            outs.add(index[a.out_message])
        post.append(tuple(sorted(outs)))

    marking = [0] * len(places)
    for p in model.initial_states:
        marking[index[p]] = 1
    for m in model.initial_messages:
        marking[index[m]] = 1
    return PetriNet(model.name, tuple(places), tuple(transitions),
                    tuple(pre), tuple(post), tuple(marking))


def enabled_transitions(net: PetriNet, marking: tuple[int, ...]) -> list[int]:
    return [t for t in range(len(net.transitions))
            if all(marking[p] >= 1 for p in net.pre[t])]


def fire(net: PetriNet, marking: tuple[int, ...], t: int) -> tuple[int, ...]:
    out = list(marking)
    for p in net.pre[t]:
        out[p] -= 1
    for p in net.post[t]:
        out[p] += 1
    return tuple(out)


def marking_graph(net: PetriNet, limits: Limits = Limits()) -> MarkingGraph:
    def successors(marking):
        for t in enabled_transitions(net, marking):
            yield t, fire(net, marking, t)

    nodes, _, edges = bfs_graph(net.initial_marking, successors, limits)
    return MarkingGraph(net, tuple(nodes), tuple(edges))


def config_marking(net: PetriNet, model: SystemModel, config) -> tuple[int, ...]:
    """The structural image of a configuration: tokens exactly on its places."""
    index = {p.origin: i for i, p in enumerate(net.places)}
    marking = [0] * len(net.places)
    for p in config.states:
        marking[index[p]] = 1
    for m in config.messages:
        if m is not None:
            marking[index[m]] = 1
    return tuple(marking)


def check_iso_with_lts(net: PetriNet, lts: Lts,
                       graph: MarkingGraph | None = None) -> IsoResult:
    """Verify the configuration->marking bijection preserves labeled edges.

    When the graph is not supplied it is built with limits pinned just past
    the LTS size: a marking graph that outgrows the configuration space
    (e.g. an unbounded mutated net) is already a mismatch.
    """
    if graph is None:
        try:
            graph = marking_graph(net, Limits(lts.node_count + 1,
                                              lts.edge_count + 1))
        except LimitExceeded as e:
            return IsoResult(False, None,
                             f"marking graph outgrows the configuration space "
                             f"({e.kind} > {e.limit - 1})")
    model = lts.model
    g_index = {m: i for i, m in enumerate(graph.nodes)}
    mapping = []
    for i, config in enumerate(lts.nodes):
        m = config_marking(net, model, config)
        gi = g_index.get(m)
        if gi is None:
            return IsoResult(False, None,
                             f"configuration {i} maps to an unreachable marking")
        mapping.append(gi)
    if len(set(mapping)) != len(mapping):
        return IsoResult(False, None, "configuration map is not injective")
    if len(graph.nodes) != lts.node_count:
        return IsoResult(False, None,
                         f"marking count {len(graph.nodes)} != "
                         f"configuration count {lts.node_count}")
    if mapping[0] != 0:
        return IsoResult(False, None, "initial configuration misses initial marking")
    action_of = {t: net.transitions[t].action_id
                 for t in range(len(net.transitions))}
    lts_edges = {(mapping[s], aid, mapping[t]) for s, aid, t in lts.edges}
    net_edges = {(s, action_of[t], g) for s, t, g in graph.edges}
    if lts_edges != net_edges:
        diff = (lts_edges ^ net_edges)
        sample = next(iter(diff))
        return IsoResult(False, None,
                         f"edge sets differ, e.g. {sample} "
                         f"({len(diff)} mismatching edges)")
    return IsoResult(True, tuple(mapping), None)


# ---------------------------------------------------------------------------
# Siphons and traps

EXHAUSTIVE_PLACE_BOUND = 24
EXHAUSTIVE_BUDGET = 5_000_000
FALLBACK_BUDGET = 200_000


def _producers_consumers(net: PetriNet):
    producers = [[] for _ in net.places]  # transitions with an output arc here
    consumers = [[] for _ in net.places]  # transitions with an input arc here
    for t in range(len(net.transitions)):
        for p in net.post[t]:
            producers[p].append(t)
        for p in net.pre[t]:
            consumers[p].append(t)
    return producers, consumers


def _enumerate_minimal(net: PetriNet, obligation_of, satisfiers_of,
                       max_results: int | None, budget: int):
    """All minimal place sets D where every obligation transition of a member
    has a satisfier place inside D.

    For siphons the obligations are producers and the satisfiers inputs; for
    traps the obligations are consumers and the satisfiers outputs.  Each
    seed place enumerates only sets whose least member it is, so every
    minimal set appears exactly once.
    """
    n = len(net.places)
    found: list[frozenset[int]] = []
    steps = 0

    def unsatisfied(d: frozenset) -> list[int] | None:
        for q in d:
            for t in obligation_of[q]:
                if not any(r in d for r in satisfiers_of[t]):
                    return satisfiers_of[t]
        return None

    def search(d: frozenset, forbidden: frozenset):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise LimitExceeded("siphon-search", steps, budget)
        if any(s <= d for s in found):
            return  # any completion is a superset of a known set
        need = unsatisfied(d)
        if need is None:
            found.append(d)
            if max_results is not None and len(found) > max_results:
                raise LimitExceeded("siphon-results", len(found), max_results)
            return
        tried = set()
        for r in need:
            if r in forbidden or r in tried:
                continue
            search(d | {r}, forbidden | tried)
            tried.add(r)

    for seed in range(n):
        search(frozenset([seed]), frozenset(range(seed)))

    minimal = [d for d in found
               if not any(other < d for other in found)]
    return sorted(sorted(d) for d in minimal)


def _budget(net: PetriNet) -> int:
    if len(net.places) <= EXHAUSTIVE_PLACE_BOUND:
        return EXHAUSTIVE_BUDGET
    return FALLBACK_BUDGET


def minimal_siphons(net: PetriNet, max_results: int | None = None) -> list[list[int]]:
    """Minimal sets whose producing transitions all consume from the set."""
    producers, consumers = _producers_consumers(net)
    return _enumerate_minimal(net, producers, net.pre, max_results, _budget(net))


def minimal_traps(net: PetriNet, max_results: int | None = None) -> list[list[int]]:
    """Dual of siphons: consuming transitions all produce into the set."""
    producers, consumers = _producers_consumers(net)
    return _enumerate_minimal(net, consumers, net.post, max_results, _budget(net))


def is_siphon(net: PetriNet, places) -> bool:
    d = set(places)
    producers = {t for t in range(len(net.transitions))
                 if any(p in d for p in net.post[t])}
    consumers = {t for t in range(len(net.transitions))
                 if any(p in d for p in net.pre[t])}
    return bool(d) and producers <= consumers


def is_trap(net: PetriNet, places) -> bool:
    d = set(places)
    producers = {t for t in range(len(net.transitions))
                 if any(p in d for p in net.post[t])}
    consumers = {t for t in range(len(net.transitions))
                 if any(p in d for p in net.pre[t])}
    return bool(d) and consumers <= producers


def siphon_emptiable(net: PetriNet, siphon,
                     graph: MarkingGraph) -> int | None:
    """First reachable marking (BFS order) with zero tokens on the siphon."""
    places = list(siphon)
    for i, marking in enumerate(graph.nodes):
        if all(marking[p] == 0 for p in places):
            return i
    return None


# ---------------------------------------------------------------------------
# P-invariants (Farkas elimination over exact integers)


def incidence_matrix(net: PetriNet) -> list[list[int]]:
    c = [[0] * len(net.transitions) for _ in net.places]
    for t in range(len(net.transitions)):
        for p in net.pre[t]:
            c[p][t] -= 1
        for p in net.post[t]:
            c[p][t] += 1
    return c


def p_invariants(net: PetriNet) -> list[tuple[int, ...]]:
    """Generating set of minimal-support non-negative vectors x with xC = 0.

    Classic Farkas scheme: start from [I | C] and eliminate each transition
    column by pairwise positive combinations of rows with opposite signs.
    """
    n_p, n_t = len(net.places), len(net.transitions)
    c = incidence_matrix(net)
    rows = [tuple((1 if i == j else 0) for j in range(n_p)) + tuple(c[i])
            for i in range(n_p)]
    for col in range(n_p, n_p + n_t):
        keep = [r for r in rows if r[col] == 0]
        pos = [r for r in rows if r[col] > 0]
        neg = [r for r in rows if r[col] < 0]
        for a in pos:
            for b in neg:
                comb = tuple(-b[col] * x + a[col] * y for x, y in zip(a, b))
                g = 0
                for x in comb:
                    g = gcd(g, x)
                if g > 1:
                    comb = tuple(x // g for x in comb)
                keep.append(comb)
        rows = list(dict.fromkeys(keep))
    supports = []
    invariants = []
    for r in rows:
        vec = r[:n_p]
        if not any(vec):
            continue
        if vec not in invariants:
            invariants.append(vec)
            supports.append(frozenset(i for i, x in enumerate(vec) if x))
    minimal = [v for v, s in zip(invariants, supports)
               if not any(o < s for o in supports)]
    return sorted(minimal, key=lambda v: [-x for x in v])


# ---------------------------------------------------------------------------
# Structural report


@dataclass(frozen=True)
class StructuralReport:
    components: tuple[tuple[str, ...], ...]  # node names per weak component
    dead_transitions: tuple[int, ...]
    max_tokens: tuple[int, ...]  # per place, over reachable markings

    @property
    def one_bounded(self) -> bool:
        return all(t <= 1 for t in self.max_tokens)


def structural_report(net: PetriNet,
                      graph: MarkingGraph | None = None,
                      limits: Limits = Limits()) -> StructuralReport:
    if graph is None:
        graph = marking_graph(net, limits)
    n_p, n_t = len(net.places), len(net.transitions)
    parent = list(range(n_p + n_t))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for t in range(n_t):
        for p in net.pre[t] + net.post[t]:
            union(p, n_p + t)
    groups: dict[int, list[str]] = {}
    names = [p.name for p in net.places] + [t.name for t in net.transitions]
    for x in range(n_p + n_t):
        groups.setdefault(find(x), []).append(names[x])
    components = tuple(tuple(g) for g in
                       sorted(groups.values(), key=lambda g: g[0]))

    fired = {t for _, t, _ in graph.edges}
    dead = tuple(sorted(set(range(n_t)) - fired))
    max_tokens = tuple(max(m[p] for m in graph.nodes) for p in range(n_p))
    return StructuralReport(components, dead, max_tokens)


# ---------------------------------------------------------------------------
# ANDL surface syntax (emitter and the matching reader used for round-trips)


def to_andl(net: PetriNet) -> str:
    lines = [f"pn [{net.name}] {{", "places:", "discrete:"]
    for p, tokens in zip(net.places, net.initial_marking):
        lines.append(f"  {p.name} = {tokens};")
    lines += ["transitions:", "discrete:"]
    for t in range(len(net.transitions)):
        terms = [f"[{net.places[p].name} - 1]" for p in net.pre[t]]
        terms += [f"[{net.places[p].name} + 1]" for p in net.post[t]]
        lines.append(f"  {net.transitions[t].name}: {' & '.join(terms)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AndlNet:
    name: str
    places: tuple[tuple[str, int], ...]
    transitions: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]


def parse_andl(text: str) -> AndlNet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("pn [") or not lines[0].endswith("] {"):
        raise ValueError("missing 'pn [name] {' header")
    name = lines[0][4:-3]
    places: list[tuple[str, int]] = []
    transitions = []
    section = None
    for ln in lines[1:]:
        if ln == "}":
            break
        if ln in ("places:", "transitions:"):
            section = ln[:-1]
            continue
        if ln == "discrete:":
            continue
        if not ln.endswith(";"):
            raise ValueError(f"missing ';' in {ln!r}")
        body = ln[:-1]
        if section == "places":
            pname, _, tokens = body.partition("=")
            places.append((pname.strip(), int(tokens)))
        elif section == "transitions":
            tname, _, expr = body.partition(":")
            consumed, produced = [], []
            for term in expr.split("&"):
                term = term.strip()
                if not (term.startswith("[") and term.endswith("]")):
                    raise ValueError(f"bad arc term {term!r}")
                inner = term[1:-1].split()
                if len(inner) != 3 or inner[2] != "1" or inner[1] not in "+-":
                    raise ValueError(f"bad arc term {term!r}")
                (consumed if inner[1] == "-" else produced).append(inner[0])
            transitions.append((tname.strip(), tuple(consumed), tuple(produced)))
        else:
            raise ValueError(f"line outside a section: {ln!r}")
    return AndlNet(name, tuple(places), tuple(transitions))


def to_dot(net: PetriNet, marking: tuple[int, ...] | None = None) -> str:
    """Places as circles (states red-tinted, messages green-tinted),
    transitions as boxes, token counts as labels."""
    if marking is None:
        marking = net.initial_marking
    fill = {"state": "#f4cccc", "message": "#d9ead3"}
    lines = ["digraph petri {", "  rankdir=LR;", "  node [fontsize=10];"]
    for i, p in enumerate(net.places):
        label = p.name if marking[i] == 0 else f"{p.name}\\n{marking[i]}"
        lines.append(f'  "{p.name}" [shape=circle, style=filled, '
                     f'fillcolor="{fill[p.kind]}", label="{label}"];')
    for t, tr in enumerate(net.transitions):
        lines.append(f'  "{tr.name}" [shape=box, style=filled, fillcolor="#eeeeee"];')
        for p in net.pre[t]:
            lines.append(f'  "{net.places[p].name}" -> "{tr.name}";')
        for p in net.post[t]:
            lines.append(f'  "{tr.name}" -> "{net.places[p].name}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
