"""Distributed-automata derivations of a model, one per server or per agent.

Server automata: nodes are the server's states, a transition rewrites an
action as (state, message-in/message-out, state'), and each automaton owns
an unordered input set of pending messages.  Firing removes the input
symbol from the acting automaton's set and inserts the output symbol into
the set of the automaton it addresses.

Agent automata: nodes are the agent's messages plus a terminal node for
termination, transitions are (message, state-in/state-out, message'), and
all automata share a global input vector holding one state per server;
firing exchanges the input state for the output state in the vector.

Global positions of either family are in structural bijection with
configurations, so both global graphs match the configuration space.
"""

from dataclasses import dataclass

from .explore import Limits, bfs_graph
from .lts import Lts
from .model import Message, ServerState, SystemModel
from .views import agent_messages

TERMINAL_NODE = "t"


@dataclass(frozen=True)
class ServerTransition:
    action_id: int
    source: str  # state value
    in_message: Message
    out_message: Message | None
    target: str

    @property
    def label(self) -> str:
        out = "-" if self.out_message is None else self.out_message.label
        return f"{self.in_message.label}/{out}"


@dataclass(frozen=True)
class ServerAutomaton:
    server: str
    nodes: tuple[str, ...]
    initial_node: str
    transitions: tuple[ServerTransition, ...]
    input_alphabet: tuple[Message, ...]
    initial_input_set: frozenset[Message]


@dataclass(frozen=True)
class AgentTransition:
    action_id: int
    source: Message
    in_state: ServerState
    out_state: ServerState
    target: Message | None  # None targets the terminal node

    @property
    def label(self) -> str:
        return f"{self.in_state.label}/{self.out_state.label}"


@dataclass(frozen=True)
class AgentAutomaton:
    agent: str
    nodes: tuple[Message, ...]  # the terminal node exists besides these
    initial_node: Message
    transitions: tuple[AgentTransition, ...]

    @property
    def terminal_reachable(self) -> bool:
        return any(t.target is None for t in self.transitions)


def to_sda3(model: SystemModel) -> tuple[ServerAutomaton, ...]:
    out = []
    for si, s in enumerate(model.servers):
        transitions = tuple(
            ServerTransition(k, a.in_state.value, a.in_message,
                             a.out_message, a.out_state.value)
            for k, a in enumerate(model.actions)
            if a.in_state.server == s.name)
        alphabet = tuple(m for agent in model.agents
                         for m in agent_messages(model, agent)
                         if m.server == s.name)
        initial_inputs = frozenset(m for m in model.initial_messages
                                   if m.server == s.name)
        out.append(ServerAutomaton(s.name, s.values,
                                   model.initial_states[si].value,
                                   transitions, alphabet, initial_inputs))
    return tuple(out)


def to_ada3(model: SystemModel) -> tuple[AgentAutomaton, ...]:
    out = []
    for ai, agent in enumerate(model.agents):
        transitions = tuple(
            AgentTransition(k, a.in_message, a.in_state, a.out_state,
                            a.out_message)
            for k, a in enumerate(model.actions)
            if a.in_message.agent == agent)
        out.append(AgentAutomaton(agent, agent_messages(model, agent),
                                  model.initial_messages[ai], transitions))
    return tuple(out)


# ---------------------------------------------------------------------------
# Global positions and their step semantics


@dataclass(frozen=True)
class Sda3Position:
    nodes: tuple[str, ...]  # state value per server, declaration order
    input_sets: tuple[frozenset[Message], ...]  # pending messages per server


@dataclass(frozen=True)
class Ada3Position:
    nodes: tuple[Message | None, ...]  # per agent; None = at terminal node
    vector: tuple[str, ...]  # state value per server


@dataclass(frozen=True)
class GlobalGraph:
    kind: str  # "sda3" | "ada3"
    nodes: tuple
    edges: tuple[tuple[int, int, int], ...]  # (source, action id, target)


def sda3_initial(model: SystemModel,
                 automata: tuple[ServerAutomaton, ...]) -> Sda3Position:
    return Sda3Position(tuple(a.initial_node for a in automata),
                        tuple(a.initial_input_set for a in automata))


def ada3_initial(model: SystemModel,
                 automata: tuple[AgentAutomaton, ...]) -> Ada3Position:
    return Ada3Position(tuple(a.initial_node for a in automata),
                        tuple(p.value for p in model.initial_states))


def sda3_moves(model: SystemModel, automata: tuple[ServerAutomaton, ...]):
    """(automaton index, transition) pairs in canonical action order."""
    moves = [(si, tr) for si, a in enumerate(automata) for tr in a.transitions]
    moves.sort(key=lambda m: m[1].action_id)
    return moves


def ada3_moves(model: SystemModel, automata: tuple[AgentAutomaton, ...]):
    moves = [(ai, tr) for ai, a in enumerate(automata) for tr in a.transitions]
    moves.sort(key=lambda m: m[1].action_id)
    return moves


def sda3_enabled(pos: Sda3Position, si: int, tr: ServerTransition) -> bool:
    return pos.nodes[si] == tr.source and tr.in_message in pos.input_sets[si]


def sda3_fire(model: SystemModel, pos: Sda3Position, si: int,
              tr: ServerTransition) -> Sda3Position:
    nodes = list(pos.nodes)
    nodes[si] = tr.target
    inputs = list(pos.input_sets)
    inputs[si] = inputs[si] - {tr.in_message}
    if tr.out_message is not None:
        ti = model.server_index(tr.out_message.server)
        inputs[ti] = inputs[ti] | {tr.out_message}
    return Sda3Position(tuple(nodes), tuple(inputs))


def ada3_enabled(model: SystemModel, pos: Ada3Position, ai: int,
                 tr: AgentTransition) -> bool:
    si = model.server_index(tr.in_state.server)
    return pos.nodes[ai] == tr.source and pos.vector[si] == tr.in_state.value


def ada3_fire(model: SystemModel, pos: Ada3Position, ai: int,
              tr: AgentTransition) -> Ada3Position:
    nodes = list(pos.nodes)
    nodes[ai] = tr.target
    vector = list(pos.vector)
    vector[model.server_index(tr.out_state.server)] = tr.out_state.value
    return Ada3Position(tuple(nodes), tuple(vector))


def global_graph(model: SystemModel, automata, kind: str,
                 limits: Limits = Limits()) -> GlobalGraph:
    if kind == "sda3":
        moves = sda3_moves(model, automata)

        def successors(pos):
            for si, tr in moves:
                if sda3_enabled(pos, si, tr):
                    yield tr.action_id, sda3_fire(model, pos, si, tr)

        initial = sda3_initial(model, automata)
    elif kind == "ada3":
        moves = ada3_moves(model, automata)

        def successors(pos):
            for ai, tr in moves:
                if ada3_enabled(model, pos, ai, tr):
                    yield tr.action_id, ada3_fire(model, pos, ai, tr)

        initial = ada3_initial(model, automata)
    else:
        raise ValueError(f"kind must be 'sda3' or 'ada3', not {kind!r}")
    nodes, _, edges = bfs_graph(initial, successors, limits)
    return GlobalGraph(kind, tuple(nodes), tuple(edges))


# ---------------------------------------------------------------------------
# Isomorphism with the configuration space


@dataclass(frozen=True)
class IsoResult:
    ok: bool
    mapping: tuple[int, ...] | None
    mismatch: str | None

    def __bool__(self):
        return self.ok


def position_of_config(model: SystemModel, config, kind: str):
    if kind == "sda3":
        inputs = []
        for s in model.servers:
            inputs.append(frozenset(m for m in config.messages
                                    if m is not None and m.server == s.name))
        return Sda3Position(tuple(p.value for p in config.states), tuple(inputs))
    return Ada3Position(tuple(config.messages),
                        tuple(p.value for p in config.states))


def build_and_check_iso(model: SystemModel, automata, kind: str,
                        lts: Lts) -> IsoResult:
    """Build the global graph capped just past the LTS size and compare;
    outgrowing the configuration space counts as a mismatch."""
    from .explore import LimitExceeded
    try:
        graph = global_graph(model, automata, kind,
                             Limits(lts.node_count + 1, lts.edge_count + 1))
    except LimitExceeded as e:
        return IsoResult(False, None,
                         f"global graph outgrows the configuration space "
                         f"({e.kind} > {e.limit - 1})")
    return check_iso_with_lts(graph, lts)


def check_iso_with_lts(graph: GlobalGraph, lts: Lts) -> IsoResult:
    """Verify the configuration->position bijection preserves labeled edges."""
    model = lts.model
    g_index = {p: i for i, p in enumerate(graph.nodes)}
    mapping = []
    for i, config in enumerate(lts.nodes):
        pos = position_of_config(model, config, graph.kind)
        gi = g_index.get(pos)
        if gi is None:
            return IsoResult(False, None,
                             f"configuration {i} maps to an unreached position")
        mapping.append(gi)
    if len(set(mapping)) != len(mapping):
        return IsoResult(False, None, "configuration map is not injective")
    if len(graph.nodes) != lts.node_count:
        return IsoResult(False, None,
                         f"position count {len(graph.nodes)} != "
                         f"configuration count {lts.node_count}")
    if mapping[0] != 0:
        return IsoResult(False, None, "initial configuration misses initial position")
    lts_edges = {(mapping[s], aid, mapping[t]) for s, aid, t in lts.edges}
    pos_edges = set(graph.edges)
    if lts_edges != pos_edges:
        diff = lts_edges ^ pos_edges
        sample = next(iter(diff))
        return IsoResult(False, None,
                         f"edge sets differ, e.g. {sample} "
                         f"({len(diff)} mismatching edges)")
    return IsoResult(True, tuple(mapping), None)


# ---------------------------------------------------------------------------
# Exports


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def export_dot(automata, show_unreachable_terminal: bool = False) -> dict[str, str]:
    """One digraph per automaton, keyed by owner name.

    Node labels omit the owner prefix; initial nodes are bold.  An agent
    automaton's terminal node is hidden unless reachable (or forced).
    """
    out = {}
    for a in automata:
        lines = [f"digraph {a.server if isinstance(a, ServerAutomaton) else a.agent} {{"]
        if isinstance(a, ServerAutomaton):
            for v in a.nodes:
                style = ", style=bold" if v == a.initial_node else ""
                lines.append(f"  {_quote(v)} [shape=ellipse{style}];")
            for tr in a.transitions:
                lines.append(f"  {_quote(tr.source)} -> {_quote(tr.target)} "
                             f"[label={_quote(tr.label)}];")
            out[a.server] = "\n".join(lines + ["}"]) + "\n"
        else:
            for m in a.nodes:
                style = ", style=bold" if m == a.initial_node else ""
                lines.append(f"  {_quote(m.short_label)} [shape=ellipse{style}];")
            if a.terminal_reachable or show_unreachable_terminal:
                lines.append(f"  {_quote(TERMINAL_NODE)} [shape=doublecircle];")
            for tr in a.transitions:
                target = TERMINAL_NODE if tr.target is None else tr.target.short_label
                lines.append(f"  {_quote(tr.source.short_label)} -> {_quote(target)} "
                             f"[label={_quote(tr.label)}];")
            out[a.agent] = "\n".join(lines + ["}"]) + "\n"
    return out


def automata_json(model: SystemModel, view: str) -> dict:
    """Structured dump of either automata family, stable field order."""
    if view == "sda3":
        automata = [{
            "id": a.server,
            "kind": "server",
            "nodes": list(a.nodes),
            "initial": a.initial_node,
            "alphabet": [m.label for m in a.input_alphabet],
            "initial_input_set": sorted(m.label for m in a.initial_input_set),
            "transitions": [{
                "action": tr.action_id,
                "from": tr.source,
                "to": tr.target,
                "label": tr.label,
            } for tr in a.transitions],
        } for a in to_sda3(model)]
    elif view == "ada3":
        automata = [{
            "id": a.agent,
            "kind": "agent",
            "nodes": [m.short_label for m in a.nodes] + [TERMINAL_NODE],
            "initial": a.initial_node.short_label,
            "terminal_reachable": a.terminal_reachable,
            "transitions": [{
                "action": tr.action_id,
                "from": tr.source.short_label,
                "to": TERMINAL_NODE if tr.target is None else tr.target.short_label,
                "label": tr.label,
            } for tr in a.transitions],
        } for a in to_ada3(model)]
    else:
        raise ValueError(f"view must be 'sda3' or 'ada3', not {view!r}")
    return {"schema_version": 1, "view": view, "automata": automata}
