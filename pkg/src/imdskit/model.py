"""Core domain types and single-step execution semantics.

A system is four name sets (servers, agents, values, services) plus an
action relation over (message, state) pairs.  Everything here is immutable
after construction and safe to share; the operations are pure functions.
"""

import re
from dataclasses import dataclass, field

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ActionNotEnabled(Exception):
    """Raised when apply_action is called with a non-enabled action."""


@dataclass(frozen=True)
class ServerState:
    """A server holding one of its declared values."""

    server: str
    value: str

    @property
    def label(self) -> str:
        return f"{self.server}.{self.value}"


@dataclass(frozen=True)
class Message:
    """Invocation of a server's service in the context of an agent."""

    agent: str
    server: str
    service: str

    @property
    def label(self) -> str:
        return f"{self.agent}.{self.server}.{self.service}"

    @property
    def short_label(self) -> str:
        """Label without the agent component, as used on agent-automaton nodes."""
        return f"{self.server}.{self.service}"


@dataclass(frozen=True)
class Action:
    """Atomic step: consume (in_message, in_state), produce the outputs.

    out_message is None exactly for agent-terminating actions.
    """

    in_message: Message
    in_state: ServerState
    out_message: Message | None
    out_state: ServerState

    @property
    def terminating(self) -> bool:
        return self.out_message is None

    @property
    def label(self) -> str:
        """Unique canonical text form, identical to the source syntax."""
        lhs = f"{{{self.in_message.label}, {self.in_state.label}}}"
        if self.terminating:
            return f"{lhs} -> {{{self.out_state.label}}}"
        return f"{lhs} -> {{{self.out_message.label}, {self.out_state.label}}}"

    @property
    def arrow_label(self) -> str:
        """Compact m/m' form for diagram edges."""
        out = "-" if self.terminating else self.out_message.label
        return f"{self.in_message.label}/{out}"


@dataclass(frozen=True)
class ServerDecl:
    """A server with its declared value and service name lists."""

    name: str
    values: tuple[str, ...]
    services: tuple[str, ...]


@dataclass(frozen=True)
class Configuration:
    """One state per server plus the pending message of each live agent.

    Both tuples are indexed by declaration order; a None message marks a
    terminated agent.
    """

    states: tuple[ServerState, ...]
    messages: tuple[Message | None, ...]

    @property
    def pending_count(self) -> int:
        return sum(1 for m in self.messages if m is not None)


@dataclass(frozen=True)
class SystemModel:
    """Single source of truth for all derived artifacts.

    Actions are re-sorted into a canonical order at construction (by input
    state, then input message, then outputs) so that models parsed from the
    server view and the agent view compare equal and explore identically.
    The system name is presentation metadata and excluded from equality.
    """

    name: str = field(compare=False)
    servers: tuple[ServerDecl, ...] = ()
    agents: tuple[str, ...] = ()
    actions: tuple[Action, ...] = ()
    initial_states: tuple[ServerState, ...] = ()
    initial_messages: tuple[Message, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actions",
                           tuple(sorted(self.actions, key=self._action_key)))

    # -- index helpers ---------------------------------------------------

    def _action_key(self, a: Action):
        srv = {s.name: i for i, s in enumerate(self.servers)}
        ag = {x: i for i, x in enumerate(self.agents)}

        def sidx(name):
            return (srv.get(name, len(srv)), name)

        def vidx(st: ServerState):
            i = srv.get(st.server)
            vals = self.servers[i].values if i is not None else ()
            return (vals.index(st.value) if st.value in vals else len(vals),
                    st.value)

        def ridx(m: Message):
            i = srv.get(m.server)
            svcs = self.servers[i].services if i is not None else ()
            return (svcs.index(m.service) if m.service in svcs else len(svcs),
                    m.service)

        out_part = ((), ()) if a.terminating else (sidx(a.out_message.server),
                                                   ridx(a.out_message))
        return (sidx(a.in_state.server), vidx(a.in_state),
                (ag.get(a.in_message.agent, len(ag)), a.in_message.agent),
                sidx(a.in_message.server), ridx(a.in_message),
                a.terminating, vidx(a.out_state), out_part)

    def server_index(self, name: str) -> int:
        for i, s in enumerate(self.servers):
            if s.name == name:
                return i
        raise KeyError(name)

    def agent_index(self, name: str) -> int:
        return self.agents.index(name)

    def server_decl(self, name: str) -> ServerDecl:
        return self.servers[self.server_index(name)]

    def action_id(self, action: Action) -> int:
        return self.actions.index(action)

    def action_by_label(self, label: str) -> int:
        squeezed = "".join(label.split())
        for i, a in enumerate(self.actions):
            if "".join(a.label.split()) == squeezed:
                return i
        raise KeyError(label)


def validate_model(model: SystemModel) -> list[str]:
    """Every violated invariant, as a human-readable diagnostic. Empty = valid."""
    out = []
    servers = {}
    for s in model.servers:
        if not IDENT_RE.match(s.name):
            out.append(f"bad server name {s.name!r}")
        if s.name in servers:
            out.append(f"duplicate server {s.name}")
        servers[s.name] = s
        for group, names in (("value", s.values), ("service", s.services)):
            seen = set()
            for n in names:
                if not IDENT_RE.match(n):
                    out.append(f"bad {group} name {n!r} in server {s.name}")
                if n in seen:
                    out.append(f"duplicate {group} {n} in server {s.name}")
                seen.add(n)
    agents = set()
    for a in model.agents:
        if not IDENT_RE.match(a):
            out.append(f"bad agent name {a!r}")
        if a in agents:
            out.append(f"duplicate agent {a}")
        agents.add(a)

    def check_state(p: ServerState, what: str):
        s = servers.get(p.server)
        if s is None:
            out.append(f"{what}: unknown server {p.server}")
        elif p.value not in s.values:
            out.append(f"{what}: value {p.value} not declared in server {p.server}")

    def check_message(m: Message, what: str):
        if m.agent not in agents:
            out.append(f"{what}: unknown agent {m.agent}")
        s = servers.get(m.server)
        if s is None:
            out.append(f"{what}: unknown server {m.server}")
        elif m.service not in s.services:
            out.append(f"{what}: service {m.service} not declared in server {m.server}")

    seen_actions = set()
    for a in model.actions:
        what = f"action {a.label}"
        check_message(a.in_message, what)
        check_state(a.in_state, what)
        check_state(a.out_state, what)
        if a.in_message.server != a.in_state.server:
            out.append(f"{what}: message server {a.in_message.server} differs "
                       f"from state server {a.in_state.server}")
        if a.in_state.server != a.out_state.server:
            out.append(f"{what}: state server changes from "
                       f"{a.in_state.server} to {a.out_state.server}")
        if not a.terminating:
            check_message(a.out_message, what)
            if a.out_message.agent != a.in_message.agent:
                out.append(f"{what}: output message switches agent "
                           f"{a.in_message.agent} to {a.out_message.agent}")
        if a in seen_actions:
            out.append(f"duplicate {what}")
        seen_actions.add(a)

    if len(model.initial_states) != len(model.servers):
        out.append("initial states do not cover servers exactly once")
    else:
        for s, p in zip(model.servers, model.initial_states):
            if p.server != s.name:
                out.append(f"initial state for {s.name} names server {p.server}")
            else:
                check_state(p, f"initial state of {s.name}")
    if len(model.initial_messages) != len(model.agents):
        out.append("agent without initial message")
    else:
        for a, m in zip(model.agents, model.initial_messages):
            if m.agent != a:
                out.append(f"initial message for {a} names agent {m.agent}")
            else:
                check_message(m, f"initial message of {a}")
    return out


def initial_configuration(model: SystemModel) -> Configuration:
    return Configuration(model.initial_states, model.initial_messages)


def enabled_action_ids(model: SystemModel, config: Configuration) -> list[int]:
    """Indices of enabled actions, in canonical model order."""
    srv = {s.name: i for i, s in enumerate(model.servers)}
    ag = {a: i for i, a in enumerate(model.agents)}
    out = []
    for i, a in enumerate(model.actions):
        if (config.messages[ag[a.in_message.agent]] == a.in_message
                and config.states[srv[a.in_state.server]] == a.in_state):
            out.append(i)
    return out


def enabled_actions(model: SystemModel, config: Configuration) -> list[Action]:
    return [model.actions[i] for i in enabled_action_ids(model, config)]


def apply_action(model: SystemModel, config: Configuration,
                 action: Action) -> Configuration:
    """Fire one enabled action; pure, all other entries unchanged."""
    si = model.server_index(action.in_state.server)
    ai = model.agent_index(action.in_message.agent)
    if (config.messages[ai] != action.in_message
            or config.states[si] != action.in_state):
        raise ActionNotEnabled(action.label)
    states = list(config.states)
    states[si] = action.out_state
    messages = list(config.messages)
    if action.terminating:
        messages[ai] = None
    else:
        messages[ai] = action.out_message
    return Configuration(tuple(states), tuple(messages))


def config_text(model: SystemModel, config: Configuration) -> str:
    """Canonical one-line form, declaration order, '-' for terminated agents."""
    ag = ", ".join(
        f"{name}:{'-' if m is None else m.short_label}"
        for name, m in zip(model.agents, config.messages))
    sv = ", ".join(p.label for p in config.states)
    return f"agents: {ag}; servers: {sv}"
