"""Communication duality: the two process decompositions of one action set.

Grouping by the input state's server gives server processes (carriers:
states); grouping by the input message's agent gives agent processes
(carriers: messages).  Both partitions cover the full action set.
"""

from dataclasses import dataclass

from .model import Action, Message, ServerState, SystemModel


@dataclass(frozen=True)
class ProcessPartition:
    kind: str  # "server" | "agent"
    blocks: tuple[tuple[str, tuple[Action, ...]], ...]  # owner -> actions
    carriers: tuple[tuple[str, tuple], ...]  # owner -> states or messages

    def block(self, owner: str) -> tuple[Action, ...]:
        for name, actions in self.blocks:
            if name == owner:
                return actions
        raise KeyError(owner)

    def carrier(self, owner: str) -> tuple:
        for name, items in self.carriers:
            if name == owner:
                return items
        raise KeyError(owner)


def server_processes(model: SystemModel) -> ProcessPartition:
    blocks = []
    carriers = []
    for s in model.servers:
        blocks.append((s.name, tuple(
            a for a in model.actions if a.in_state.server == s.name)))
        carriers.append((s.name, tuple(
            ServerState(s.name, v) for v in s.values)))
    return ProcessPartition("server", tuple(blocks), tuple(carriers))


def agent_messages(model: SystemModel, agent: str) -> tuple[Message, ...]:
    """Possible messages of one agent: its initial message plus every message
    of the agent appearing in an action, in first-appearance order."""
    out = [model.initial_messages[model.agent_index(agent)]]
    for a in model.actions:
        for m in (a.in_message, a.out_message):
            if m is not None and m.agent == agent and m not in out:
                out.append(m)
    return tuple(out)


def agent_processes(model: SystemModel) -> ProcessPartition:
    blocks = []
    carriers = []
    for name in model.agents:
        blocks.append((name, tuple(
            a for a in model.actions if a.in_message.agent == name)))
        carriers.append((name, agent_messages(model, name)))
    return ProcessPartition("agent", tuple(blocks), tuple(carriers))
