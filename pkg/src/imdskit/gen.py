"""Random small-model generation for property tests and fuzzing.

Models are valid by construction: action inputs and outputs respect the
server/agent constraints, every server gets an initial state and every
agent an initial message.  Sizes stay small enough that the configuration
space is a few hundred nodes at most.
"""

import random

from .model import Action, Message, ServerDecl, ServerState, SystemModel


def random_model(rng: random.Random, max_servers: int = 3, max_agents: int = 3,
                 max_actions: int = 10, name: str = "random") -> SystemModel:
    servers = []
    for i in range(rng.randint(1, max_servers)):
        values = tuple(f"v{j}" for j in range(rng.randint(1, 3)))
        services = tuple(f"r{j}" for j in range(rng.randint(1, 2)))
        servers.append(ServerDecl(f"s{i}", values, services))
    agents = tuple(f"a{i}" for i in range(rng.randint(1, max_agents)))

    def any_message(agent: str) -> Message:
        s = rng.choice(servers)
        return Message(agent, s.name, rng.choice(s.services))

    actions = set()
    for _ in range(rng.randint(1, max_actions)):
        agent = rng.choice(agents)
        s = rng.choice(servers)
        in_message = Message(agent, s.name, rng.choice(s.services))
        in_state = ServerState(s.name, rng.choice(s.values))
        out_state = ServerState(s.name, rng.choice(s.values))
        out_message = None if rng.random() < 0.25 else any_message(agent)
        actions.add(Action(in_message, in_state, out_message, out_state))

    return SystemModel(
        name=name,
        servers=tuple(servers),
        agents=agents,
        actions=tuple(actions),
        initial_states=tuple(ServerState(s.name, rng.choice(s.values))
                             for s in servers),
        initial_messages=tuple(any_message(a) for a in agents),
    )
