"""Independent brute-force oracle, deliberately kept free of imdskit imports.

Systems are plain dicts, configurations are plain tuples, and the search is
a naive fixpoint closure.  Expected values frozen into the test suite were
computed with this module first; it must never call into the package it
checks.

System dict layout::

    {
      "servers": [(name, [values...]), ...],
      "agents": [names...],
      "actions": [((agent, server, service), (server, value),
                   (agent, server, service) | None, (server, value)), ...],
      "init_states": {server: value},
      "init_messages": {agent: (server, service)},
    }

A configuration is ``(tuple_of_values, tuple_of_messages_or_None)`` indexed
by server/agent declaration order.
"""

from collections import deque


def initial(sys):
    states = tuple(sys["init_states"][s] for s, _ in sys["servers"])
    msgs = tuple(sys["init_messages"][a] for a in sys["agents"])
    return states, msgs


def enabled(sys, config):
    states, msgs = config
    sidx = {s: i for i, (s, _) in enumerate(sys["servers"])}
    aidx = {a: i for i, a in enumerate(sys["agents"])}
    out = []
    for k, (m, p, m2, p2) in enumerate(sys["actions"]):
        agent, server, service = m
        if msgs[aidx[agent]] != (server, service):
            continue
        if states[sidx[p[0]]] != p[1]:
            continue
        out.append(k)
    return out


def fire(sys, config, k):
    states, msgs = config
    sidx = {s: i for i, (s, _) in enumerate(sys["servers"])}
    aidx = {a: i for i, a in enumerate(sys["agents"])}
    m, p, m2, p2 = sys["actions"][k]
    states = list(states)
    states[sidx[p2[0]]] = p2[1]
    msgs = list(msgs)
    if m2 is None:
        msgs[aidx[m[0]]] = None
    else:
        msgs[aidx[m2[0]]] = (m2[1], m2[2])
    return tuple(states), tuple(msgs)


def explore(sys):
    """All reachable configurations and edges, BFS from the initial one."""
    start = initial(sys)
    order = [start]
    seen = {start}
    edges = []
    queue = deque([start])
    while queue:
        cfg = queue.popleft()
        for k in enabled(sys, cfg):
            nxt = fire(sys, cfg, k)
            edges.append((cfg, k, nxt))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order, edges


def dead_configs(sys):
    nodes, _ = explore(sys)
    return [c for c in nodes if not enabled(sys, c)]


def reachable_from(sys, config):
    seen = {config}
    queue = deque([config])
    while queue:
        cfg = queue.popleft()
        for k in enabled(sys, cfg):
            nxt = fire(sys, cfg, k)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def shortest_trace(sys, predicate):
    """BFS-shortest action sequence to a configuration satisfying predicate."""
    start = initial(sys)
    if predicate(start):
        return []
    seen = {start}
    queue = deque([(start, [])])
    while queue:
        cfg, trace = queue.popleft()
        for k in enabled(sys, cfg):
            nxt = fire(sys, cfg, k)
            if nxt in seen:
                continue
            seen.add(nxt)
            if predicate(nxt):
                return trace + [k]
            queue.append((nxt, trace + [k]))
    return None


def agent_never_acts_again(sys, config, agent):
    """True if no configuration reachable from config fires an action of agent."""
    aidx = sys["agents"].index(agent)
    states, msgs = config
    if msgs[aidx] is None:
        return False
    for cfg in reachable_from(sys, config):
        for k in enabled(sys, cfg):
            if sys["actions"][k][0][0] == agent:
                return False
    return True


def strongly_connected(sys):
    """Naive O(n^2) check: every node reaches every other."""
    nodes, _ = explore(sys)
    universe = set(nodes)
    return all(reachable_from(sys, c) == universe for c in nodes)


# ---------------------------------------------------------------------------
# The two reference systems, written out by hand from their definitions.

BUFFER = {
    "servers": [
        ("buf", ["no_elem", "elem"]),
        ("Sprod", ["neutral", "prod"]),
        ("Scons", ["neutral", "cons"]),
    ],
    "agents": ["Aprod", "Acons"],
    "actions": [
        (("Aprod", "buf", "put"), ("buf", "no_elem"),
         ("Aprod", "Sprod", "ok_put"), ("buf", "elem")),
        (("Acons", "buf", "get"), ("buf", "elem"),
         ("Acons", "Scons", "ok_get"), ("buf", "no_elem")),
        (("Aprod", "Sprod", "doSth"), ("Sprod", "neutral"),
         ("Aprod", "buf", "put"), ("Sprod", "prod")),
        (("Aprod", "Sprod", "ok_put"), ("Sprod", "prod"),
         ("Aprod", "Sprod", "doSth"), ("Sprod", "neutral")),
        (("Acons", "Scons", "doSth"), ("Scons", "neutral"),
         ("Acons", "buf", "get"), ("Scons", "cons")),
        (("Acons", "Scons", "ok_get"), ("Scons", "cons"),
         ("Acons", "Scons", "doSth"), ("Scons", "neutral")),
    ],
    "init_states": {"buf": "no_elem", "Sprod": "neutral", "Scons": "neutral"},
    "init_messages": {"Aprod": ("Sprod", "doSth"), "Acons": ("Scons", "doSth")},
}

CROSSED = {
    "servers": [("sem1", ["up", "down"]), ("sem2", ["up", "down"])],
    "agents": ["a1", "a2"],
    "actions": [
        (("a1", "sem1", "p"), ("sem1", "up"),
         ("a1", "sem2", "p"), ("sem1", "down")),
        (("a1", "sem2", "p"), ("sem2", "up"), None, ("sem2", "down")),
        (("a2", "sem2", "p"), ("sem2", "up"),
         ("a2", "sem1", "p"), ("sem2", "down")),
        (("a2", "sem1", "p"), ("sem1", "up"), None, ("sem1", "down")),
    ],
    "init_states": {"sem1": "up", "sem2": "up"},
    "init_messages": {"a1": ("sem1", "p"), "a2": ("sem2", "p")},
}


def buffer_product_configs():
    """The 3x3x2 product of agent phases and buffer values.

    Server states are a function of the owning agent's phase, so the full
    configuration space is this product if everything is reachable.
    """
    prod_phases = [("Sprod", "doSth"), ("buf", "put"), ("Sprod", "ok_put")]
    cons_phases = [("Scons", "doSth"), ("buf", "get"), ("Scons", "ok_get")]
    sprod_of = {("Sprod", "doSth"): "neutral", ("buf", "put"): "prod",
                ("Sprod", "ok_put"): "prod"}
    scons_of = {("Scons", "doSth"): "neutral", ("buf", "get"): "cons",
                ("Scons", "ok_get"): "cons"}
    out = set()
    for mp in prod_phases:
        for mc in cons_phases:
            for bv in ["no_elem", "elem"]:
                out.add(((bv, sprod_of[mp], scons_of[mc]), (mp, mc)))
    return out


if __name__ == "__main__":
    for name, sys in [("buffer", BUFFER), ("crossed", CROSSED)]:
        nodes, edges = explore(sys)
        dead = dead_configs(sys)
        print(f"{name}: {len(nodes)} nodes, {len(edges)} edges, "
              f"{len(dead)} dead, strongly_connected={strongly_connected(sys)}")
    print("buffer nodes == 3x3x2 product:",
          set(explore(BUFFER)[0]) == buffer_product_configs())
