"""Deadlock, termination, and dead-action verdicts over a complete LTS.

Normative predicates:

* total deadlock: a reachable node with at least one pending message and no
  enabled action (the pending message separates deadlock from termination);
* agent partial deadlock: a reachable node where the agent's message pends
  and no node reachable from there ever fires one of the agent's actions;
* server partial deadlock: same, with messages addressed to the server and
  actions owned by it;
* can-terminate: a node with the agent terminated is reachable; must-
  terminate: every maximal path terminates the agent (no alive cycle, no
  dead end while alive).

Witnesses are BFS-shortest traces, ties broken by node index.
"""

from collections import deque
from dataclasses import dataclass

from .lts import Lts, Trace, shortest_path
from .model import SystemModel, apply_action, config_text, initial_configuration

TOTAL_DEADLOCK = "total-deadlock"
PARTIAL_DEADLOCK_AGENT = "partial-deadlock-agent"
PARTIAL_DEADLOCK_SERVER = "partial-deadlock-server"
TOTAL_TERMINATION = "total-termination"
AGENT_TERMINATION = "agent-termination"
DEAD_ACTION = "dead-action"


@dataclass(frozen=True)
class Verdict:
    kind: str
    subject: str | None
    holds: bool
    witness: Trace | None

    @property
    def verdict_id(self) -> str:
        return self.kind if self.subject is None else f"{self.kind}:{self.subject}"


@dataclass(frozen=True)
class AgentTermination:
    agent: str
    can_terminate: bool
    must_terminate: bool
    witness: Trace | None


@dataclass(frozen=True)
class TerminationReport:
    agents: tuple[AgentTermination, ...]
    total_can: bool
    total_must: bool
    total_witness: Trace | None


def _backward_live(lts: Lts, marked: set[int]) -> set[int]:
    """Nodes from which some marked node is reachable (marked included)."""
    back = [[] for _ in lts.nodes]
    for src, _, tgt in lts.edges:
        back[tgt].append(src)
    live = set(marked)
    queue = deque(marked)
    while queue:
        u = queue.popleft()
        for v in back[u]:
            if v not in live:
                live.add(v)
                queue.append(v)
    return live


def _has_cycle(n: int, keep, edges) -> bool:
    """Cycle in the subgraph induced by keep (a node predicate)."""
    indeg = [0] * n
    adj = [[] for _ in range(n)]
    alive = [keep(i) for i in range(n)]
    count = 0
    for src, _, tgt in edges:
        if alive[src] and alive[tgt]:
            adj[src].append(tgt)
            indeg[tgt] += 1
    queue = deque(i for i in range(n) if alive[i] and indeg[i] == 0)
    total = sum(alive)
    while queue:
        u = queue.popleft()
        count += 1
        for v in adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return count != total


def detect_total_deadlock(lts: Lts) -> Verdict:
    dead = {lts.nodes[i] for i in range(lts.node_count)
            if lts.enabled_count[i] == 0 and lts.nodes[i].pending_count > 0}
    witness = shortest_path(lts, dead.__contains__) if dead else None
    return Verdict(TOTAL_DEADLOCK, None, bool(dead), witness)


def _partial_deadlock(lts: Lts, pending, owned_action_ids) -> tuple[bool, Trace | None]:
    marked = {src for src, aid, _ in lts.edges if aid in owned_action_ids}
    live = _backward_live(lts, marked)
    stuck = {i for i in range(lts.node_count)
             if pending(lts.nodes[i]) and i not in live}
    if not stuck:
        return False, None
    target = lts.nodes[min(stuck)]
    return True, shortest_path(lts, lambda c: c == target)


def detect_partial_deadlock_agents(lts: Lts) -> list[Verdict]:
    model = lts.model
    out = []
    for ai, agent in enumerate(model.agents):
        owned = {i for i, a in enumerate(model.actions)
                 if a.in_message.agent == agent}
        holds, witness = _partial_deadlock(
            lts, lambda c: c.messages[ai] is not None, owned)
        out.append(Verdict(PARTIAL_DEADLOCK_AGENT, agent, holds, witness))
    return out


def detect_partial_deadlock_servers(lts: Lts) -> list[Verdict]:
    model = lts.model
    out = []
    for server in (s.name for s in model.servers):
        owned = {i for i, a in enumerate(model.actions)
                 if a.in_state.server == server}
        holds, witness = _partial_deadlock(
            lts,
            lambda c, s=server: any(m is not None and m.server == s
                                    for m in c.messages),
            owned)
        out.append(Verdict(PARTIAL_DEADLOCK_SERVER, server, holds, witness))
    return out


def detect_termination(lts: Lts) -> TerminationReport:
    model = lts.model
    n = lts.node_count
    agents = []
    for ai, agent in enumerate(model.agents):
        can = any(lts.nodes[i].messages[ai] is None for i in range(n))
        witness = None
        if can:
            witness = shortest_path(lts, lambda c, ai=ai: c.messages[ai] is None)

        def alive(i, ai=ai):
            return lts.nodes[i].messages[ai] is not None

        dead_end_alive = any(alive(i) and lts.enabled_count[i] == 0
                             for i in range(n))
        must = not dead_end_alive and not _has_cycle(n, alive, lts.edges)
        agents.append(AgentTermination(agent, can, must, witness))

    total_can = any(lts.nodes[i].pending_count == 0 for i in range(n))
    total_witness = None
    if total_can:
        total_witness = shortest_path(lts, lambda c: c.pending_count == 0)
    dead_end_pending = any(lts.enabled_count[i] == 0
                           and lts.nodes[i].pending_count > 0 for i in range(n))
    total_must = not dead_end_pending and not _has_cycle(n, lambda i: True,
                                                         lts.edges)
    return TerminationReport(tuple(agents), total_can, total_must, total_witness)


def dead_actions(lts: Lts, model: SystemModel) -> set[int]:
    fired = {aid for _, aid, _ in lts.edges}
    return set(range(len(model.actions))) - fired


def expand_trace(model: SystemModel, trace: Trace) -> list[tuple[str, str, str]]:
    """(action label, source configuration text, target configuration text)."""
    config = initial_configuration(model)
    out = []
    for aid in trace:
        nxt = apply_action(model, config, model.actions[aid])
        out.append((model.actions[aid].label, config_text(model, config),
                    config_text(model, nxt)))
        config = nxt
    return out


# ---------------------------------------------------------------------------
# Aggregate report


@dataclass(frozen=True)
class Report:
    model: SystemModel
    lts: Lts
    verdicts: tuple[Verdict, ...]
    termination: TerminationReport

    def verdict_by_id(self, vid: str) -> Verdict | None:
        for v in self.verdicts:
            if v.verdict_id == vid:
                return v
        return None

    @property
    def any_deadlock(self) -> bool:
        return any(v.holds and v.kind in (TOTAL_DEADLOCK, PARTIAL_DEADLOCK_AGENT,
                                          PARTIAL_DEADLOCK_SERVER)
                   for v in self.verdicts)


def analyze(lts: Lts) -> Report:
    model = lts.model
    verdicts = [detect_total_deadlock(lts)]
    verdicts += detect_partial_deadlock_agents(lts)
    verdicts += detect_partial_deadlock_servers(lts)
    term = detect_termination(lts)
    for at in term.agents:
        verdicts.append(Verdict(AGENT_TERMINATION, at.agent, at.can_terminate,
                                at.witness))
    verdicts.append(Verdict(TOTAL_TERMINATION, None, term.total_can,
                            term.total_witness))
    for aid in sorted(dead_actions(lts, model)):
        verdicts.append(Verdict(DEAD_ACTION, model.actions[aid].label, True, None))
    return Report(model, lts, tuple(verdicts), term)


def _witness_json(model: SystemModel, witness: Trace | None):
    if witness is None:
        return None
    steps = expand_trace(model, witness)
    return {
        "actions": list(witness),
        "steps": [{"action": a, "source": s, "target": t} for a, s, t in steps],
        "final": steps[-1][2] if steps else config_text(
            model, initial_configuration(model)),
    }


def report_json(report: Report) -> dict:
    model = report.model
    must = {at.agent: at.must_terminate for at in report.termination.agents}
    verdicts = []
    for v in report.verdicts:
        entry = {
            "kind": v.kind,
            "subject": v.subject,
            "holds": v.holds,
            "witness": _witness_json(model, v.witness),
        }
        if v.kind == AGENT_TERMINATION:
            entry["must_terminate"] = must[v.subject]
        if v.kind == TOTAL_TERMINATION:
            entry["must_terminate"] = report.termination.total_must
        verdicts.append(entry)
    return {
        "schema_version": 1,
        "model": model.name,
        "lts": {"nodes": report.lts.node_count, "edges": report.lts.edge_count},
        "deadlock": report.any_deadlock,
        "verdicts": verdicts,
    }


def report_text(report: Report) -> str:
    rows = [("verdict", "subject", "holds", "witness")]
    for v in report.verdicts:
        wit = "-"
        if v.witness is not None:
            steps = expand_trace(report.model, v.witness)
            final = steps[-1][2] if steps else config_text(
                report.model, initial_configuration(report.model))
            wit = f"{len(v.witness)} step(s) to {final}"
        rows.append((v.kind, v.subject or "-",
                     "HOLDS" if v.holds else "no", wit))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = [f"model {report.model.name}: LTS {report.lts.node_count} nodes / "
             f"{report.lts.edge_count} edges"]
    for r in rows:
        lines.append(f"{r[0]:<{widths[0]}}  {r[1]:<{widths[1]}}  "
                     f"{r[2]:<{widths[2]}}  {r[3]}")
    return "\n".join(lines) + "\n"
