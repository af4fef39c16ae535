"""Step-by-step execution over either automata family.

A session tracks only the current global position and the action history,
never the global graph; undo and reset recompute the position by replay,
which keeps memory proportional to the history and guarantees that equal
histories give bit-identical snapshots.

A pinned trace supports counterexample-guided replay: advance fires the
next pinned action, a manual step matching the pin advances the cursor,
and any other step clears the pin.
"""

import random
from dataclasses import dataclass

from .automata import (Ada3Position, Sda3Position, TERMINAL_NODE,
                       ada3_enabled, ada3_fire, ada3_initial, ada3_moves,
                       sda3_enabled, sda3_fire, sda3_initial, sda3_moves,
                       to_ada3, to_sda3)
from .model import Configuration, ServerState, SystemModel, config_text


class TransitionNotEnabled(Exception):
    pass


class NothingToUndo(Exception):
    pass


class TraceMismatch(Exception):
    def __init__(self, index: int, message: str):
        super().__init__(f"trace step {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class TransitionView:
    """One automaton transition with its current enabledness."""

    owner: str
    action_id: int
    label: str
    source: str
    target: str
    enabled: bool


@dataclass(frozen=True)
class StepResult:
    action_id: int
    focus: str | None  # destination automaton hint (server view only)


class Session:
    """Single-threaded simulation over one model in one automata view."""

    def __init__(self, model: SystemModel, view: str):
        if view not in ("sda3", "ada3"):
            raise ValueError(f"view must be 'sda3' or 'ada3', not {view!r}")
        self.model = model
        self.view = view
        if view == "sda3":
            self.automata = to_sda3(model)
            self._moves = sda3_moves(model, self.automata)
        else:
            self.automata = to_ada3(model)
            self._moves = ada3_moves(model, self.automata)
        self._by_action = {tr.action_id: (idx, tr) for idx, tr in self._moves}
        self.position = self._initial()
        self.history: list[int] = []
        self.pinned_trace: tuple[int, ...] | None = None
        self.cursor = 0

    def _initial(self):
        if self.view == "sda3":
            return sda3_initial(self.model, self.automata)
        return ada3_initial(self.model, self.automata)

    def _enabled(self, idx: int, tr) -> bool:
        if self.view == "sda3":
            return sda3_enabled(self.position, idx, tr)
        return ada3_enabled(self.model, self.position, idx, tr)

    def _fire(self, idx: int, tr):
        if self.view == "sda3":
            return sda3_fire(self.model, self.position, idx, tr)
        return ada3_fire(self.model, self.position, idx, tr)

    # -- queries -----------------------------------------------------------

    def enabled(self) -> list[TransitionView]:
        """Every transition of every automaton, flagged enabled iff its
        source node is current and its input symbol is available."""
        out = []
        for idx, tr in self._moves:
            if self.view == "sda3":
                owner = self.automata[idx].server
                source, target = tr.source, tr.target
            else:
                owner = self.automata[idx].agent
                source = tr.source.short_label
                target = TERMINAL_NODE if tr.target is None else tr.target.short_label
            out.append(TransitionView(owner, tr.action_id, tr.label, source,
                                      target, self._enabled(idx, tr)))
        return out

    def enabled_ids(self) -> list[int]:
        return [tv.action_id for tv in self.enabled() if tv.enabled]

    def configuration(self) -> Configuration:
        """The configuration this position corresponds to."""
        if self.view == "sda3":
            pos: Sda3Position = self.position
            states = tuple(ServerState(s.name, v)
                           for s, v in zip(self.model.servers, pos.nodes))
            pending = {m.agent: m for ms in pos.input_sets for m in ms}
            messages = tuple(pending.get(a) for a in self.model.agents)
            return Configuration(states, messages)
        pos: Ada3Position = self.position
        states = tuple(ServerState(s.name, v)
                       for s, v in zip(self.model.servers, pos.vector))
        return Configuration(states, pos.nodes)

    # -- mutations ----------------------------------------------------------

    def step(self, action_id: int) -> StepResult:
        entry = self._by_action.get(action_id)
        if entry is None:
            raise TransitionNotEnabled(f"unknown transition {action_id}")
        idx, tr = entry
        if not self._enabled(idx, tr):
            raise TransitionNotEnabled(
                f"transition {action_id} ({tr.label}) is not enabled")
        self.position = self._fire(idx, tr)
        self.history.append(action_id)
        if self.pinned_trace is not None:
            if (self.cursor < len(self.pinned_trace)
                    and self.pinned_trace[self.cursor] == action_id):
                self.cursor += 1
            else:
                self.pinned_trace = None
                self.cursor = 0
        focus = None
        if self.view == "sda3" and tr.out_message is not None:
            focus = tr.out_message.server
        return StepResult(action_id, focus)

    def undo(self) -> None:
        if not self.history:
            raise NothingToUndo("empty history")
        undone = self.history.pop()
        if (self.pinned_trace is not None and self.cursor > 0
                and self.pinned_trace[self.cursor - 1] == undone):
            self.cursor -= 1
        self._replay()

    def reset(self) -> None:
        self.history.clear()
        self.cursor = 0
        self.position = self._initial()

    def _replay(self) -> None:
        history = list(self.history)
        self.position = self._initial()
        self.history = []
        for aid in history:
            idx, tr = self._by_action[aid]
            if not self._enabled(idx, tr):
                raise AssertionError("history replay diverged")
            self.position = self._fire(idx, tr)
            self.history.append(aid)

    def load_trace(self, trace) -> None:
        """Pin a trace after checking it replays from the initial position;
        the session is reset to the initial position with the cursor at 0."""
        trace = tuple(trace)
        pos = self._initial()
        saved = self.position
        self.position = pos
        try:
            for i, aid in enumerate(trace):
                entry = self._by_action.get(aid)
                if entry is None:
                    raise TraceMismatch(i, f"unknown transition {aid}")
                idx, tr = entry
                if not self._enabled(idx, tr):
                    raise TraceMismatch(i, f"transition {aid} ({tr.label}) "
                                           "is not enabled at this point")
                self.position = self._fire(idx, tr)
        finally:
            self.position = saved
        self.reset()
        self.pinned_trace = trace
        self.cursor = 0

    def advance(self) -> StepResult:
        if self.pinned_trace is None:
            raise TraceMismatch(self.cursor, "no trace is pinned")
        if self.cursor >= len(self.pinned_trace):
            raise TraceMismatch(self.cursor, "pinned trace is exhausted")
        return self.step(self.pinned_trace[self.cursor])


def new_session(model: SystemModel, view: str) -> Session:
    return Session(model, view)


def snapshot(session: Session) -> dict:
    """JSON-stable view of the session; a pure function of the history."""
    model = session.model
    if session.view == "sda3":
        pos: Sda3Position = session.position
        current = {
            "nodes": {s.name: v for s, v in zip(model.servers, pos.nodes)},
            "input_sets": {s.name: sorted(m.label for m in ms)
                           for s, ms in zip(model.servers, pos.input_sets)},
        }
        terminated = [a for a, m in zip(model.agents,
                                        session.configuration().messages)
                      if m is None]
    else:
        pos: Ada3Position = session.position
        current = {
            "nodes": {a: (None if m is None else m.short_label)
                      for a, m in zip(model.agents, pos.nodes)},
            "vector": {s.name: v for s, v in zip(model.servers, pos.vector)},
        }
        terminated = [a for a, m in zip(model.agents, pos.nodes) if m is None]
    return {
        "schema_version": 1,
        "model": model.name,
        "view": session.view,
        "current": current,
        "terminated": terminated,
        "transitions": [{
            "automaton": tv.owner,
            "action": tv.action_id,
            "label": tv.label,
            "from": tv.source,
            "to": tv.target,
            "enabled": tv.enabled,
        } for tv in session.enabled()],
        "history": list(session.history),
        "pinned_trace": (None if session.pinned_trace is None
                         else list(session.pinned_trace)),
        "cursor": session.cursor,
        "configuration": config_text(model, session.configuration()),
    }


def random_walk(session: Session, steps: int, rng: random.Random) -> list[int]:
    """Uniform choice among enabled transitions; stops early when stuck."""
    walked = []
    for _ in range(steps):
        ids = session.enabled_ids()
        if not ids:
            break
        aid = rng.choice(ids)
        session.step(aid)
        walked.append(aid)
    return walked
