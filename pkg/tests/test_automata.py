import dataclasses
import random

from hypothesis import given, settings, strategies as st

from imdskit import build_lts
from imdskit.automata import (TERMINAL_NODE, automata_json,
                              check_iso_with_lts, export_dot,
                              global_graph, to_ada3, to_sda3)
from imdskit.gen import random_model
from imdskit.model import Message


def test_buffer_sda3_shape(buffer_model):
    automata = to_sda3(buffer_model)
    assert [a.server for a in automata] == ["buf", "Sprod", "Scons"]
    buf = automata[0]
    assert buf.nodes == ("no_elem", "elem")
    assert len(buf.transitions) == 2
    labels = [t.label for t in buf.transitions]
    assert "Aprod.buf.put/Aprod.Sprod.ok_put" in labels
    assert "Acons.buf.get/Acons.Scons.ok_get" in labels


def test_buffer_initial_input_sets(buffer_model):
    automata = to_sda3(buffer_model)
    by_name = {a.server: a for a in automata}
    assert by_name["buf"].initial_input_set == frozenset()
    assert by_name["Sprod"].initial_input_set == frozenset(
        {Message("Aprod", "Sprod", "doSth")})
    assert by_name["Scons"].initial_input_set == frozenset(
        {Message("Acons", "Scons", "doSth")})


def test_crossed_sda3_has_terminating_transition(crossed_model):
    sem1 = to_sda3(crossed_model)[0]
    term = [t for t in sem1.transitions if t.out_message is None]
    assert len(term) == 1
    assert (term[0].source, term[0].target) == ("up", "down")
    assert term[0].in_message == Message("a2", "sem1", "p")


def test_buffer_ada3_shape(buffer_model):
    automata = to_ada3(buffer_model)
    aprod = automata[0]
    assert [m.short_label for m in aprod.nodes] == [
        "Sprod.doSth", "buf.put", "Sprod.ok_put"]
    assert len(aprod.transitions) == 3
    assert not aprod.terminal_reachable  # t exists but nothing targets it


def test_crossed_ada3_terminal_transition(crossed_model):
    a1 = to_ada3(crossed_model)[0]
    assert [m.short_label for m in a1.nodes] == ["sem1.p", "sem2.p"]
    to_t = [t for t in a1.transitions if t.target is None]
    assert len(to_t) == 1
    assert to_t[0].source.short_label == "sem2.p"
    assert to_t[0].label == "sem2.up/sem2.down"
    assert a1.terminal_reachable


def test_global_graphs_match_lts(buffer_model, buffer_lts,
                                 crossed_model, crossed_lts):
    for model, lts in [(buffer_model, buffer_lts), (crossed_model, crossed_lts)]:
        gs = global_graph(model, to_sda3(model), "sda3")
        ga = global_graph(model, to_ada3(model), "ada3")
        assert (len(gs.nodes), len(gs.edges)) == (lts.node_count, lts.edge_count)
        assert (len(ga.nodes), len(ga.edges)) == (lts.node_count, lts.edge_count)
        assert check_iso_with_lts(gs, lts).ok
        assert check_iso_with_lts(ga, lts).ok


def test_terminated_agents_leave_ada3_positions(crossed_model):
    automata = to_ada3(crossed_model)
    graph = global_graph(crossed_model, automata, "ada3")
    terminated_positions = [p for p in graph.nodes
                            if any(n is None for n in p.nodes)]
    assert len(terminated_positions) == 2  # one per terminating agent


def test_mutated_automaton_fails_iso(crossed_model, crossed_lts):
    automata = to_ada3(crossed_model)
    a1 = automata[0]
    mutated = (dataclasses.replace(a1, transitions=a1.transitions[1:]),) + automata[1:]
    graph = global_graph(crossed_model, mutated, "ada3")
    result = check_iso_with_lts(graph, crossed_lts)
    assert not result.ok and result.mismatch


def test_sda3_conserves_pending_symbols(crossed_model):
    graph = global_graph(crossed_model, to_sda3(crossed_model), "sda3")
    for src, aid, tgt in graph.edges:
        before = sum(len(s) for s in graph.nodes[src].input_sets)
        after = sum(len(s) for s in graph.nodes[tgt].input_sets)
        if crossed_model.actions[aid].terminating:
            assert after == before - 1
        else:
            assert after == before


def test_input_sets_bounded_by_agent_count(buffer_model):
    graph = global_graph(buffer_model, to_sda3(buffer_model), "sda3")
    for pos in graph.nodes:
        for s in pos.input_sets:
            assert len(s) <= len(buffer_model.agents)


def test_concurrent_firings_commute(buffer_model, crossed_model):
    # transitions enabled in different automata fire in either order to the
    # same position: no ordering constraints on the input sets
    from imdskit.automata import (ada3_enabled, ada3_fire, ada3_moves,
                                  sda3_enabled, sda3_fire, sda3_moves)
    for model in (buffer_model, crossed_model):
        sda = to_sda3(model)
        graph = global_graph(model, sda, "sda3")
        moves = sda3_moves(model, sda)
        for pos in graph.nodes:
            enabled = [(i, tr) for i, tr in moves if sda3_enabled(pos, i, tr)]
            for a, (i1, t1) in enumerate(enabled):
                for i2, t2 in enabled[a + 1:]:
                    if i1 == i2:
                        continue  # same automaton: genuinely sequential
                    one = sda3_fire(model, sda3_fire(model, pos, i1, t1), i2, t2)
                    two = sda3_fire(model, sda3_fire(model, pos, i2, t2), i1, t1)
                    assert one == two
        ada = to_ada3(model)
        agraph = global_graph(model, ada, "ada3")
        amoves = ada3_moves(model, ada)
        for pos in agraph.nodes:
            enabled = [(i, tr) for i, tr in amoves
                       if ada3_enabled(model, pos, i, tr)]
            for a, (i1, t1) in enumerate(enabled):
                for i2, t2 in enabled[a + 1:]:
                    if i1 == i2 or t1.in_state.server == t2.in_state.server:
                        continue  # shared resource: a real conflict
                    one = ada3_fire(model, ada3_fire(model, pos, i1, t1), i2, t2)
                    two = ada3_fire(model, ada3_fire(model, pos, i2, t2), i1, t1)
                    assert one == two


def test_export_dot_sda3_labels(buffer_model):
    dots = export_dot(to_sda3(buffer_model))
    assert set(dots) == {"buf", "Sprod", "Scons"}
    buf = dots["buf"]
    assert '"no_elem"' in buf and '"elem"' in buf
    assert '"buf.no_elem"' not in buf  # prefixes omitted
    assert "style=bold" in buf  # initial node marked


def test_export_dot_ada3_terminal(crossed_model, buffer_model):
    dots = export_dot(to_ada3(crossed_model))
    assert '"t"' in dots["a1"]
    quiet = export_dot(to_ada3(buffer_model))
    assert '"t"' not in quiet["Aprod"]  # unreachable terminal hidden
    shown = export_dot(to_ada3(buffer_model), show_unreachable_terminal=True)
    assert '"t"' in shown["Aprod"]


def test_export_dot_empty_model():
    assert export_dot(()) == {}


def test_automata_json_shapes(buffer_model):
    sda = automata_json(buffer_model, "sda3")
    assert sda["schema_version"] == 1 and sda["view"] == "sda3"
    buf = sda["automata"][0]
    assert buf["id"] == "buf" and buf["initial"] == "no_elem"
    ada = automata_json(buffer_model, "ada3")
    aprod = ada["automata"][0]
    assert aprod["nodes"][-1] == TERMINAL_NODE
    assert aprod["terminal_reachable"] is False


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_models_global_graphs_match_lts(seed):
    model = random_model(random.Random(seed))
    lts = build_lts(model)
    for kind, derive in (("sda3", to_sda3), ("ada3", to_ada3)):
        graph = global_graph(model, derive(model), kind)
        assert check_iso_with_lts(graph, lts).ok
