import random

import pytest
from hypothesis import given, settings, strategies as st

from imdskit.gen import random_model
from imdskit.parser import (ArityMismatch, ConstraintViolation, DuplicateName,
                            SpecSyntaxError, UnknownIdentifier, parse, render)


def test_buffer_server_view_counts(buffer_model):
    assert len(buffer_model.servers) == 3
    assert len(buffer_model.agents) == 2
    assert len(buffer_model.actions) == 6
    buf = buffer_model.server_decl("buf")
    assert buf.values == ("no_elem", "elem")
    assert buf.services == ("put", "get")


def test_both_views_parse_to_the_same_model(buffer_model, buffer_agent_model):
    assert buffer_model == buffer_agent_model


def test_round_trip_both_views(buffer_model, crossed_model):
    for model in (buffer_model, crossed_model):
        for view in ("server", "agent"):
            text = render(model, view)
            reparsed, seen_view = parse(text)
            assert seen_view == view
            assert reparsed == model


def test_rendered_agent_view_groups_by_agent(buffer_model):
    text = render(buffer_model, "agent")
    aprod_block = text.split("agent: Aprod")[1].split("agent: Acons")[0]
    assert aprod_block.count("->") == 3
    acons_block = text.split("agent: Acons")[1].split("agents ")[0]
    assert acons_block.count("->") == 3


def test_crossed_render_server_view_reparses(crossed_model):
    model, _ = parse(render(crossed_model, "server"))
    assert len(model.actions) == 4
    assert sum(1 for a in model.actions if a.terminating) == 2


def test_template_reuse_with_two_instances(crossed_model):
    source = """
    # one semaphore template, instantiated twice with crossed bindings
    system crossed_semaphores;
    server: sem (agents holder, taker; servers other),
    services {p},
    states {up, down},
    actions {
        {holder.sem.p, sem.up} -> {holder.other.p, sem.down},
        {taker.sem.p, sem.up} -> {sem.down},
    }
    servers sem1:sem, sem2:sem;
    agents a1, a2;
    init -> {
        sem1(a1, a2, sem2).up,
        sem2(a2, a1, sem1).up,
        a1.sem1.p,
        a2.sem2.p,
    }.
    """
    model, view = parse(source)
    assert view == "server"
    assert model == crossed_model


def test_comments_and_flexible_separators():
    source = (
        "system tiny; # header comment\n"
        "server: s (agents a), services {r} states {v}\n"
        "actions { {a.s.r, s.v} -> {s.v} }\n"
        "servers s; agents a;\n"
        "init -> { s(a).v, a.s.r }\n"  # no closing period
    )
    model, _ = parse(source)
    assert len(model.actions) == 1
    assert model.actions[0].terminating


def test_syntax_error_carries_span():
    with pytest.raises(SpecSyntaxError) as exc:
        parse("system x;\nserver: s,\nstates {v} services {r} actions { oops }\n"
              "servers s; agents a;\ninit -> { s.v, a.s.r }.")
    assert exc.value.span.line == 3


def test_unknown_identifier_in_action():
    source = """
    system x;
    server: s (agents a; servers nowhere),
    services {r}, states {v},
    actions { {a.s.r, s.v} -> {a.ghost.r, s.v} }
    servers s; agents a;
    init -> { s(a, s).v, a.s.r }.
    """
    with pytest.raises(UnknownIdentifier):
        parse(source)


def test_arity_mismatch():
    source = """
    system x;
    server: s (agents a),
    services {r}, states {v},
    actions { {a.s.r, s.v} -> {s.v} }
    servers s; agents a;
    init -> { s.v, a.s.r }.
    """
    with pytest.raises(ArityMismatch):
        parse(source)


def test_duplicate_server_variable():
    source = """
    system x;
    server: s, services {r} states {v};
    servers s, s; agents a;
    init -> { s.v, a.s.r }.
    """
    with pytest.raises(DuplicateName):
        parse(source)


def test_constraint_violation_mismatched_servers():
    source = """
    system x;
    server: s1 (agents A; servers s2), services {r}, states {v},
    actions { {A.s1.r, s2.v} -> {A.s1.r, s2.v} }
    server: s2, services {r} states {v};
    servers s1, s2; agents A;
    init -> { s1(A, s2).v, s2.v, A.s1.r }.
    """
    with pytest.raises(ConstraintViolation) as exc:
        parse(source)
    assert any("differs from state server" in d for d in exc.value.diagnostics)
    assert exc.value.span.line == 4  # the offending action template line


def test_nondeterministic_branching_parses():
    source = """
    system chooser;
    server: s (agents a),
    services {r}, states {v, w},
    actions {
        {a.s.r, s.v} -> {a.s.r, s.v},
        {a.s.r, s.v} -> {a.s.r, s.w},
    }
    servers s; agents a;
    init -> { s(a).v, a.s.r }.
    """
    model, _ = parse(source)
    assert len(model.actions) == 2
    assert model.actions[0].in_state == model.actions[1].in_state
    assert model.actions[0].in_message == model.actions[1].in_message


def test_view_detection(buffer_model):
    assert parse(render(buffer_model, "server"))[1] == "server"
    assert parse(render(buffer_model, "agent"))[1] == "agent"


def test_missing_initial_state():
    source = """
    system x;
    server: s, services {r} states {v};
    servers s; agents a;
    init -> { a.s.r }.
    """
    with pytest.raises(ConstraintViolation) as exc:
        parse(source)
    assert "no initial state" in exc.value.message


def test_undeclared_value_is_a_constraint_violation():
    source = """
    system x;
    server: s, services {r} states {v};
    servers s; agents a;
    init -> { s.bogus, a.s.r }.
    """
    with pytest.raises(ConstraintViolation):
        parse(source)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_models_round_trip(seed):
    model = random_model(random.Random(seed))
    for view in ("server", "agent"):
        reparsed, _ = parse(render(model, view))
        assert reparsed == model
