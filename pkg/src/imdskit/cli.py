"""Command-line entry point tying the whole pipeline together.

Exit codes: 0 success, 1 findings or input errors (a held deadlock verdict,
a failed check), 2 usage errors, 3 exploration limit exceeded.
"""

import argparse
import json
import random
import sys
from pathlib import Path

from .analysis import analyze, report_json, report_text
from .automata import (automata_json, check_iso_with_lts as automata_iso,
                       export_dot, global_graph, to_ada3, to_sda3)
from .explore import LimitExceeded, Limits
from .lts import build_lts, strongly_connected, to_dot, to_text
from .model import config_text
from .parser import SpecError, parse_file, render
from .petri import (check_iso_with_lts as petri_iso, marking_graph,
                    minimal_siphons, minimal_traps, p_invariants,
                    siphon_emptiable, structural_report, to_andl, to_petri)
from .petri import to_dot as petri_dot
from .simulator import Session, TraceMismatch, TransitionNotEnabled, random_walk, snapshot


def _limits(args) -> Limits:
    return Limits.from_env(getattr(args, "max_nodes", None),
                           getattr(args, "max_edges", None))


def _write(path: str, content: str):
    Path(path).write_text(content, encoding="utf-8")
    print(f"wrote {path}")


def cmd_check(args) -> int:
    model, view = parse_file(args.file)
    print(f"ok: {len(model.servers)} server(s), {len(model.agents)} agent(s), "
          f"{len(model.actions)} action(s), {view} view")
    return 0


def cmd_convert(args) -> int:
    model, _ = parse_file(args.file)
    text = render(model, args.to)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_lts(args) -> int:
    model, _ = parse_file(args.file)
    lts = build_lts(model, _limits(args))
    print(f"nodes={lts.node_count} edges={lts.edge_count} "
          f"strongly_connected={strongly_connected(lts)}")
    if args.dot:
        _write(args.dot, to_dot(lts))
    if args.dump:
        _write(args.dump, to_text(lts))
    return 0


def cmd_verify(args) -> int:
    model, _ = parse_file(args.file)
    lts = build_lts(model, _limits(args))
    report = analyze(lts)
    sys.stdout.write(report_text(report))
    if args.json:
        _write(args.json, json.dumps(report_json(report), indent=2) + "\n")
    return 1 if report.any_deadlock else 0


def cmd_petri(args) -> int:
    model, _ = parse_file(args.file)
    net = to_petri(model)
    print(f"places={len(net.places)} transitions={len(net.transitions)}")
    graph = None
    if args.siphons or args.report:
        graph = marking_graph(net, _limits(args))
    if args.andl:
        _write(args.andl, to_andl(net))
    if args.dot:
        _write(args.dot, petri_dot(net))
    if args.siphons:
        names = lambda d: "{" + ", ".join(net.places[i].name for i in d) + "}"
        for d in minimal_siphons(net):
            at = siphon_emptiable(net, d, graph)
            status = "never emptiable" if at is None else f"emptiable at marking {at}"
            print(f"siphon {names(d)}: {status}")
        for d in minimal_traps(net):
            print(f"trap {names(d)}")
    if args.invariants:
        for vec in p_invariants(net):
            terms = " + ".join(f"{x}*{net.places[i].name}" if x != 1
                               else net.places[i].name
                               for i, x in enumerate(vec) if x)
            total = sum(x * m for x, m in zip(vec, net.initial_marking))
            print(f"invariant: {terms} = {total}")
    if args.report:
        rep = structural_report(net, graph)
        print(f"components={len(rep.components)} "
              f"dead_transitions={[net.transitions[t].name for t in rep.dead_transitions]} "
              f"one_bounded={rep.one_bounded}")
        for comp in rep.components:
            print("  component:", ", ".join(comp))
    return 0


def cmd_automata(args) -> int:
    model, _ = parse_file(args.file)
    automata = to_sda3(model) if args.view == "sda3" else to_ada3(model)
    if args.dot:
        outdir = Path(args.dot)
        outdir.mkdir(parents=True, exist_ok=True)
        files = {}
        for name, text in export_dot(automata).items():
            path = outdir / f"{name}.dot"
            path.write_text(text, encoding="utf-8")
            files[name] = path.name
        (outdir / "index.json").write_text(
            json.dumps({"view": args.view, "automata": files}, indent=2) + "\n",
            encoding="utf-8")
        print(f"wrote {len(files)} automaton diagram(s) to {outdir}")
    if args.json:
        _write(args.json, json.dumps(automata_json(model, args.view), indent=2) + "\n")
    if not args.dot and not args.json:
        for name, text in export_dot(automata).items():
            sys.stdout.write(text)
    return 0


def cmd_xcheck(args) -> int:
    model, _ = parse_file(args.file)
    limits = _limits(args)
    lts = build_lts(model, limits)
    net = to_petri(model)
    mg = marking_graph(net, limits)
    gs = global_graph(model, to_sda3(model), "sda3", limits)
    ga = global_graph(model, to_ada3(model), "ada3", limits)
    checks = [petri_iso(net, lts, mg), automata_iso(gs, lts), automata_iso(ga, lts)]
    counts = (f"LTS={lts.node_count}/{lts.edge_count}, "
              f"PN={len(mg.nodes)}/{len(mg.edges)}, "
              f"SDA3={len(gs.nodes)}/{len(gs.edges)}, "
              f"ADA3={len(ga.nodes)}/{len(ga.edges)}")
    if all(c.ok for c in checks):
        print(f"{counts}, ISO: OK")
        return 0
    reasons = "; ".join(c.mismatch for c in checks if not c.ok)
    print(f"{counts}, ISO: FAIL ({reasons})")
    return 1


def _read_trace(model, path: str) -> list[int]:
    trace = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lstrip("-").isdigit():
            trace.append(int(line))
        else:
            trace.append(model.action_by_label(line))
    return trace


def _print_state(session: Session):
    snap = snapshot(session)
    print(f"[{len(session.history)} step(s)] {snap['configuration']}")
    for tv in snap["transitions"]:
        mark = "*" if tv["enabled"] else " "
        print(f"  {mark} {tv['action']:>3} {tv['automaton']}: "
              f"{tv['from']} -> {tv['to']}  [{tv['label']}]")


def cmd_simulate(args) -> int:
    model, _ = parse_file(args.file)
    session = Session(model, args.view)
    if args.random_walk is not None:
        rng = random.Random(args.seed)
        walked = random_walk(session, args.random_walk, rng)
        for aid in walked:
            print(f"fired {aid}: {model.actions[aid].label}")
        print(f"walked {len(walked)} step(s); final: "
              f"{config_text(model, session.configuration())}")
        return 0
    if args.trace:
        session.load_trace(_read_trace(model, args.trace))
        while session.cursor < len(session.pinned_trace or ()):
            aid = session.pinned_trace[session.cursor]
            session.advance()
            print(f"advanced {aid}: {model.actions[aid].label} -> "
                  f"{config_text(model, session.configuration())}")
        print(f"replayed {len(session.history)} step(s); "
              f"{len(session.enabled_ids())} transition(s) enabled at the end")
        return 0
    print(f"simulating {model.name} ({args.view}); commands: "
          "fire N, undo, reset, list, quit")
    _print_state(session)
    for line in sys.stdin:
        parts = line.split()
        if not parts:
            continue
        cmd = parts[0]
        try:
            if cmd == "quit":
                break
            elif cmd == "fire" and len(parts) == 2:
                result = session.step(int(parts[1]))
                if result.focus:
                    print(f"focus -> {result.focus}")
                _print_state(session)
            elif cmd == "undo":
                session.undo()
                _print_state(session)
            elif cmd == "reset":
                session.reset()
                _print_state(session)
            elif cmd == "list":
                _print_state(session)
            else:
                print(f"unknown command {line.strip()!r}")
        except (TransitionNotEnabled, TraceMismatch, ValueError) as e:
            print(f"error: {e}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.dir, bind=args.bind,
          ui_dir=Path(args.ui) if args.ui else None, limits=_limits(args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="imdskit",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(func=func)
        return sp

    def limit_flags(sp):
        sp.add_argument("--max-nodes", type=int, default=None)
        sp.add_argument("--max-edges", type=int, default=None)

    sp = add("check", cmd_check, help="parse and validate a model file")
    sp.add_argument("file")

    sp = add("convert", cmd_convert, help="re-render a model in the other view")
    sp.add_argument("file")
    sp.add_argument("--to", required=True, choices=["server", "agent"])
    sp.add_argument("-o", "--out")

    sp = add("lts", cmd_lts, help="build the configuration space")
    sp.add_argument("file")
    sp.add_argument("--dot")
    sp.add_argument("--dump")
    limit_flags(sp)

    sp = add("verify", cmd_verify,
             help="deadlock/termination verdicts; exit 1 if a deadlock holds")
    sp.add_argument("file")
    sp.add_argument("--json")
    limit_flags(sp)

    sp = add("petri", cmd_petri, help="equivalent place/transition net")
    sp.add_argument("file")
    sp.add_argument("--andl")
    sp.add_argument("--dot")
    sp.add_argument("--siphons", action="store_true")
    sp.add_argument("--invariants", action="store_true")
    sp.add_argument("--report", action="store_true")
    limit_flags(sp)

    sp = add("automata", cmd_automata, help="derive distributed automata")
    sp.add_argument("file")
    sp.add_argument("--view", required=True, choices=["sda3", "ada3"])
    sp.add_argument("--dot", metavar="OUTDIR")
    sp.add_argument("--json")

    sp = add("xcheck", cmd_xcheck,
             help="assert the three-way equivalence of all representations")
    sp.add_argument("file")
    limit_flags(sp)

    sp = add("simulate", cmd_simulate, help="terminal stepper over automata")
    sp.add_argument("file")
    sp.add_argument("--view", required=True, choices=["sda3", "ada3"])
    sp.add_argument("--trace")
    sp.add_argument("--random-walk", type=int, default=None, metavar="N")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("serve", cmd_serve, help="run the HTTP service for the UI")
    sp.add_argument("dir")
    sp.add_argument("--bind", default="127.0.0.1:8000")
    sp.add_argument("--ui", default=None,
                    help="static UI bundle directory (default: auto-detect)")
    limit_flags(sp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except LimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
