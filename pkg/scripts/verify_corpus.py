#!/usr/bin/env python3
"""Run the full pipeline over every model in models/ and print a summary.

Usage: python scripts/verify_corpus.py [DIR]
"""

import sys
from pathlib import Path

from imdskit import build_lts, parse_file
from imdskit.analysis import analyze
from imdskit.automata import (build_and_check_iso, to_ada3, to_sda3)
from imdskit.lts import strongly_connected
from imdskit.petri import check_iso_with_lts, to_petri


def main() -> int:
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("models")
    rows = []
    for path in sorted(target.glob("*.imds")):
        model, view = parse_file(path)
        lts = build_lts(model)
        report = analyze(lts)
        iso = (check_iso_with_lts(to_petri(model), lts).ok
               and build_and_check_iso(model, to_sda3(model), "sda3", lts).ok
               and build_and_check_iso(model, to_ada3(model), "ada3", lts).ok)
        rows.append((path.stem, view, lts.node_count, lts.edge_count,
                     strongly_connected(lts), report.any_deadlock, iso))
    print(f"{'model':<16} {'view':<7} {'nodes':>5} {'edges':>5} "
          f"{'cyclic':>6} {'deadlock':>8} {'iso':>4}")
    for name, view, n, e, sc, dl, iso in rows:
        print(f"{name:<16} {view:<7} {n:>5} {e:>5} "
              f"{str(sc):>6} {str(dl):>8} {('OK' if iso else 'FAIL'):>4}")
    return 0 if all(r[-1] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
