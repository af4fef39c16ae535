#!/usr/bin/env python3
"""Fuzz the three-way equivalence over randomly generated small models.

Usage: python scripts/random_iso_sweep.py [COUNT] [BASE_SEED]

For each model the configuration space, the reachable-marking graph, and
both global position graphs are built and checked pairwise-isomorphic; a
histogram of state-space sizes is printed at the end.
"""

import random
import sys
from collections import Counter

from imdskit import build_lts
from imdskit.automata import build_and_check_iso, to_ada3, to_sda3
from imdskit.gen import random_model
from imdskit.petri import check_iso_with_lts, to_petri


def main() -> int:
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    base = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    sizes = Counter()
    for seed in range(base, base + count):
        model = random_model(random.Random(seed))
        lts = build_lts(model)
        sizes[min(lts.node_count, 10) if lts.node_count < 10 else
              10 * (lts.node_count // 10)] += 1
        checks = [
            ("petri", check_iso_with_lts(to_petri(model), lts)),
            ("sda3", build_and_check_iso(model, to_sda3(model), "sda3", lts)),
            ("ada3", build_and_check_iso(model, to_ada3(model), "ada3", lts)),
        ]
        for kind, result in checks:
            if not result.ok:
                print(f"seed {seed}: {kind} mismatch: {result.mismatch}")
                return 1
    print(f"{count} models, all three representations isomorphic to the LTS")
    for bucket in sorted(sizes):
        label = f"{bucket}" if bucket < 10 else f"{bucket}+"
        print(f"  nodes {label:>4}: {sizes[bucket]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
