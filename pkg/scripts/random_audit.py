#!/usr/bin/env python3
"""Random plumbing sweep: build presentations and re-audit d^2 = 0.

  python3 scripts/random_audit.py --count 1000 --seed 7 --dims 2,3,4,5,6
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from semifree.algebra import INTEGERS, RATIONALS, integers_mod  # noqa: E402
from semifree.dgcat import audit_d_squared  # noqa: E402
from semifree.plumbing import (  # noqa: E402
    RandomPlumbingConfig,
    build_wrapped,
    random_plumbing,
)

RINGS = {"Z": INTEGERS, "Q": RATIONALS, "Zmod10007": integers_mod(10007)}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--count", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--dims", default="2,3,4,5,6")
    parser.add_argument("--max-vertices", type=int, default=5)
    parser.add_argument("--max-arrows", type=int, default=8)
    args = parser.parse_args()

    import random
    rng = random.Random(args.seed)
    config = RandomPlumbingConfig(
        max_vertices=args.max_vertices,
        max_arrows=args.max_arrows,
        dims=tuple(int(d) for d in args.dims.split(",")))
    started = time.time()
    generators = 0
    for i in range(args.count):
        for name, ring in RINGS.items():
            data = random_plumbing(rng, config, ring)
            cat = build_wrapped(data)
            audit_d_squared(cat)
            generators += len(cat.generators)
    elapsed = time.time() - started
    print(f"audited {args.count} random data x {len(RINGS)} rings "
          f"({generators} generators) in {elapsed:.2f}s: all d^2 = 0")
    return 0


if __name__ == "__main__":
    sys.exit(main())
