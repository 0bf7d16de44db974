#!/usr/bin/env python3
"""Probe how site-dependent pass weights break the forward/reversed duality.

Runs the duality sweep with a palette of b2 values cycled over a window
(b1 follows as q*b2 with fixed q), prints a census of the failures, the
minimal counterexample, and the one-step column sums that explain the
obstruction: for the mirror reversal to be dual the reversed kernel would
have to transpose the forward one, but the transposed columns do not sum
to 1 once b2 varies by site.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sixv.dynamics import one_particle_kernel
from sixv.model import Params, format_rational, parse_rational
from sixv.verify import SweepSpec, run_sweep

PALETTE = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2))


def cycled_params(lo: int, hi: int, q: Fraction) -> Params:
    sites = tuple(
        (site, PALETTE[(site - lo) % len(PALETTE)]) for site in range(lo, hi + 1)
    )
    return Params(q=q, b2=PALETTE[0], b2_sites=sites)


def transposed_column_sum(params: Params, y: int, depth: int = 12) -> Fraction:
    """Exact sum over all x <= y of the one-particle forward law p(x -> y).

    Below the override window the summands shrink by exactly the default
    pass weight per site, so the infinite left tail is a geometric series.
    """
    floor = min((site for site, _ in params.b2_sites), default=y) - depth
    floor = min(floor, y - depth)
    total = Fraction(0)
    for x in range(floor, y + 1):
        total += one_particle_kernel(x, y, params)
    tail_ratio = params.b2
    total += one_particle_kernel(floor, y, params) * tail_ratio / (1 - tail_ratio)
    return total


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--q", default="1/2", help="fixed asymmetry ratio (rational)")
    parser.add_argument("--window", default="0:5", metavar="LO:HI")
    parser.add_argument("--max-ell", type=int, default=2)
    parser.add_argument("--max-k", type=int, default=2)
    parser.add_argument("--jobs", type=int, default=4)
    args = parser.parse_args()

    lo_text, _, hi_text = args.window.partition(":")
    lo, hi = int(lo_text), int(hi_text)
    q = parse_rational(args.q)
    params = cycled_params(lo, hi, q)

    spec = SweepSpec(
        max_ell=args.max_ell,
        max_k=args.max_k,
        window=(lo, hi),
        t_range=(1,),
        params_list=(params,),
        kinds=("H",),
    )
    result = run_sweep(spec, jobs=args.jobs)
    print("summary:", json.dumps(result.summary()))

    census: dict[tuple[int, int], int] = {}
    for report in result.failures:
        key = (len(report.x), len(report.y))
        census[key] = census.get(key, 0) + 1
    for (ell, k), count in sorted(census.items()):
        print(f"  failures with {ell} particles / {k} dual points: {count}")

    if result.failures:
        witness = min(
            result.failures,
            key=lambda r: (len(r.x) + len(r.y), len(r.x), r.x, r.y),
        )
        print(
            f"minimal counterexample: x={witness.x} y={witness.y} "
            f"forward={format_rational(witness.lhs)} "
            f"reversed={format_rational(witness.rhs)}"
        )

    print("transposed column sums (all exactly 1 in the homogeneous model):")
    for y in range(lo, hi + 1):
        total = transposed_column_sum(params, y)
        marker = "" if total == 1 else "   <- not stochastic"
        print(f"  y={y}: {format_rational(total)}{marker}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
