"""Roofline placement of the benchmarks, before and after link distillation.

Usage: python scripts/roofline_study.py [--t-link 1.041e-6]
"""

import argparse

from mnqc.bench.circuits import build_benchmark, lower_to_cx
from mnqc.bench.topology import NodeTopology, route
from mnqc.roofline import (
    REFERENCE_CCR,
    REFERENCE_STATS,
    RooflineMachine,
    classify_bound,
    compute_mccr,
    distillation_shift,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-link", type=float, default=1.041e-6)
    args = ap.parse_args()
    base = RooflineMachine(t_link=args.t_link)
    for mode in ("tabulated", "recurrence"):
        for rounds in range(3):
            m = distillation_shift(base, rounds, mode)
            print(f"\n{mode} rounds={rounds}: MCCR = {compute_mccr(m):.2f}")
            for name, stats in REFERENCE_STATS.items():
                ref = classify_bound(stats, m, REFERENCE_CCR[name])
                _, routed = route(lower_to_cx(build_benchmark(name)), NodeTopology())
                own = classify_bound(routed, m)
                print(
                    f"  {name:6s} reference ccr={ref.ccr:6.2f} {ref.bound:13s} rate={ref.delivered_rate:.2f} | "
                    f"routed ccr={own.ccr:6.2f} {own.bound:13s} rate={own.delivered_rate:.2f}"
                )


if __name__ == "__main__":
    main()
