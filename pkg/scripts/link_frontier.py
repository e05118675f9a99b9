"""Achievable (T_LL, 1 - F_LL) link operating points per converter preset.

Usage: python scripts/link_frontier.py [--presets no1 future] [--rounds 3] [--out results]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from mnqc import m2o
from mnqc.pipeline import achievable_frontier, pareto_front


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--presets", nargs="+", default=["no1", "future"])
    ap.add_argument("--rounds", type=int, default=3)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    pes = np.linspace(0.05, 0.5, 10)
    for name in args.presets:
        try:
            points = achievable_frontier(name, pes, max_rounds=args.rounds)
        except m2o.TruncationError as exc:
            print(f"{name}: skipped ({exc})")
            continue
        front = pareto_front(points)
        path = args.out / f"frontier_{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pe", "rounds", "gate_time", "infidelity", "pareto"])
            for p in points:
                w.writerow([p.pe, p.rounds, p.gate_time, p.infidelity, int(p in front)])
        print(f"{name}: {len(points)} points, {len(front)} on the Pareto front -> {path}")
        for p in front:
            print(f"  pe={p.pe:.2f} rounds={p.rounds}  T_LL={p.gate_time:.3e} s  1-F_LL={p.infidelity:.4f}")


if __name__ == "__main__":
    main()
