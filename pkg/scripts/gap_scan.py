"""GAP success regions for the benchmarks, with the additive-model boundary.

Usage: python scripts/gap_scan.py [--benchmarks ghz bv] [--n 9] [--threads 1] [--out results]
"""

import argparse
import math
from pathlib import Path

import numpy as np

from mnqc.bench.gap import analytic_boundary, axis_intercepts, gap_scan, is_down_closed
from mnqc.distill import NoiseParams
from mnqc.pipeline import achievable_frontier, pareto_front


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--benchmarks", nargs="+", default=["ghz", "bv", "qft", "adder"])
    ap.add_argument("--n", type=int, default=9, help="grid points per axis")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    noise = NoiseParams()
    times = np.geomspace(1e-8, 1e-3, args.n)
    infid = np.geomspace(1e-4, 0.5, args.n)
    front = pareto_front(achievable_frontier("no1", np.linspace(0.05, 0.5, 10), max_rounds=3))
    for b in args.benchmarks:
        grid = gap_scan(b, times, infid, noise, frontier=front, workers=args.threads)
        (args.out / f"gap_{b}.json").write_text(grid.to_json())
        i_max, t_max = axis_intercepts(grid)
        print(f"{b}: best score {grid.scores.max():.3f}, down-closed={is_down_closed(grid.success)}")
        print(f"  largest passing infidelity at shortest time: {i_max}")
        print(f"  largest passing time at lowest infidelity:   {t_max}")
        floor = 1.0 - grid.scores[0, 0]
        if grid.success.any() and floor < 0.1:
            bnd = analytic_boundary(0.9, 2.5, noise.t_star, floor=floor, link_weight=14 / 15)
            print(
                f"  additive model: I* = {math.exp(bnd.xi_i_asymptote):.3e}, "
                f"T* = {math.exp(bnd.xi_t_asymptote):.3e} s"
            )


if __name__ == "__main__":
    main()
