"""Link infidelity below which a mitigated quantum link beats circuit knitting.

Usage: python scripts/qcpa_crossover.py [--spectators 0 4 8]
"""

import argparse

import numpy as np

from mnqc.qcpa import crossover_infidelity, gamma_pec, sampling_overhead


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spectators", type=int, nargs="+", default=[0, 4, 8])
    args = ap.parse_args()
    print("log10 circuits for k link gates:")
    for k in (20, 128):
        print(
            f"  k={k:4d}  knit 4^k: {sampling_overhead(4, k):6.2f}  knit 9^k: {sampling_overhead(9, k):6.2f}  "
            f"PEC F=0.9: {sampling_overhead(gamma_pec(4, 0.9), k):6.2f}  "
            f"PEC F=0.975: {sampling_overhead(gamma_pec(4, 0.975), k):6.2f}"
        )
    print("\ncrossover infidelity (upper / lower knitting bound):")
    for n in args.spectators:
        for t in np.geomspace(1e-7, 1e-4, 4):
            up = crossover_infidelity("upper", t, 5e-4, n)
            lo = crossover_infidelity("lower", t, 5e-4, n)
            fmt = lambda c: f"{c.infidelity:.4f}" if c.found else "none"  # noqa: E731
            print(f"  N={n:2d} T_LL={t:.1e} s: {fmt(up)} / {fmt(lo)}")


if __name__ == "__main__":
    main()
