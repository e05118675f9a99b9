"""QPE error on the two-node device versus internode gate time.

Usage: python scripts/dqpe_link_error.py [--ancillas 9]
"""

import argparse

import numpy as np

from mnqc.dqpe import REFERENCE_PHASE, qpe_link_error_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ancillas", type=int, default=9)
    args = ap.parse_args()
    times = np.geomspace(1e-7, 1e-4, 7)
    curve = qpe_link_error_curve([1e-4, 1e-3], times, n_ancilla=args.ancillas, phase=float(REFERENCE_PHASE))
    print(f"single-node 4-ancilla baseline error: {curve.baseline_error:.4f}")
    print(curve.to_csv(), end="")


if __name__ == "__main__":
    main()
