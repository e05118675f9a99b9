"""Quantum volume of the two-node device with no link, the raw link and an ideal link.

Usage: python scripts/qv_study.py [--trials 100] [--seed 0] [--max-width 10] [--threads 1]

Noisy runs use full density matrices, so their cost grows by about 16x per extra width.
"""

import argparse

from mnqc.bench.executor import IDEAL_LINK, LinkSpec
from mnqc.bench.qv import quantum_volume
from mnqc.distill import NoiseParams
from mnqc.pipeline import link_operating_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-width", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    noise = NoiseParams()
    op = link_operating_point("no1", rounds=0)
    cases = {
        "no link": (noise, None),
        f"raw link (T={op.gate_time:.2e}, F={op.process_fidelity:.3f})": (noise, LinkSpec(op.gate_time, op.process_fidelity)),
        "ideal link, noisy locals": (noise, IDEAL_LINK),
        "noiseless device": (None, IDEAL_LINK),
    }
    for name, (nz, link) in cases.items():
        res = quantum_volume(nz, link, args.trials, seed=args.seed, max_width=args.max_width, workers=args.threads)
        hops = ", ".join(f"{w.width}:{w.mean_hop:.3f}" for w in res.widths)
        print(f"{name}: QV = {res.quantum_volume}  [{hops}]", flush=True)


if __name__ == "__main__":
    main()
