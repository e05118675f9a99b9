"""Quantum volume by the heavy-output test on the two-node device."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..distill import NoiseParams
from .circuits import qv_model_circuit
from .executor import LinkUnavailableError, compact, execute, ideal_statevector, marginal
from .topology import NodeTopology, route

HEAVY_THRESHOLD = 2.0 / 3.0


@dataclass(frozen=True)
class WidthResult:
    width: int
    mean_hop: float
    sigma: float
    passed: bool
    hops: tuple[float, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class QVResult:
    quantum_volume: int
    widths: tuple[WidthResult, ...]

    @property
    def log2(self) -> int:
        return int(math.log2(self.quantum_volume))

    def record(self) -> dict:
        return {
            "quantum_volume": self.quantum_volume,
            "widths": [
                {"width": w.width, "mean_hop": w.mean_hop, "sigma": w.sigma, "passed": w.passed}
                for w in self.widths
            ],
        }


def qv_layout(width: int, topology: NodeTopology) -> list[int]:
    """Fill node A first, then node B outward from its link qubit."""
    a_side = [q for q in topology.ring_a]
    a_link, b_link = topology.link if topology.link[0] in topology.ring_a else topology.link[::-1]
    # rotate ring A so its link qubit is last, ring B so its link qubit is first
    ia = a_side.index(a_link)
    a_order = a_side[ia + 1 :] + a_side[: ia + 1]
    b_side = list(topology.ring_b)
    ib = b_side.index(b_link)
    b_order = b_side[ib:] + b_side[:ib]
    return (a_order + b_order)[:width]


def heavy_output_probability(
    width: int,
    rng: np.random.Generator,
    noise: NoiseParams | None,
    link,
    topology: NodeTopology | None = None,
) -> float:
    """Heavy-output probability of one random model circuit; 0 if it cannot run."""
    topology = topology or NodeTopology()
    logical = qv_model_circuit(width, rng)
    routed, _ = route(logical, topology, initial_layout=qv_layout(width, topology))
    circ, _ = compact(routed)
    psi = ideal_statevector(circ)
    keep = list(circ.layout[:width])
    p_ideal = marginal(np.abs(psi) ** 2, circ.n_qubits, keep)
    heavy = p_ideal > np.median(p_ideal)
    if any(g.internode for g in circ.gates) and link is None:
        return 0.0
    noiseless_link = link is None or link.process_fidelity >= 1.0
    if noise is None and noiseless_link:
        p_noisy = p_ideal
    else:
        try:
            p_noisy = execute(routed, noise, link).probabilities
        except LinkUnavailableError:
            return 0.0
    return float(p_noisy[heavy].sum())


def quantum_volume(
    noise: NoiseParams | None,
    link,
    trials: int = 100,
    *,
    seed: int = 0,
    max_width: int = 10,
    topology: NodeTopology | None = None,
    workers: int = 1,
) -> QVResult:
    """Largest 2^m whose model circuits pass the heavy-output test, scanning m upward.

    A width passes when the mean heavy-output probability h over ``trials``
    circuits satisfies h - 2 sqrt(h (1 - h) / trials) > 2/3. The scan stops
    at the first failing width. ``link=None`` removes the internode link.
    Each (width, trial) pair draws from its own child of ``seed``.
    """
    if trials < 100:
        raise ValueError("the heavy-output test needs at least 100 trials")
    topology = topology or NodeTopology()
    root = np.random.SeedSequence(seed)
    widths = []
    best = 1
    for m in range(1, max_width + 1):
        children = np.random.SeedSequence(root.entropy, spawn_key=(m,)).spawn(trials)

        def one(ss):
            return heavy_output_probability(m, np.random.default_rng(ss), noise, link, topology)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                hops = list(pool.map(one, children))
        else:
            hops = [one(ss) for ss in children]
        h = float(np.mean(hops))
        sigma = math.sqrt(max(h * (1 - h), 0.0) / trials)
        passed = h - 2 * sigma > HEAVY_THRESHOLD
        widths.append(WidthResult(m, h, sigma, passed, tuple(hops)))
        if not passed:
            break
        best = 2**m
    return QVResult(best, tuple(widths))
