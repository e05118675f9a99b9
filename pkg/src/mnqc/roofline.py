"""Quantum roofline: local-vs-link throughput bounds for a two-node machine.

Rates are in gates per local-gate time. A circuit with computation-to-
communication ratio CCR on a machine with ratio MCCR = t_link / t_local is
communication bound when CCR < MCCR.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .distill import recurrence_times


@dataclass(frozen=True)
class CircuitStats:
    depth: int
    n_1q: int
    n_2q: int
    n_comm: int
    gate_density: float

    def __post_init__(self):
        if min(self.depth, self.n_1q, self.n_2q, self.n_comm) < 0:
            raise ValueError("gate counts must be non-negative")
        if self.n_comm > self.n_2q:
            raise ValueError(f"n_comm={self.n_comm} exceeds n_2q={self.n_2q}")
        if not 0 < self.gate_density <= 1:
            raise ValueError(f"gate density {self.gate_density} outside (0, 1]")


# Post-transpilation statistics reported for the reference transpiler.
REFERENCE_STATS = {
    "ghz": CircuitStats(13, 3, 8, 1, 0.162),
    "bv": CircuitStats(26, 57, 24, 7, 0.458),
    "qft": CircuitStats(633, 323, 439, 164, 0.242),
    "adder": CircuitStats(219, 101, 177, 55, 0.258),
}
REFERENCE_CCR = {"ghz": 9.5, "bv": 7.5, "qft": 3.662, "adder": 4.136}


@dataclass(frozen=True)
class RooflineMachine:
    n_qubits: int = 10
    t_local: float = 100e-9
    t_link: float = 1.041e-6
    n_links: int = 1

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_links < 1:
            raise ValueError("n_qubits and n_links must be positive")
        if self.t_local <= 0:
            raise ValueError("t_local must be positive")
        if self.t_link < self.t_local:
            raise ValueError(f"t_link={self.t_link} is shorter than t_local={self.t_local}")


def compute_ccr(stats: CircuitStats) -> float:
    """(local gates) / (internode gates); ``math.inf`` when the circuit never uses the link."""
    if stats.n_comm == 0:
        return math.inf
    return (stats.n_1q + stats.n_2q - stats.n_comm) / stats.n_comm


def compute_mccr(machine: RooflineMachine) -> float:
    return machine.t_link / machine.t_local


def peak_rate(machine: RooflineMachine) -> float:
    return float(machine.n_qubits)


def communication_roof(ccr, machine: RooflineMachine):
    """Sloped bound: reaches the peak rate at CCR = MCCR / n_links."""
    return machine.n_qubits * machine.n_links * np.asarray(ccr, dtype=float) / compute_mccr(machine)


@dataclass(frozen=True)
class BoundReport:
    ccr: float
    mccr: float
    density: float
    bound: str
    delivered_rate: float
    ridge_point: float

    def to_json(self) -> str:
        d = asdict(self)
        d["ccr"] = "inf" if math.isinf(self.ccr) else self.ccr
        return json.dumps(d, sort_keys=True, indent=2) + "\n"


def classify_bound(
    stats: CircuitStats, machine: RooflineMachine, ccr: float | None = None, rtol: float = 1e-12
) -> BoundReport:
    """Locate a circuit under the roofline.

    ``ccr`` overrides the value computed from ``stats`` (for externally
    reported ratios). Equality with the ridge point within ``rtol`` is
    labelled ``"balanced"``.
    """
    ccr = compute_ccr(stats) if ccr is None else float(ccr)
    mccr = compute_mccr(machine)
    ridge = mccr / machine.n_links
    if math.isclose(ccr, ridge, rel_tol=rtol):
        kind = "balanced"
    elif ccr < ridge:
        kind = "communication"
    else:
        kind = "computation"
    cap = machine.n_qubits * stats.gate_density
    comm = math.inf if math.isinf(ccr) else float(communication_roof(ccr, machine))
    delivered = min(cap, comm, float(machine.n_qubits))
    return BoundReport(ccr, mccr, stats.gate_density, kind, delivered, ridge)


TABULATED_MULTIPLIERS = (1.0, 2.0, 3.0)


def distillation_shift(
    machine: RooflineMachine,
    rounds: int,
    mode: str = "tabulated",
    *,
    raw_pair_time: float | None = None,
    purification_step_time: float = 1e-6,
) -> RooflineMachine:
    """Machine after ``rounds`` of nested distillation on the link.

    ``tabulated`` scales t_link by the tabulated multipliers (1, 2, 3);
    ``recurrence`` replaces the EP-delivery part of t_link (``raw_pair_time``,
    default t_link - 2 t_local) by the nested-recurrence time t_n.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    if mode == "tabulated":
        if rounds >= len(TABULATED_MULTIPLIERS):
            raise ValueError(f"tabulated mode covers at most {len(TABULATED_MULTIPLIERS) - 1} rounds")
        return replace(machine, t_link=machine.t_link * TABULATED_MULTIPLIERS[rounds])
    if mode == "recurrence":
        local = 2 * machine.t_local
        tau = machine.t_link - local if raw_pair_time is None else raw_pair_time
        if tau <= 0:
            raise ValueError("raw pair time must be positive")
        t_n = recurrence_times(rounds, tau, purification_step_time)[-1]
        return replace(machine, t_link=machine.t_link - tau + t_n)
    raise ValueError(f"unknown mode {mode!r}; expected 'tabulated' or 'recurrence'")


def roofline_polyline(machine: RooflineMachine, ccr_min: float = 0.5, ccr_max: float = 1e3, n: int = 64):
    """(ccr, rate) samples of min(peak, communication roof) on a log grid."""
    ccr = np.geomspace(ccr_min, ccr_max, n)
    rate = np.minimum(communication_roof(ccr, machine), peak_rate(machine))
    return ccr, rate


def polyline_csv(machine: RooflineMachine, **kw) -> str:
    ccr, rate = roofline_polyline(machine, **kw)
    lines = ["ccr,rate"] + [f"{c!r},{r!r}" for c, r in zip(ccr.tolist(), rate.tolist())]
    return "\n".join(lines) + "\n"
