"""Recurrence entanglement distillation with noisy gates and idle decoherence.

Pairs are two-qubit states targeting Phi+ in (node A, node B) ordering.
A DEJMPS round acts on the four-qubit register (A1, B1, A2, B2): pair 1 is
kept, pair 2 is measured.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import densmat as dm


@dataclass(frozen=True)
class NoiseParams:
    T1: float = 1e-3
    T2: float = 1e-3
    local_gate_time: float = 100e-9
    depolarizing_prob: float = 1e-4
    purification_step_time: float = 1e-6

    def __post_init__(self):
        times = (self.T1, self.T2, self.local_gate_time, self.purification_step_time)
        if any(t <= 0 for t in times):
            raise ValueError("all noise times must be positive")
        if self.T2 > 2 * self.T1:
            raise ValueError(f"T2={self.T2} exceeds 2*T1={2 * self.T1}")
        if not 0 <= self.depolarizing_prob <= 1:
            raise ValueError("depolarizing_prob must lie in [0, 1]")

    @property
    def t_star(self) -> float:
        return self.T1 * self.T2 / (self.T1 + self.T2)


@dataclass(frozen=True)
class DistillationConfig:
    rounds: int
    raw_pair_time: float
    noise: NoiseParams = field(default_factory=NoiseParams)
    ideal_memory: bool = False

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.raw_pair_time <= 0:
            raise ValueError("raw_pair_time must be positive")


@dataclass(frozen=True, eq=False)
class DistillationResult:
    state: dm.DensityMatrix = field(repr=False)
    total_time: float
    success_prob: float
    per_round_p: tuple[float, ...]
    fidelities: tuple[float, ...] = ()
    times: tuple[float, ...] = ()

    @property
    def fidelity(self) -> float:
        return dm.bell_fidelity(self.state, "phi+")

    @property
    def average_time(self) -> float:
        """Mean time per delivered pair when failed trees are regenerated."""
        return self.total_time / self.success_prob

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rounds", "fidelity", "infidelity", "t_n_seconds", "P_n"])
        for n, (f, t) in enumerate(zip(self.fidelities, self.times)):
            P = single_shot_success(self.per_round_p[:n])
            w.writerow([n, repr(f), repr(1 - f), repr(t), repr(P)])
        return buf.getvalue()


def bbpssw_update(F: float) -> float:
    """Fidelity after one BBPSSW round on a Werner pair of fidelity F."""
    if not 0.0 <= F <= 1.0:
        raise ValueError("fidelity must lie in [0, 1]")
    G = 1.0 - F
    num = F * F + G * G / 9.0
    den = F * F + 2.0 * F * G / 3.0 + 5.0 * G * G / 9.0
    return num / den


def psi_to_phi(rho: dm.DensityMatrix) -> dm.DensityMatrix:
    """Local X on node B: relabels a Psi+ pair as a Phi+ pair."""
    return dm.apply_unitary(rho, dm.PAULI["X"], (1,))


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def decohere(rho: dm.DensityMatrix, t: float, noise: NoiseParams, qubits=None) -> dm.DensityMatrix:
    if t <= 0:
        return rho
    ch = dm.relaxation_dephasing_channel(t, noise.T1, noise.T2)
    for q in range(len(rho.dims)) if qubits is None else qubits:
        rho = dm.apply_channel(rho, ch, (q,))
    return rho


def dejmps_round(
    pair1: dm.DensityMatrix,
    pair2: dm.DensityMatrix,
    noise: NoiseParams | None = None,
    step_time: float | None = None,
    *,
    cnot_error: float | None = None,
    ideal_memory: bool = False,
) -> tuple[dm.DensityMatrix, float]:
    """One DEJMPS purification step; returns (kept pair, success probability).

    ``cnot_error`` overrides the depolarizing probability of the two
    bilateral CNOTs. ``step_time`` (default: the noise model's purification
    step time) is the decoherence window applied to the kept pair.
    """
    noise = noise or NoiseParams()
    p = noise.depolarizing_prob if cnot_error is None else cnot_error
    rho = dm.tensor_product(pair1, pair2)  # (A1, B1, A2, B2)
    for q, sign in ((0, 1), (1, -1), (2, 1), (3, -1)):
        rho = dm.apply_unitary(rho, rx(sign * math.pi / 2), (q,))
    dep = dm.depolarizing_channel(p, 2) if p > 0 else None
    for control, target in ((0, 2), (1, 3)):
        rho = dm.apply_unitary(rho, CNOT, (control, target))
        if dep is not None:
            rho = dm.apply_channel(rho, dep, (control, target))
    t = rho.data.reshape((2,) * 8)
    kept = t[:, :, 0, 0, :, :, 0, 0] + t[:, :, 1, 1, :, :, 1, 1]
    kept = kept.reshape(4, 4)
    p_success = float(np.real(np.trace(kept)))
    out = dm.DensityMatrix.from_array(kept / p_success)
    if not ideal_memory:
        out = decohere(out, noise.purification_step_time if step_time is None else step_time, noise)
    return out, p_success


def recurrence_times(rounds: int, tau: float, t_p: float) -> list[float]:
    """t_0 = tau, t_n = 2^(n-1) tau + t_(n-1) + t_p."""
    times = [tau]
    for n in range(1, rounds + 1):
        times.append(2 ** (n - 1) * tau + times[-1] + t_p)
    return times


def single_shot_success(per_round_p) -> float:
    """P_n = prod_j p_j^(2^(j-1)), j counted from 1."""
    out = 1.0
    for j, p in enumerate(per_round_p, start=1):
        if not 0 < p <= 1:
            raise ValueError(f"round success probability {p} outside (0, 1]")
        out *= p ** (2 ** (j - 1))
    return out


def nested_distillation(rho_raw: dm.DensityMatrix, config: DistillationConfig) -> DistillationResult:
    noise = config.noise
    tau = config.raw_pair_time
    times = recurrence_times(config.rounds, tau, noise.purification_step_time)
    rho = rho_raw
    fids = [dm.bell_fidelity(rho, "phi+")]
    ps = []
    for n in range(1, config.rounds + 1):
        waiting = rho if config.ideal_memory else decohere(rho, 2 ** (n - 1) * tau, noise)
        rho, p = dejmps_round(waiting, rho, noise, ideal_memory=config.ideal_memory)
        ps.append(p)
        fids.append(dm.bell_fidelity(rho, "phi+"))
    return DistillationResult(
        state=rho,
        total_time=times[-1],
        success_prob=single_shot_success(ps),
        per_round_p=tuple(ps),
        fidelities=tuple(fids),
        times=tuple(times),
    )


def fidelity_gain_study(f0_grid, cnot_errors, noise: NoiseParams | None = None) -> dict:
    """One-round fidelity gain on Werner inputs.

    Returns ``{"ideal": [...], p_cnot: [...]}``; the ideal curve has no gate
    error and no decoherence, the others include decoherence over one
    purification step.
    """
    noise = noise or NoiseParams()
    table = {"ideal": []}
    for p in cnot_errors:
        table[p] = []
    for f0 in f0_grid:
        w = dm.werner_state(f0, "phi+")
        out, _ = dejmps_round(w, w, noise, cnot_error=0.0, ideal_memory=True)
        table["ideal"].append(dm.bell_fidelity(out, "phi+") - f0)
        for p in cnot_errors:
            out, _ = dejmps_round(w, w, noise, cnot_error=p)
            table[p].append(dm.bell_fidelity(out, "phi+") - f0)
    return table
