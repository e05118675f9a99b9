"""Teleported internode CX and its reduction to an effective link channel.

Register order for the teleportation circuit: (c, t, a, b) with control c
and EP half a on node A, target t and EP half b on node B. The EP is a
Phi+ pair on (a, b).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import densmat as dm
from .distill import CNOT, NoiseParams

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = H @ P0 @ H
MINUS = H @ P1 @ H

# Z measurement of a, then X^m on b (Kraus on (a, b))
_MEASURE_A = dm.QuantumChannel((2, 2), (np.kron(P0, dm.PAULI["I"]), np.kron(P1, dm.PAULI["X"])))
# X measurement of b, then Z^m on c (Kraus on (c, b))
_MEASURE_B = dm.QuantumChannel((2, 2), (np.kron(dm.PAULI["I"], PLUS), np.kron(dm.PAULI["Z"], MINUS)))


@dataclass(frozen=True, eq=False)
class InternodeGateResult:
    gate_time: float
    process_fidelity: float
    effective_channel: dm.QuantumChannel = field(repr=False)
    local_time: float = 0.0

    def record(self, **extra) -> dict:
        rec = dict(extra)
        rec.update(t_ll_seconds=self.gate_time, f_ll=self.process_fidelity)
        return rec


def _choi_to_channel(choi: np.ndarray, d: int, cutoff: float = 1e-14) -> dm.QuantumChannel:
    evals, evecs = np.linalg.eigh((choi + choi.conj().T) / 2)
    kraus = []
    for lam, v in zip(evals, evecs.T):
        if lam > cutoff:
            kraus.append(math.sqrt(lam * d) * v.reshape(d, d).T)
    return dm.QuantumChannel((2, 2), tuple(kraus))


def teleportation_choi(
    ep_state: dm.DensityMatrix,
    noise: NoiseParams,
    measurement_time: float = 0.0,
) -> np.ndarray:
    """Normalized Choi matrix (reference first) of the teleported CX on (c, t)."""
    # layout (Rc, Rt, c, t, a, b); references maximally entangled with (c, t)
    rho = dm.tensor_product(dm.DensityMatrix.from_ket(_bell_refs()), ep_state)
    dep = dm.depolarizing_channel(noise.depolarizing_prob, 2) if noise.depolarizing_prob > 0 else None
    idle = dm.relaxation_dephasing_channel(noise.local_gate_time, noise.T1, noise.T2)
    meas_idle = (
        dm.relaxation_dephasing_channel(measurement_time, noise.T1, noise.T2) if measurement_time > 0 else None
    )
    physical = (2, 3, 4, 5)
    c, t, a, b = physical

    def gate(state, u, qubits):
        state = dm.apply_unitary(state, u, qubits)
        if dep is not None:
            state = dm.apply_channel(state, dep, qubits)
        for q in physical:
            state = dm.apply_channel(state, idle, (q,))
        return state

    def wait_measure(state):
        if meas_idle is None:
            return state
        for q in physical:
            state = dm.apply_channel(state, meas_idle, (q,))
        return state

    rho = gate(rho, CNOT, (c, a))
    rho = wait_measure(rho)
    rho = dm.apply_channel(rho, _MEASURE_A, (a, b))
    rho = gate(rho, CNOT, (b, t))
    rho = wait_measure(rho)
    rho = dm.apply_channel(rho, _MEASURE_B, (c, b))
    reduced = dm.partial_trace(rho, (0, 1, 2, 3))
    return reduced.data


def _bell_refs() -> np.ndarray:
    """|Phi>_{(Rc,Rt),(c,t)} = sum_i |i>|i> / 2 in (Rc, Rt, c, t) order."""
    return np.eye(4, dtype=complex).ravel() / 2.0


def teleported_cx(
    ep_state: dm.DensityMatrix,
    noise: NoiseParams | None = None,
    *,
    ep_delivery_time: float = 0.0,
    measurement_time: float = 0.0,
) -> InternodeGateResult:
    """Gate-teleported CX from one Phi+ EP, two local CX and two measurements.

    Gate time is the EP delivery time plus the local critical path (two CX
    gates plus any measurement latency); Pauli corrections are free.
    """
    noise = noise or NoiseParams()
    choi = teleportation_choi(ep_state, noise, measurement_time)
    channel = _choi_to_channel(choi, 4)
    fid = dm.process_fidelity(channel, CNOT)
    local = 2 * noise.local_gate_time + 2 * measurement_time
    return InternodeGateResult(
        gate_time=ep_delivery_time + local,
        process_fidelity=fid,
        effective_channel=channel,
        local_time=local,
    )


def depolarizing_for_process_fidelity(f: float, n_qubits: int = 2) -> float:
    """p such that the depolarizing channel (1-p)rho + p I/d has process fidelity f."""
    d2 = 4**n_qubits
    p = (1.0 - f) * d2 / (d2 - 1)
    if not 0 <= p <= 1:
        raise ValueError(f"process fidelity {f} not reachable by a depolarizing channel")
    return p


@dataclass(frozen=True, eq=False)
class LinkChannelBundle:
    gate: dm.QuantumChannel = field(repr=False)
    spectator: dm.QuantumChannel = field(repr=False)
    depolarizing_prob: float
    gate_time: float
    n_spectators: int

    def gate_superop(self) -> np.ndarray:
        return self.gate.superoperator()


def effective_link_channel(
    f_ll: float, t_ll: float, noise: NoiseParams | None = None, n_spectators: int = 8
) -> LinkChannelBundle:
    """Ideal CX followed by depolarizing matched to ``f_ll``; spectators idle for ``t_ll``."""
    noise = noise or NoiseParams()
    if not 0 <= f_ll <= 1:
        raise ValueError("link fidelity must lie in [0, 1]")
    p = depolarizing_for_process_fidelity(f_ll)
    dep = dm.depolarizing_channel(p, 2)
    gate = dm.QuantumChannel.from_unitary(CNOT).then(dep)
    spectator = dm.relaxation_dephasing_channel(t_ll, noise.T1, noise.T2)
    return LinkChannelBundle(gate, spectator, p, t_ll, n_spectators)


def spectator_decay_factor(t: float, noise: NoiseParams) -> float:
    """exp(-t/T1) * exp(-t/T2) = exp(-t/T*)."""
    return math.exp(-t / noise.T1) * math.exp(-t / noise.T2)


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2) + "\n"
