"""Noisy density-matrix execution of routed circuits on the two-node device.

Timing: local single-qubit gates last one local gate time, local two-qubit
gates one local gate time per CX of their basis lowering. An internode gate
is a barrier that holds the whole device for ``k * T_LL`` (k link uses), so
every live qubit idles through it. By default gates run as early as
possible except the opening single-qubit gates of each qubit, which wait
until the qubit is needed; until then it stays in |0>, which relaxation and
dephasing leave unchanged.

Noise: each local gate is followed by depolarizing noise on its qubits
(compounded over its CX count for two-qubit gates); an internode gate is an
ideal unitary followed by the two-qubit depolarizing channel whose process
fidelity is F_LL per link use. Idle decoherence accumulates lazily per qubit
and is folded into the next gate on that qubit; this is exact because the
relaxation channel forms a semigroup in time.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .. import densmat as dm
from ..distill import NoiseParams
from ..gate import depolarizing_for_process_fidelity
from .circuits import Circuit


class LinkUnavailableError(RuntimeError):
    """A circuit uses the internode edge but no link was supplied."""


@dataclass(frozen=True)
class LinkSpec:
    """Operating point of the internode gate: duration and process fidelity."""

    gate_time: float
    process_fidelity: float

    def __post_init__(self):
        if self.gate_time < 0:
            raise ValueError("link gate time must be non-negative")
        if not 0 <= self.process_fidelity <= 1:
            raise ValueError("link process fidelity must lie in [0, 1]")


IDEAL_LINK = LinkSpec(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class ExecutionResult:
    fidelity: float
    success_prob: float
    score: float
    duration: float
    n_link_uses: int
    probabilities: np.ndarray = field(repr=False)


def _superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


def _tensor_superops(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """Liouville matrix of A (x) B on (a, b) from single-qubit Liouville matrices."""
    t = np.kron(sa, sb).reshape((2,) * 8)
    return t.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)


@functools.lru_cache(maxsize=4096)
def _idle_superop(t: float, T1: float, T2: float) -> np.ndarray:
    if t <= 0:
        return np.eye(4, dtype=complex)
    return dm.relaxation_dephasing_channel(t, T1, T2).superoperator()


@functools.lru_cache(maxsize=256)
def _depol_superop(p: float, n_qubits: int) -> np.ndarray:
    return dm.depolarizing_channel(p, n_qubits).superoperator()


def compact(circuit: Circuit) -> tuple[Circuit, list[int]]:
    """Restrict a circuit to the physical qubits it touches; returns (circuit, kept qubits)."""
    used = sorted({q for g in circuit.gates for q in g.qubits} | set(circuit.layout))
    index = {q: i for i, q in enumerate(used)}
    out = Circuit(len(used), metadata=dict(circuit.metadata))
    out.gates = [g.remapped(tuple(index[q] for q in g.qubits), g.internode) for g in circuit.gates]
    out.final_layout = tuple(index[q] for q in circuit.layout)
    return out, used


def ideal_statevector(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    psi = np.zeros((2,) * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for g in circuit.gates:
        k = g.arity
        u = g.unitary().reshape((2,) * (2 * k))
        psi = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(g.qubits)))
        psi = np.moveaxis(psi, list(range(k)), list(g.qubits))
    return psi.reshape(-1)


def measured_qubits(circuit: Circuit) -> list[int]:
    """Physical qubits read out by the benchmark's score."""
    layout = list(circuit.layout)
    if circuit.metadata.get("name") == "bv":
        return layout[: len(circuit.metadata["secret"])]
    return layout[: circuit.metadata.get("logical_qubits", circuit.n_qubits)]


def marginal(probs: np.ndarray, n: int, keep) -> np.ndarray:
    """Distribution of ``keep`` (in that bit order, first = most significant)."""
    t = probs.reshape((2,) * n)
    drop = tuple(q for q in range(n) if q not in keep)
    t = t.sum(axis=drop)
    remaining = [q for q in range(n) if q in keep]
    t = np.transpose(t, [remaining.index(q) for q in keep])
    return t.reshape(-1)


def hellinger_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None))) ** 2)


def gate_durations(circuit: Circuit, noise: NoiseParams | None, link: LinkSpec | None) -> list[float]:
    out = []
    t_local = noise.local_gate_time if noise is not None else 0.0
    for g in circuit.gates:
        k = max(g.cx_count(), 1)
        if g.internode:
            if link is None:
                raise LinkUnavailableError("circuit needs the internode link but none was given")
            out.append(k * link.gate_time)
        else:
            out.append(k * t_local)
    return out


def schedule(circuit: Circuit, durations, policy: str = "lazy") -> list[float]:
    """Gate start times; internode gates hold every qubit for their duration.

    ``asap`` starts every gate as early as possible, ``alap`` as late as
    possible. ``lazy`` is ``asap`` except that the single-qubit gates opening
    a qubit's history are delayed to just before its first multi-qubit gate,
    so the qubit leaves |0> only when it is needed.
    """
    n = circuit.n_qubits
    free = [0.0] * n
    starts = []
    for g, d in zip(circuit.gates, durations):
        span = range(n) if g.internode else g.qubits
        t0 = max(free[q] for q in span)
        starts.append(t0)
        for q in span:
            free[q] = t0 + d
    if policy == "asap":
        return starts
    if policy == "lazy":
        first = {}
        for i, g in enumerate(circuit.gates):
            for q in g.qubits:
                first.setdefault(q, [])
                if first[q] is not None and g.arity == 1:
                    first[q].append(i)
                elif first[q] is not None:
                    t = starts[i]
                    for j in reversed(first[q]):
                        t -= durations[j]
                        starts[j] = t
                    first[q] = None
        return starts
    if policy != "alap":
        raise ValueError(f"unknown scheduling policy {policy!r}")
    end = max(free) if n else 0.0
    avail = [end] * n
    late = [0.0] * len(starts)
    for i in reversed(range(len(circuit.gates))):
        g = circuit.gates[i]
        span = range(n) if g.internode else g.qubits
        t0 = min(avail[q] for q in span) - durations[i]
        late[i] = t0
        for q in span:
            avail[q] = t0
    return late


class _Device:
    def __init__(self, n: int, noise: NoiseParams | None, link: LinkSpec | None):
        self.n = n
        self.dims = (2,) * n
        self.noise = noise
        self.data = np.zeros((2**n, 2**n), dtype=complex)
        self.data[0, 0] = 1.0
        self.decohered_to = [None] * n
        self.link_p = None if link is None else depolarizing_for_process_fidelity(link.process_fidelity)

    def _idle(self, q: int, until: float) -> np.ndarray:
        # a qubit still in |0> is a fixed point of relaxation and dephasing
        since = self.decohered_to[q]
        self.decohered_to[q] = until
        if since is None:
            return np.eye(4, dtype=complex)
        return _idle_superop(until - since, self.noise.T1, self.noise.T2)

    def _apply(self, superop: np.ndarray, qubits) -> None:
        self.data = dm.apply_superop_data(self.data, self.dims, superop, qubits)

    def gate(self, g, start: float) -> None:
        qs = g.qubits
        s = _superop(g.unitary())
        k = max(g.cx_count(), 1)
        if g.internode:
            noise_p = 1.0 - (1.0 - self.link_p) ** k
        elif self.noise is not None:
            noise_p = 1.0 - (1.0 - self.noise.depolarizing_prob) ** k
        else:
            noise_p = 0.0
        if self.noise is not None:
            idle = [self._idle(q, start) for q in qs]
            pre = idle[0] if len(qs) == 1 else _tensor_superops(idle[0], idle[1])
            s = s @ pre
        if noise_p > 0:
            s = _depol_superop(noise_p, len(qs)) @ s
        self._apply(s, qs)

    def settle(self, until) -> None:
        """Apply outstanding idle decoherence up to ``until[q]`` for every qubit."""
        if self.noise is None:
            return
        for q in range(self.n):
            if self.decohered_to[q] is None:
                continue
            s = self._idle(q, until[q])
            if not np.allclose(s, np.eye(4)):
                self._apply(s, (q,))


def execute(
    circuit: Circuit,
    noise: NoiseParams | None = None,
    link=None,
    *,
    policy: str = "lazy",
    measure_when_done: bool = True,
) -> ExecutionResult:
    """Run a routed circuit; ``noise=None`` switches off all local noise.

    ``link`` is anything with ``gate_time`` and ``process_fidelity``
    attributes (a :class:`LinkSpec` or an internode gate result), or ``None``
    for a device without a usable link. With ``measure_when_done`` each qubit
    is read out right after its last gate and stops decohering; otherwise all
    qubits wait for the end of the circuit.
    """
    circ, _ = compact(circuit)
    n = circ.n_qubits
    spec = None if link is None else LinkSpec(link.gate_time, link.process_fidelity)
    durations = gate_durations(circ, noise, spec)
    starts = schedule(circ, durations, policy)
    dev = _Device(n, noise, spec)
    last_end = [0.0] * n
    for g, t0, d in zip(circ.gates, starts, durations):
        dev.gate(g, t0)
        for q in g.qubits:
            last_end[q] = t0 + d
    duration = max((t + d for t, d in zip(starts, durations)), default=0.0)
    dev.settle(last_end if measure_when_done else [duration] * n)
    psi = ideal_statevector(circ)
    fidelity = float(np.real(np.vdot(psi, dev.data @ psi)))
    probs = np.clip(np.real(np.diag(dev.data)), 0.0, None)
    keep = measured_qubits(circ)
    p_noisy = marginal(probs, n, keep)
    p_ideal = marginal(np.abs(psi) ** 2, n, keep)
    success = hellinger_fidelity(p_noisy, p_ideal)
    score = success if circ.metadata.get("score") == "success" else fidelity
    n_link = sum(max(g.cx_count(), 1) for g in circ.gates if g.internode)
    return ExecutionResult(fidelity, success, score, duration, n_link, p_noisy)


def simulate_noisy(circuit: Circuit, noise: NoiseParams | None = None, link=None) -> float:
    """Benchmark score of a routed circuit (state fidelity, or success probability for BV)."""
    return execute(circuit, noise, link).score
