"""Distributed quantum phase estimation: small simulations and depth cost models.

Phases are in units of 2 pi: an eigenphase phi means U|u> = exp(2 pi i phi)|u>.
The kickback likelihood takes angles in radians, matching its closed form
cos^2(p (theta - xi) / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .bench.circuits import Circuit, lower_to_cx
from .bench.executor import LinkSpec, execute, ideal_statevector, marginal
from .bench.topology import NodeTopology, route
from .distill import NoiseParams

REFERENCE_PHASE = Fraction(337, 512)
ESTIMATORS = ("mode", "expected_abs", "min_grid")


def qpe_outcome_distribution(phase: float, n_ancilla: int) -> np.ndarray:
    """Textbook QPE readout distribution over k = 0 .. 2^n - 1."""
    if not 1 <= n_ancilla <= 12:
        raise ValueError("n_ancilla must lie in [1, 12]")
    size = 2**n_ancilla
    j = np.arange(size)
    k = np.arange(size)[:, None]
    phase = float(phase) % 1.0
    amp = np.exp(2j * np.pi * j * (phase - k / size)).sum(axis=1) / size
    probs = np.abs(amp) ** 2
    return probs / probs.sum()


def _circular_distance(a, b):
    d = np.abs(np.asarray(a) - b) % 1.0
    return np.minimum(d, 1.0 - d)


def relative_error_from_distribution(probs: np.ndarray, phase: float, estimator: str = "mode") -> float:
    phase = float(phase)
    if phase == 0:
        raise ValueError("relative error undefined for phase 0")
    size = probs.size
    grid = np.arange(size) / size
    if estimator == "mode":
        err = _circular_distance(grid[int(np.argmax(probs))], phase)
    elif estimator == "expected_abs":
        err = float(np.dot(probs, _circular_distance(grid, phase)))
    elif estimator == "min_grid":
        err = float(np.min(_circular_distance(grid, phase)))
    else:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    return float(err) / abs(phase)


def qpe_relative_error(phase: float, n_ancilla: int, estimator: str = "mode") -> float:
    """|estimate - phase| / phase for the exact readout distribution.

    ``mode`` uses the most likely readout, ``expected_abs`` the mean absolute
    error over readouts, ``min_grid`` the nearest point of the 2^-n grid.
    """
    probs = qpe_outcome_distribution(phase, n_ancilla)
    return relative_error_from_distribution(probs, phase, estimator)


def kickback_circuit(p: int, theta: float, xi: float) -> Circuit:
    """GHZ fan-out over p nodes, one controlled-U per node, fan-in, correction, H.

    Qubits 0..p-1 carry the GHZ state (qubit 0 is read out), qubits p..2p-1
    hold each node's eigenstate |1> of U = diag(1, e^{i theta}).
    """
    if p < 1:
        raise ValueError("need at least one node")
    c = Circuit(2 * p, metadata={"name": "kickback", "score": "fidelity"})
    for q in range(p, 2 * p):
        c.add("x", q)
    c.add("h", 0)
    for q in range(1, p):
        c.add("cx", 0, q)
    for q in range(p):
        c.add("cp", q, p + q, params=(theta,))
    for q in reversed(range(1, p)):
        c.add("cx", 0, q)
    c.add("p", 0, params=(-p * xi,))
    c.add("h", 0)
    return c


def distributed_kickback_likelihood(p: int, theta: float, xi: float) -> float:
    """Simulated probability of reading 0 from the kickback circuit."""
    if p > 4:
        raise ValueError("full simulation is limited to p <= 4 nodes")
    circ = kickback_circuit(p, theta, xi)
    psi = ideal_statevector(circ)
    probs = np.abs(psi) ** 2
    return float(marginal(probs, circ.n_qubits, [0])[0])


def kickback_closed_form(p: int, theta: float, xi: float) -> float:
    return math.cos(p * (theta - xi) / 2) ** 2


def qpe_circuit(phase: float, n_ancilla: int) -> Circuit:
    """Textbook QPE: ancillas 0..n-1 (ancilla 0 most significant), system qubit n."""
    n = n_ancilla
    sys_q = n
    c = Circuit(n + 1, metadata={"name": "qpe", "score": "fidelity", "phase": float(phase)})
    c.add("x", sys_q)
    for a in range(n):
        c.add("h", a)
    for a in range(n):
        power = 2 ** (n - 1 - a)
        c.add("cp", a, sys_q, params=(2 * math.pi * float(phase) * power,))
    # inverse QFT on the ancilla register, MSB first, no final swaps needed
    for j in range(n):
        for k in range(j):
            c.add("cp", k, j, params=(-math.pi / 2 ** (j - k),))
        c.add("h", j)
    return c


def qpe_ancilla_distribution(probs: np.ndarray, n_ancilla: int) -> np.ndarray:
    """Readout distribution of k from logical-order probabilities over ancillas + system.

    With the MSB-first inverse QFT above, ancilla a holds bit a of the
    bit-reversed result.
    """
    n = n_ancilla
    p = marginal(probs, n + 1, list(range(n)))
    idx = np.arange(2**n)
    rev = np.array([int(format(i, f"0{n}b")[::-1], 2) for i in idx])
    out = np.empty_like(p)
    out[rev] = p
    return out


@dataclass(frozen=True, eq=False)
class QpeErrorCurve:
    t1_values: tuple[float, ...]
    link_times: tuple[float, ...]
    errors: np.ndarray  # [T1 index, link time index]
    estimator: str
    baseline_error: float

    def to_csv(self) -> str:
        lines = ["T1_seconds,link_time_seconds,relative_error"]
        for i, t1 in enumerate(self.t1_values):
            for j, t in enumerate(self.link_times):
                lines.append(f"{t1!r},{t!r},{float(self.errors[i, j])!r}")
        return "\n".join(lines) + "\n"


def qpe_link_error_curve(
    t1_values,
    link_times,
    *,
    phase: float = float(REFERENCE_PHASE),
    n_ancilla: int = 9,
    link_fidelity: float = 1.0,
    estimator: str = "expected_abs",
    noise: NoiseParams | None = None,
    system_qubit: int = 4,
    topology: NodeTopology | None = None,
) -> QpeErrorCurve:
    """Relative QPE error on the two-node device versus internode gate time.

    The system qubit (the one the phase is applied to) sits on physical
    qubit ``system_qubit``; ancillas fill the remaining qubits in order.
    T2 is set equal to T1 for each curve. The baseline is the error of the
    noiseless 4-ancilla estimate that fits on one node.
    """
    topology = topology or NodeTopology()
    base = noise or NoiseParams()
    n = n_ancilla
    circ = qpe_circuit(phase, n)
    physical = [q for q in range(topology.n_qubits) if q != system_qubit][:n] + [system_qubit]
    routed, _ = route(lower_to_cx(circ), topology, initial_layout=physical)
    errors = np.zeros((len(t1_values), len(link_times)))
    for i, t1 in enumerate(t1_values):
        nz = replace(base, T1=t1, T2=t1)
        for j, t in enumerate(link_times):
            res = execute(routed, nz, LinkSpec(float(t), link_fidelity))
            dist = qpe_ancilla_distribution(res.probabilities, n)
            errors[i, j] = relative_error_from_distribution(dist, phase, estimator)
    baseline = qpe_relative_error(phase, 4, estimator)
    return QpeErrorCurve(tuple(map(float, t1_values)), tuple(map(float, link_times)), errors, estimator, baseline)


@dataclass(frozen=True)
class DqpeCostQuery:
    epsilon: float
    delta: float = 0.1
    eps_theta: float = 1e-3
    gamma: float = 1.0
    workers: float = 1.0
    alpha: float = 1.0
    e_gap: float = 1.0

    def __post_init__(self):
        for name in ("epsilon", "delta", "eps_theta", "workers", "alpha", "e_gap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")


def polylog(x: float, power: float = 2.0) -> float:
    """(ln x)^power for x > 1, else 0."""
    return math.log(x) ** power if x > 1 else 0.0


VARIANTS = ("classical", "quantum", "qdrift")


def parallel_depth_model(query: DqpeCostQuery, variant: str = "quantum", *, polylog_power: float = 2.0) -> float:
    """Depth, in sequential applications of U, with all implied constants set to 1.

    classical: log(1/eps) / (delta eps_theta)
    quantum:   log(1/eps) / (delta eps) + 1 / (eps T) + gamma T polylog(T / eps)
    qdrift:    alpha log(1/eps) / (delta E_gap) + alpha^4 / (eps^4 T) + gamma T polylog(T / eps)
    """
    q = query
    log_term = math.log(1.0 / q.epsilon)
    comm = q.gamma * q.workers * polylog(q.workers / q.epsilon, polylog_power)
    if variant == "classical":
        return log_term / (q.delta * q.eps_theta)
    if variant == "quantum":
        return log_term / (q.delta * q.epsilon) + 1.0 / (q.epsilon * q.workers) + comm
    if variant == "qdrift":
        return q.alpha * log_term / (q.delta * q.e_gap) + q.alpha**4 / (q.epsilon**4 * q.workers) + comm
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def channel_tolerance(epsilon: float, m: float) -> float:
    """Largest per-use channel error Delta keeping m uses within phase error epsilon."""
    if epsilon <= 0 or m <= 0:
        raise ValueError("epsilon and m must be positive")
    return epsilon / (m * math.pi)


def optimal_worker_count(epsilon: float, gamma: float) -> int:
    """Integer T >= 1 minimising 1/(eps T) + gamma T (continuous optimum sqrt(1 / (eps gamma)))."""
    if epsilon <= 0 or gamma <= 0:
        raise ValueError("epsilon and gamma must be positive")
    t = math.sqrt(1.0 / (epsilon * gamma))
    candidates = {max(1, math.floor(t)), max(1, math.ceil(t))}
    return min(sorted(candidates), key=lambda w: 1.0 / (epsilon * w) + gamma * w)


def cost_report(query: DqpeCostQuery) -> dict:
    return {v: parallel_depth_model(query, v) for v in VARIANTS}
