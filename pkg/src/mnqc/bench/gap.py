"""Gate-algorithm performance scans over (internode gate time, link infidelity)."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..distill import NoiseParams
from .circuits import Circuit, build_benchmark, lower_to_cx
from .executor import LinkSpec, execute
from .topology import NodeTopology, route

SUCCESS_THRESHOLD = 0.9


@dataclass(frozen=True, eq=False)
class GapGrid:
    benchmark: str
    times: np.ndarray
    infidelities: np.ndarray
    scores: np.ndarray  # [time index, infidelity index]
    fidelity: np.ndarray
    success_prob: np.ndarray
    threshold: float = SUCCESS_THRESHOLD
    frontier: tuple = field(default=())

    @property
    def success(self) -> np.ndarray:
        return self.scores > self.threshold

    def record(self) -> dict:
        return {
            "benchmark": self.benchmark,
            "grid": {"times": self.times.tolist(), "infidelities": self.infidelities.tolist()},
            "scores": self.scores.tolist(),
            "fidelity": self.fidelity.tolist(),
            "success_prob": self.success_prob.tolist(),
            "threshold": self.threshold,
            "frontier_overlay": [list(p) for p in self.frontier],
        }

    def to_json(self) -> str:
        return json.dumps(self.record(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_ll_seconds," + ",".join(repr(float(x)) for x in self.infidelities) + "\n")
        for t, row in zip(self.times, self.scores):
            buf.write(repr(float(t)) + "," + ",".join(repr(float(x)) for x in row) + "\n")
        return buf.getvalue()


def prepare(benchmark, topology: NodeTopology | None = None) -> Circuit:
    """Build (if named), lower to CX and route a benchmark circuit."""
    circ = build_benchmark(benchmark) if isinstance(benchmark, str) else benchmark
    routed, _ = route(lower_to_cx(circ), topology or NodeTopology())
    return routed


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0 or np.any(axis <= 0) or np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} axis must be positive and strictly increasing")
    return axis


def gap_scan(
    benchmark,
    times,
    infidelities,
    noise: NoiseParams | None = None,
    *,
    frontier=(),
    workers: int = 1,
    topology: NodeTopology | None = None,
) -> GapGrid:
    """Score a benchmark at every (T_LL, 1 - F_LL) grid point.

    ``frontier`` is an optional overlay of achievable operating points,
    each with ``gate_time`` and ``infidelity`` attributes or a plain tuple.
    """
    noise = noise or NoiseParams()
    times = _check_axis(times, "time")
    infidelities = _check_axis(infidelities, "infidelity")
    if infidelities[-1] > 1:
        raise ValueError("infidelities must not exceed 1")
    circ = prepare(benchmark, topology)
    tasks = [(i, j) for i in range(times.size) for j in range(infidelities.size)]

    def one(task):
        i, j = task
        r = execute(circ, noise, LinkSpec(float(times[i]), 1.0 - float(infidelities[j])))
        return r.score, r.fidelity, r.success_prob

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    shape = (times.size, infidelities.size)
    arr = np.array(results).reshape(shape + (3,))
    overlay = tuple(
        (float(p.gate_time), float(p.infidelity)) if hasattr(p, "gate_time") else tuple(map(float, p))
        for p in frontier
    )
    name = benchmark if isinstance(benchmark, str) else benchmark.metadata.get("name", "custom")
    return GapGrid(name, times, infidelities, arr[..., 0], arr[..., 1], arr[..., 2], frontier=overlay)


def is_down_closed(mask: np.ndarray) -> bool:
    """True if success at (i, j) implies success at every (i' <= i, j' <= j)."""
    mask = np.asarray(mask, dtype=bool)
    closure = np.flip(np.logical_or.accumulate(np.flip(mask, 0), 0), 0)
    closure = np.flip(np.logical_or.accumulate(np.flip(closure, 1), 1), 1)
    return bool(np.array_equal(closure, mask))


def score_is_monotone(scores: np.ndarray, atol: float = 1e-9) -> bool:
    """Scores never increase along either axis."""
    return bool(np.all(np.diff(scores, axis=0) <= atol) and np.all(np.diff(scores, axis=1) <= atol))


def axis_intercepts(grid: GapGrid) -> tuple[float | None, float | None]:
    """Largest successful infidelity at the shortest time, largest successful time at the lowest infidelity."""
    s = grid.success
    i_ok = np.flatnonzero(s[0])
    t_ok = np.flatnonzero(s[:, 0])
    i_max = float(grid.infidelities[i_ok[-1]]) if i_ok.size else None
    t_max = float(grid.times[t_ok[-1]]) if t_ok.size else None
    return i_max, t_max


@dataclass(frozen=True)
class AnalyticBoundary:
    budget: float
    xi_i_asymptote: float
    xi_t_asymptote: float
    xi_t: np.ndarray = field(repr=False)
    xi_i: np.ndarray = field(repr=False)

    def infidelity_at(self, t: float) -> float:
        """Largest tolerable link infidelity at gate time ``t`` (0 past the time asymptote)."""
        frac = 1.0 - t / math.exp(self.xi_t_asymptote)
        return max(frac, 0.0) * math.exp(self.xi_i_asymptote)


def analytic_boundary(
    f_target: float,
    n_qubits: float,
    t_star: float,
    *,
    floor: float = 0.0,
    link_weight: float = 1.0,
    n_points: int = 200,
) -> AnalyticBoundary:
    """Iso-fidelity curve of the additive error model.

    Output infidelity is taken as floor + w I + N T / T*: link infidelity I
    with weight w plus N idling qubits, each losing T / T* over a link gate of
    duration T. Setting it equal to 1 - f_target gives
    log(w e^xi_I + e^(xi_T + log N - log T*)) = log(budget), a smoothed
    rectangle in (xi_T, xi_I) = (log T, log I) with asymptotes
    xi_I -> log(budget / w) and xi_T -> log(budget T* / N).
    """
    if not 0 < f_target < 1:
        raise ValueError("target fidelity must lie in (0, 1)")
    if n_qubits <= 0 or t_star <= 0 or link_weight <= 0:
        raise ValueError("n_qubits, t_star and link_weight must be positive")
    budget = 1.0 - f_target - floor
    if budget <= 0:
        raise ValueError("error floor already exceeds the infidelity budget")
    xi_t_max = math.log(budget * t_star / n_qubits)
    xi_i_max = math.log(budget / link_weight)
    xi_t = xi_t_max + np.log(np.linspace(1e-6, 1 - 1e-9, n_points))
    rest = budget - n_qubits * np.exp(xi_t) / t_star
    xi_i = np.log(rest / link_weight)
    return AnalyticBoundary(budget, xi_i_max, xi_t_max, xi_t, xi_i)
