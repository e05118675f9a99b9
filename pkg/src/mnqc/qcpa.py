"""Sampling overhead of error-mitigated quantum links versus classical circuit knitting.

Overheads are reported as log10 of the number of circuits, gamma^k, and are
computed in log space throughout.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

KNITTING_GAMMA = {"upper": 9.0, "lower": 4.0}
QFT_LINK_GATES = 128
QFT_LINK_GATES_ROUTED = 164


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class QcpaQuery:
    f_ll: float
    t_ll: float = 0.0
    t_star: float = 5e-4
    n_qubits: int = 0
    k: int = 1
    d: int = 4

    def __post_init__(self):
        if self.d not in (2, 4):
            raise ValueError("gate dimension must be 2 or 4")
        if not 0 <= self.f_ll <= 1:
            raise ValueError("fidelity must lie in [0, 1]")
        if self.t_ll < 0 or self.t_star <= 0 or self.n_qubits < 0 or self.k < 0:
            raise ValueError("times, qubit count and k must be non-negative (t_star positive)")


def log_gamma_pec(d: int, f: float) -> float:
    """Natural log of the PEC gamma for a depolarized d-dimensional gate."""
    d2 = d * d
    base = (d2 * f - 1.0) / (d2 - 1.0)
    if base <= 0:
        raise DomainError(f"process fidelity {f} <= 1/d^2 = {1 / d2}; PEC gamma undefined")
    return -4.0 * (d2 - 1.0) / d2 * math.log(base)


def gamma_pec(d: int, f: float) -> float:
    """((d^2 F - 1)/(d^2 - 1))^(-4 (d^2 - 1)/d^2)."""
    return math.exp(log_gamma_pec(d, f))


def log_pec_link_gamma(query: QcpaQuery) -> float:
    """Log gamma per internode gate: link error plus N spectators decaying for T_LL."""
    decay = math.exp(-query.t_ll / query.t_star)
    if decay <= 0.25:
        raise DomainError(f"spectator decay factor {decay:.3g} <= 1/4; PEC gamma undefined")
    spectators = query.n_qubits * log_gamma_pec(2, decay) if query.n_qubits else 0.0
    return log_gamma_pec(query.d, query.f_ll) + spectators


def pec_link_gamma(query: QcpaQuery) -> float:
    return math.exp(log_pec_link_gamma(query))


def knitting_gamma(bound: str = "upper") -> float:
    try:
        return KNITTING_GAMMA[bound]
    except KeyError:
        raise ValueError(f"bound must be one of {sorted(KNITTING_GAMMA)}") from None


def sampling_overhead(gamma: float, k: float) -> float:
    """log10(gamma^k)."""
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    return k * math.log10(gamma)


def sampling_overhead_from_log(log_gamma: float, k: float) -> float:
    return k * log_gamma / math.log(10)


@dataclass(frozen=True)
class Crossover:
    infidelity: float | None
    found: bool
    gamma_target: float
    iterations: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "infidelity": self.infidelity,
                "found": self.found,
                "gamma_target": self.gamma_target,
                "iterations": self.iterations,
            },
            sort_keys=True,
            indent=2,
        ) + "\n"


def crossover_infidelity(
    bound: str = "upper",
    t_ll: float = 0.0,
    t_star: float = 5e-4,
    n_qubits: int = 0,
    *,
    tol: float = 1e-6,
) -> Crossover:
    """Link infidelity at which the PEC link gamma equals the knitting gamma (bisection).

    The PEC gamma grows with infidelity, so below the returned value a
    mitigated quantum link is cheaper than knitting. ``found`` is False when
    no crossover lies inside the PEC domain.
    """
    target = math.log(knitting_gamma(bound))

    def excess(infid):
        q = QcpaQuery(f_ll=1.0 - infid, t_ll=t_ll, t_star=t_star, n_qubits=n_qubits)
        return log_pec_link_gamma(q) - target

    lo = 0.0
    hi = 1.0 - 1.0 / 16.0
    try:
        at_lo = excess(lo)
    except DomainError:
        return Crossover(None, False, math.exp(target), 0)
    if at_lo >= 0:
        return Crossover(None, False, math.exp(target), 0)
    hi -= 1e-12
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        it += 1
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return Crossover(0.5 * (lo + hi), True, math.exp(target), it)


def overhead_table(ks, f_pec: float, *, d: int = 4) -> list[dict]:
    """Rows {method, k, gamma, log10_circuits} for knitting bounds and PEC at ``f_pec``."""
    rows = []
    lg = log_gamma_pec(d, f_pec)
    for k in ks:
        for bound in ("lower", "upper"):
            g = knitting_gamma(bound)
            rows.append({"method": f"knit_{bound}", "k": k, "gamma": g, "log10_circuits": sampling_overhead(g, k)})
        rows.append(
            {"method": "pec", "k": k, "gamma": math.exp(lg), "log10_circuits": sampling_overhead_from_log(lg, k)}
        )
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["method", "k", "gamma", "log10_circuits"], lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({key: repr(v) if isinstance(v, float) else v for key, v in r.items()})
    return buf.getvalue()
