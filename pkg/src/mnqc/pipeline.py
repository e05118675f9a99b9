"""Physical link to internode gate: heralded pairs, nested distillation, teleported CX."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from . import densmat as dm
from . import m2o
from .distill import DistillationConfig, NoiseParams, nested_distillation, psi_to_phi
from .gate import teleported_cx


@dataclass(frozen=True)
class LinkOperatingPoint:
    preset: str
    pump_power: float
    pe: float
    rounds: int
    raw_rate: float
    raw_fidelity: float
    ep_fidelity: float
    ep_success_prob: float
    ep_time: float
    gate_time: float
    process_fidelity: float

    @property
    def infidelity(self) -> float:
        return 1.0 - self.process_fidelity

    def record(self) -> dict:
        return asdict(self)


def distillation_input(raw: m2o.HeraldedEPResult, twirl: bool = True) -> dm.DensityMatrix:
    """Heralded Psi+ pair relabelled to Phi+, optionally twirled to a Werner state."""
    phi = psi_to_phi(raw.conditional_state)
    if twirl:
        phi = dm.werner_state(dm.bell_fidelity(phi, "phi+"), "phi+")
    return phi


def link_operating_point(
    preset,
    power: float | None = None,
    pe: float = 0.5,
    rounds: int = 0,
    noise: NoiseParams | None = None,
    *,
    method: str = "exact",
    raw: m2o.HeraldedEPResult | None = None,
    twirl: bool = True,
) -> LinkOperatingPoint:
    """Internode CX time and process fidelity for one link configuration.

    Raw pairs arrive every tau = 1/rate. After ``rounds`` of nested
    distillation a pair is ready after t_n with single-shot probability P_n;
    failed trees restart, so the mean delivery time is t_n / P_n. The gate
    time adds the local teleportation circuit to that delivery time.
    ``power=None`` selects the pump power giving cooperativity 1. With
    ``twirl`` the heralded pair is depolarized to the Werner state of equal
    Phi+ fidelity before distillation; otherwise its full density matrix is
    distilled.
    """
    noise = noise or NoiseParams()
    preset = m2o.get_preset(preset) if isinstance(preset, str) else preset
    if power is None:
        power = m2o.pump_power_for_cooperativity(preset, 1.0)
    if raw is None:
        raw = m2o.simulate_heralded_cycle(preset, power, pe, method=method)
    if raw.rate <= 0:
        raise ValueError("link produces no heralded pairs")
    tau = 1.0 / raw.rate
    dist = nested_distillation(distillation_input(raw, twirl), DistillationConfig(rounds, tau, noise))
    ep_time = dist.average_time
    gate = teleported_cx(dist.state, noise, ep_delivery_time=ep_time)
    return LinkOperatingPoint(
        preset=preset.name,
        pump_power=power,
        pe=pe,
        rounds=rounds,
        raw_rate=raw.rate,
        raw_fidelity=raw.fidelity,
        ep_fidelity=dist.fidelity,
        ep_success_prob=dist.success_prob,
        ep_time=ep_time,
        gate_time=gate.gate_time,
        process_fidelity=gate.process_fidelity,
    )


def achievable_frontier(
    preset,
    pes,
    max_rounds: int = 3,
    noise: NoiseParams | None = None,
    power: float | None = None,
    *,
    method: str = "exact",
    twirl: bool = True,
) -> list[LinkOperatingPoint]:
    """Operating points over a grid of excitation probabilities and round counts."""
    noise = noise or NoiseParams()
    preset = m2o.get_preset(preset) if isinstance(preset, str) else preset
    if power is None:
        power = m2o.pump_power_for_cooperativity(preset, 1.0)
    points = []
    for pe in pes:
        raw = m2o.simulate_heralded_cycle(preset, power, pe, method=method)
        for r in range(max_rounds + 1):
            points.append(link_operating_point(preset, power, pe, r, noise, raw=raw, twirl=twirl))
    return points


def best_under_budget(points, time_budget: float | None = None) -> LinkOperatingPoint:
    """Minimum-infidelity point, optionally restricted to gate_time <= time_budget."""
    pool = [p for p in points if time_budget is None or p.gate_time <= time_budget]
    if not pool:
        raise ValueError("no operating point satisfies the time budget")
    return min(pool, key=lambda p: (p.infidelity, p.gate_time))


def pareto_front(points) -> list[LinkOperatingPoint]:
    """Points not dominated in (gate_time, infidelity), sorted by gate time."""
    ordered = sorted(points, key=lambda p: (p.gate_time, p.infidelity))
    front, best = [], float("inf")
    for p in ordered:
        if p.infidelity < best:
            front.append(p)
            best = p.infidelity
    return front
