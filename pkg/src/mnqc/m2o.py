"""Heralded entanglement generation across two microwave-to-optical converters.

Each node prepares sqrt(1-Pe)|g0> + sqrt(Pe)|e1> on (qubit, microwave mode).
The mode passes three beamsplitters (microwave extraction T_e with thermal
added noise, intracavity conversion T_in, optical extraction T_o); the two
optical modes meet on a 50:50 splitter and one click at detector A with
none at B heralds the qubit pair.

Two evaluation routes are provided:

``fock``
    Literal simulation on truncated Fock spaces using the beamsplitter
    unitaries of :mod:`mnqc.densmat`, with a truncation-doubling check.
``exact``
    Truncation-free evaluation. The three-splitter chain is one thermal-loss
    channel (transmissivity T_e*T_in*T_o); the herald only needs its
    photon-number <= 1 output block, whose amplitudes are closed-form sums
    over the thermal environment occupancy.

Rates follow the convention that the tabulated values are rate/(2*pi); every
formula uses angular rates, and the converter bandwidth B is the angular
microwave linewidth.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import hbar

from . import densmat as dm

PREP_TIME = 50e-9


class TruncationError(RuntimeError):
    pass


@dataclass(frozen=True)
class M2OConverterPreset:
    name: str
    g0_over_2pi: float
    gamma_ext_o_over_2pi: float
    gamma_int_o_over_2pi: float
    gamma_ext_e_over_2pi: float
    gamma_int_e_over_2pi: float
    k_add: float = 1.0 / 1e-3  # photons per watt
    dark_count_rate: float = 50.0
    pump_frequency_over_2pi: float = 193.4e12
    extra_optical_loss: float = 0.0

    def __post_init__(self):
        rates = (
            self.g0_over_2pi,
            self.gamma_ext_o_over_2pi,
            self.gamma_int_o_over_2pi,
            self.gamma_ext_e_over_2pi,
            self.gamma_int_e_over_2pi,
            self.pump_frequency_over_2pi,
        )
        if any(r <= 0 for r in rates):
            raise ValueError(f"preset {self.name!r}: all rates must be positive")
        if self.k_add < 0 or self.dark_count_rate < 0:
            raise ValueError(f"preset {self.name!r}: k_add and dark_count_rate must be >= 0")
        if not 0 <= self.extra_optical_loss < 1:
            raise ValueError("extra_optical_loss must lie in [0, 1)")

    def with_overrides(self, **kw) -> "M2OConverterPreset":
        return replace(self, **kw)


PRESETS = {
    "no1": M2OConverterPreset("no1", 60.0, 2.1e6, 1.1e5, 1.4e6, 2.6e5),
    "no2": M2OConverterPreset("no2", 37.0, 1.5e7, 2.2e6, 5.6e6, 1.6e6),
    "no3": M2OConverterPreset("no3", 750.0, 3.3e7, 2.8e7, 3.2e6, 1.2e6),
    "future": M2OConverterPreset("future", 1e3, 1e7, 2e5, 1e7, 2e5),
}


def get_preset(name: str) -> M2OConverterPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; valid presets: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class DerivedConverterParams:
    n_p: float
    g: float  # angular
    C: float
    T_e: float
    T_in: float
    T_o: float
    bandwidth: float  # angular, 1/s
    t_tot: float
    n_add: float

    @property
    def eta(self) -> float:
        return self.T_e * self.T_in * self.T_o


def _angular(preset):
    tp = 2 * math.pi
    return (
        tp * preset.g0_over_2pi,
        tp * preset.gamma_ext_o_over_2pi,
        tp * (preset.gamma_ext_o_over_2pi + preset.gamma_int_o_over_2pi),
        tp * preset.gamma_ext_e_over_2pi,
        tp * (preset.gamma_ext_e_over_2pi + preset.gamma_int_e_over_2pi),
        tp * preset.pump_frequency_over_2pi,
    )


def intracavity_photons(preset: M2OConverterPreset, power: float) -> float:
    _, g_ext_o, g_tot_o, _, _, omega = _angular(preset)
    return 4 * g_ext_o * power / (hbar * omega * g_tot_o**2)


def derive_converter_params(preset: M2OConverterPreset, power: float) -> DerivedConverterParams:
    if power < 0:
        raise ValueError("pump power must be non-negative")
    g0, g_ext_o, g_tot_o, g_ext_e, g_tot_e, _ = _angular(preset)
    n_p = intracavity_photons(preset, power)
    g = g0 * math.sqrt(n_p)
    C = 4 * g**2 / (g_tot_e * g_tot_o)
    T_in = min(4 * C / (C + 1) ** 2, 1.0)
    T_o = g_ext_o / g_tot_o * (1.0 - preset.extra_optical_loss)
    bandwidth = g_tot_e
    return DerivedConverterParams(
        n_p=n_p,
        g=g,
        C=C,
        T_e=g_ext_e / g_tot_e,
        T_in=T_in,
        T_o=T_o,
        bandwidth=bandwidth,
        t_tot=PREP_TIME + 2.0 / bandwidth,
        n_add=preset.k_add * power,
    )


def pump_power_for_cooperativity(preset: M2OConverterPreset, C: float = 1.0) -> float:
    """Closed-form inversion of C(P); C is linear in P."""
    g0, g_ext_o, g_tot_o, _, g_tot_e, omega = _angular(preset)
    n_p = C * g_tot_e * g_tot_o / (4 * g0**2)
    return n_p * hbar * omega * g_tot_o**2 / (4 * g_ext_o)


@dataclass(frozen=True, eq=False)
class HeraldedEPResult:
    herald_prob: float
    rate: float
    conditional_state: dm.DensityMatrix | None = field(repr=False)
    fidelity: float
    cycle_time: float
    params: DerivedConverterParams = field(repr=False)
    pump_power: float = 0.0
    pe: float = 0.0
    preset: str = ""
    method: str = "exact"
    fock_dim: int | None = None

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity

    def csv_row(self) -> dict:
        return {
            "preset": self.preset,
            "P_watts": repr(float(self.pump_power)),
            "Pe": repr(float(self.pe)),
            "C": repr(float(self.params.C)),
            "herald_prob": repr(float(self.herald_prob)),
            "rate_hz": repr(float(self.rate)),
            "fidelity": repr(float(self.fidelity)),
            "infidelity": repr(float(self.infidelity)),
        }


CSV_COLUMNS = ("preset", "P_watts", "Pe", "C", "herald_prob", "rate_hz", "fidelity", "infidelity")


def results_to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow(r.csv_row())
    return buf.getvalue()


# -- shared pieces -----------------------------------------------------------


def _node_amplitudes(pe: float) -> np.ndarray:
    return np.array([math.sqrt(1 - pe), math.sqrt(pe)])


def _herald_sign() -> complex:
    """Relative sign s with U^dag|1,0> proportional to |1,0> + s|0,1>.

    Taken from the same 50:50 unitary the Fock route uses, so both routes
    apply one Pauli-frame convention.
    """
    u = dm.beamsplitter_unitary(0.5, 2)
    out = np.zeros(4)
    out[2] = 1.0  # |1,0> in (mode A, mode B) ordering, d=2
    chi = u.conj().T @ out
    return complex(chi[1] / chi[2])


def _frame_correct(rho_q: np.ndarray, sign: complex) -> np.ndarray:
    """Map the heralded state onto Psi+ (local Z on node B when s = -1)."""
    if np.real(sign) < 0:
        z2 = np.kron(dm.PAULI["I"], dm.PAULI["Z"])
        rho_q = z2 @ rho_q @ z2
    return rho_q


def _finish(rho10, rho00, params, preset, power, pe, method, fock_dim) -> HeraldedEPResult:
    p_dark = preset.dark_count_rate / params.bandwidth
    herald = (1 - p_dark) * rho10 + p_dark * rho00
    prob = float(np.real(np.trace(herald)))
    prob = min(max(prob, 0.0), 1.0)
    if prob > 0:
        state = dm.DensityMatrix.from_array(herald / np.trace(herald).real)
        fid = dm.bell_fidelity(state, "psi+")
    else:
        state, fid = None, float("nan")
    return HeraldedEPResult(
        herald_prob=prob,
        rate=prob / params.t_tot,
        conditional_state=state,
        fidelity=fid,
        cycle_time=params.t_tot,
        params=params,
        pump_power=power,
        pe=pe,
        preset=preset.name,
        method=method,
        fock_dim=fock_dim,
    )


# -- exact photon-sector route -----------------------------------------------


def _thermal_weights(n_env: float, tail: float = 1e-16) -> np.ndarray:
    if n_env <= 0:
        return np.array([1.0])
    q = n_env / (1 + n_env)
    kmax = int(math.ceil(math.log(tail) / math.log(q))) + 1
    k = np.arange(kmax)
    return (1 - q) * q**k


def low_photon_block(eta: float, n_env: float) -> dict:
    """Photon-number <= 1 output elements of a thermal-loss channel.

    Returns ``M[(n, m)]`` as 2x2 arrays with entries <j|Phi(|n><m|)|l> for
    input and output photon numbers in {0, 1}.
    """
    p = _thermal_weights(n_env)
    k = np.arange(p.size, dtype=float)
    t2, r2 = eta, 1.0 - eta
    t = math.sqrt(eta)
    km1 = np.maximum(k - 1, 0)
    tk = t2**k
    tkm1_k = k * t2**km1  # k t^(2(k-1)), zero at k=0
    # <1,k|U|1,k> = t^(k-1) (t^2 - k r^2); equals t at k=0
    a11 = np.where(k > 0, t**km1 * (t2 - k * r2), t)
    m00 = np.zeros((2, 2))
    m00[0, 0] = np.sum(p * tk)
    m00[1, 1] = np.sum(p * r2 * tkm1_k)
    m11 = np.zeros((2, 2))
    m11[0, 0] = np.sum(p * r2 * tk * (k + 1))
    m11[1, 1] = np.sum(p * a11**2)
    m10 = np.zeros((2, 2))
    m10[1, 0] = np.sum(p * a11 * t**k)
    m01 = m10.T.copy()
    return {(0, 0): m00, (1, 1): m11, (1, 0): m10, (0, 1): m01}


def _effective_channel(params: DerivedConverterParams) -> tuple[float, float]:
    eta = params.eta
    injected = (1 - params.T_e) * params.T_in * params.T_o * params.n_add
    n_env = injected / (1 - eta) if (1 - eta) > 1e-15 and injected > 0 else 0.0
    return eta, n_env


def _herald_exact(pe: float, params: DerivedConverterParams, sign: complex):
    eta, n_env = _effective_channel(params)
    blocks = low_photon_block(eta, n_env)
    c = _node_amplitudes(pe)
    # per-node mode block for qubit coherence |a><b| (photon number = qubit label)
    node = {(a, b): c[a] * c[b] * blocks[(a, b)] for a in (0, 1) for b in (0, 1)}
    rho10 = np.zeros((4, 4), dtype=complex)
    rho00 = np.zeros((4, 4), dtype=complex)
    for a1 in (0, 1):
        for b1 in (0, 1):
            X = node[(a1, b1)]
            for a2 in (0, 1):
                for b2 in (0, 1):
                    Y = node[(a2, b2)]
                    row, col = 2 * a1 + a2, 2 * b1 + b2
                    rho10[row, col] = 0.5 * (
                        X[1, 1] * Y[0, 0]
                        + np.conj(sign) * X[1, 0] * Y[0, 1]
                        + sign * X[0, 1] * Y[1, 0]
                        + X[0, 0] * Y[1, 1]
                    )
                    rho00[row, col] = X[0, 0] * Y[0, 0]
    return rho10, rho00


# -- truncated Fock route ----------------------------------------------------


def _lossy_node_state(pe: float, params: DerivedConverterParams, d: int) -> dm.DensityMatrix:
    ket = np.zeros(2 * d, dtype=complex)
    c = _node_amplitudes(pe)
    ket[0 * d + 0] = c[0]
    ket[1 * d + 1] = c[1]
    node = dm.DensityMatrix.from_ket(ket, (2, d))
    stages = (
        (params.T_e, params.n_add),
        (params.T_in, 0.0),
        (params.T_o, 0.0),
    )
    for transmission, n_th in stages:
        env = dm.thermal_state(n_th, d)
        joint = dm.tensor_product(node, env)
        joint = dm.apply_unitary(joint, dm.beamsplitter_unitary(transmission, d), (1, 2))
        node = dm.partial_trace(joint, (0, 1))
    return node


def _herald_fock(pe: float, params: DerivedConverterParams, d: int):
    node = _lossy_node_state(pe, params, d)
    joint = dm.tensor_product(node, node)  # (qA, mA, qB, mB)
    joint = dm.apply_unitary(joint, dm.beamsplitter_unitary(0.5, d), (1, 3))
    t = joint.data.reshape((2, d, 2, d) * 2)
    rho10 = t[:, 1, :, 0, :, 1, :, 0].reshape(4, 4)
    rho00 = t[:, 0, :, 0, :, 0, :, 0].reshape(4, 4)
    return rho10, rho00


def simulate_heralded_cycle(
    preset: M2OConverterPreset,
    power: float,
    pe: float,
    *,
    method: str = "exact",
    d_f: int = 5,
    max_fock: int = 20,
    tol: float = 1e-4,
) -> HeraldedEPResult:
    """One heralded generation attempt; returns probability, rate and state.

    With ``method="fock"`` the truncation is doubled from ``d_f`` until the
    herald probability and fidelity move by less than ``tol``; failure to
    converge by ``max_fock`` raises :class:`TruncationError`.
    """
    if not 0.0 <= pe <= 0.5:
        raise ValueError(f"Pe={pe} outside [0, 0.5]")
    params = derive_converter_params(preset, power)
    sign = _herald_sign()
    if method == "exact":
        rho10, rho00 = _herald_exact(pe, params, sign)
        rho10, rho00 = _frame_correct(rho10, sign), _frame_correct(rho00, sign)
        return _finish(rho10, rho00, params, preset, power, pe, "exact", None)
    if method != "fock":
        raise ValueError(f"unknown method {method!r}")

    def run(d):
        r10, r00 = _herald_fock(pe, params, d)
        return _finish(_frame_correct(r10, sign), _frame_correct(r00, sign), params, preset, power, pe, "fock", d)

    d = d_f
    current = run(d)
    history = []
    while 2 * d <= max_fock:
        nxt = run(2 * d)
        dp = abs(nxt.herald_prob - current.herald_prob)
        dfid = abs(nxt.fidelity - current.fidelity) if current.herald_prob > 0 else 0.0
        history.append((d, dp, dfid))
        if dp < tol and (dfid < tol or math.isnan(dfid)):
            return current
        d, current = 2 * d, nxt
    raise TruncationError(
        f"Fock truncation did not converge for preset {preset.name!r} "
        f"(n_add={params.n_add:.3g}); (d, d_herald, d_fidelity) history: {history}"
    )


def sweep_pump_power(preset, powers, pe: float = 0.5, **kw) -> list[HeraldedEPResult]:
    powers = np.asarray(powers, dtype=float)
    if np.any(np.diff(powers) < 0):
        raise ValueError("pump power grid must be sorted")
    return [simulate_heralded_cycle(preset, float(p), pe, **kw) for p in powers]


def sweep_excitation_probability(preset, pes, power: float | None = None, **kw) -> list[HeraldedEPResult]:
    """Sweep Pe at fixed pump power (default: the C=1 power)."""
    pes = np.asarray(pes, dtype=float)
    if np.any((pes < 0) | (pes > 0.5)):
        raise ValueError("Pe grid must lie within [0, 0.5]")
    if power is None:
        power = pump_power_for_cooperativity(preset, 1.0)
    return [simulate_heralded_cycle(preset, power, float(pe), **kw) for pe in pes]


def tradeoff_interval(results) -> tuple[int, int] | None:
    """Longest run of consecutive points where rate and infidelity both rise."""
    best, start = None, 0
    for i in range(1, len(results) + 1):
        ok = i < len(results) and (
            results[i].rate > results[i - 1].rate and results[i].infidelity > results[i - 1].infidelity
        )
        if not ok:
            if i - 1 > start and (best is None or (i - 1 - start) > (best[1] - best[0])):
                best = (start, i - 1)
            start = i
    return best
