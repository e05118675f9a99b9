import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mnqc import densmat as dm
from mnqc.distill import (
    DistillationConfig,
    NoiseParams,
    bbpssw_update,
    dejmps_round,
    fidelity_gain_study,
    nested_distillation,
    psi_to_phi,
    recurrence_times,
    single_shot_success,
)

fids = st.floats(0.0, 1.0)


def test_bbpssw_reference_value():
    assert bbpssw_update(0.8) == pytest.approx(0.838150289, abs=1e-9)


@given(fids)
def test_bbpssw_equals_noiseless_dejmps_on_werner_pairs(f):
    # both protocols give (F^2 + G^2/9) / (F^2 + 2FG/3 + 5G^2/9) on Werner inputs
    w = dm.werner_state(f, "phi+")
    out, _ = dejmps_round(w, w, cnot_error=0.0, ideal_memory=True)
    assert dm.bell_fidelity(out, "phi+") == pytest.approx(bbpssw_update(f), abs=1e-12)


@given(st.floats(0.5, 1.0 - 1e-6, exclude_min=True))
def test_bbpssw_improves_above_half(f):
    assert bbpssw_update(f) > f


def test_bbpssw_rejects_out_of_range():
    with pytest.raises(ValueError):
        bbpssw_update(1.2)


@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_dejmps_bell_diagonal_map(raw):
    c = np.array(raw) / sum(raw)
    coeffs = dict(zip(("phi+", "psi-", "psi+", "phi-"), c))
    rho = dm.bell_diagonal_state(coeffs)
    out, p = dejmps_round(rho, rho, cnot_error=0.0, ideal_memory=True)
    a, b, cc, d = c
    n = (a + b) ** 2 + (cc + d) ** 2
    assert p == pytest.approx(n, abs=1e-12)
    assert dm.bell_fidelity(out, "phi+") == pytest.approx((a * a + b * b) / n, abs=1e-12)


@given(fids, fids)
def test_dejmps_output_is_a_state(f1, f2):
    out, p = dejmps_round(dm.werner_state(f1), dm.werner_state(f2))
    out.check()
    assert 0 < p <= 1


def test_psi_to_phi_relabels():
    out = psi_to_phi(dm.bell_state("psi+"))
    assert dm.bell_fidelity(out, "phi+") == pytest.approx(1.0)


@given(st.integers(0, 12), st.floats(1e-9, 1e-3), st.floats(0, 1e-5))
def test_recurrence_times_closed_form(n, tau, tp):
    assert recurrence_times(n, tau, tp)[-1] == pytest.approx(2**n * tau + n * tp, rel=1e-12)


@given(st.lists(st.floats(0.01, 1.0), max_size=6))
def test_single_shot_success_product(ps):
    expect = math.prod(p ** (2 ** (j - 1)) for j, p in enumerate(ps, start=1))
    assert single_shot_success(ps) == pytest.approx(expect, rel=1e-12)


def test_single_shot_success_validates():
    with pytest.raises(ValueError):
        single_shot_success([0.5, 0.0])


def test_nested_distillation_bookkeeping():
    cfg = DistillationConfig(3, 1e-6)
    res = nested_distillation(dm.werner_state(0.85), cfg)
    assert len(res.fidelities) == 4 and len(res.per_round_p) == 3
    assert res.total_time == pytest.approx(recurrence_times(3, 1e-6, cfg.noise.purification_step_time)[-1])
    assert res.average_time == pytest.approx(res.total_time / res.success_prob)
    header = res.to_csv().split("\n")[0]
    assert header == "rounds,fidelity,infidelity,t_n_seconds,P_n"


def test_memory_decoherence_upturn_for_fidelity_09():
    res = nested_distillation(dm.werner_state(0.9), DistillationConfig(8, 1e-6, NoiseParams()))
    infid = [1 - f for f in res.fidelities]
    upturn = next(n for n in range(1, len(infid)) if infid[n] > infid[n - 1])
    assert int(np.argmin(infid)) == 3 and upturn == 4


def test_zero_rounds_returns_input():
    w = dm.werner_state(0.7)
    res = nested_distillation(w, DistillationConfig(0, 1e-6))
    assert res.success_prob == 1.0
    assert res.fidelity == pytest.approx(0.7)


def test_gate_error_reduces_gain():
    table = fidelity_gain_study([0.6, 0.8, 0.95], [0.0, 0.01, 0.05])
    assert all(g > 0 for g in table["ideal"])
    for i in range(3):
        assert table[0.05][i] < table[0.01][i] <= table["ideal"][i] + 1e-12


def test_noise_params_validation():
    assert NoiseParams().t_star == pytest.approx(5e-4)
    with pytest.raises(ValueError):
        NoiseParams(T1=1e-3, T2=3e-3)
    with pytest.raises(ValueError):
        NoiseParams(local_gate_time=0)
    with pytest.raises(ValueError):
        DistillationConfig(-1, 1e-6)
    with pytest.raises(ValueError):
        DistillationConfig(1, 0.0)
