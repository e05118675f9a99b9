import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnqc.bench.circuits import Circuit, ghz, lower_to_cx
from mnqc.bench.executor import (
    IDEAL_LINK,
    LinkSpec,
    LinkUnavailableError,
    execute,
    gate_durations,
    hellinger_fidelity,
    marginal,
    schedule,
    simulate_noisy,
)
from mnqc.bench.gap import prepare
from mnqc.bench.topology import NodeTopology, route
from mnqc.distill import NoiseParams

NOISE = NoiseParams()
GHZ_ROUTED = prepare("ghz")


@pytest.fixture(scope="module")
def ghz_routed():
    return prepare("ghz")


@pytest.mark.parametrize("name", ["ghz", "bv", "adder"])
def test_noiseless_run_is_perfect(name):
    r = execute(prepare(name), None, IDEAL_LINK)
    assert r.fidelity == pytest.approx(1.0, abs=1e-10)
    assert r.success_prob == pytest.approx(1.0, abs=1e-10)


def test_local_only_circuit_needs_no_link():
    routed, _ = route(lower_to_cx(ghz(5)), NodeTopology())
    r = execute(routed, NOISE, None)
    assert 0.9 < r.fidelity < 1.0 and r.n_link_uses == 0


def test_missing_link_raises(ghz_routed):
    with pytest.raises(LinkUnavailableError):
        execute(ghz_routed, NOISE, None)


@settings(max_examples=8)
@given(st.floats(1e-8, 1e-4), st.floats(1e-8, 1e-4), st.floats(0, 0.3), st.floats(0, 0.3))
def test_score_monotone_in_time_and_infidelity(t1, t2, i1, i2):
    lo_t, hi_t = sorted((t1, t2))
    lo_i, hi_i = sorted((i1, i2))
    good = simulate_noisy(GHZ_ROUTED, NOISE, LinkSpec(lo_t, 1 - lo_i))
    bad = simulate_noisy(GHZ_ROUTED, NOISE, LinkSpec(hi_t, 1 - hi_i))
    assert bad <= good + 1e-12


def test_link_depolarizing_on_bell_pair():
    topo = NodeTopology()
    c = Circuit(10).add("h", 0).add("cx", 0, 9)
    routed, _ = route(c, topo)
    f = 0.9
    r = execute(routed, None, LinkSpec(0.0, f))
    # two-qubit depolarizing with process fidelity f leaves state fidelity (4f + 1) / 5 on a pure state
    assert r.fidelity == pytest.approx((4 * f + 1) / 5, abs=1e-10)
    assert r.n_link_uses == 1


def test_internode_gate_is_a_barrier(ghz_routed):
    d = gate_durations(ghz_routed, NOISE, LinkSpec(1e-6, 0.99))
    starts = schedule(ghz_routed, d, "asap")
    k = next(i for i, g in enumerate(ghz_routed.gates) if g.internode)
    t_end = starts[k] + d[k]
    for i, g in enumerate(ghz_routed.gates):
        if i > k:
            assert starts[i] >= t_end - 1e-18
        elif i < k:
            assert starts[i] + d[i] <= starts[k] + 1e-18


def test_lazy_schedule_beats_asap_for_waiting_qubits(ghz_routed):
    link = LinkSpec(1e-5, 1.0)
    lazy = execute(ghz_routed, NOISE, link, policy="lazy").fidelity
    asap = execute(ghz_routed, NOISE, link, policy="asap").fidelity
    assert lazy >= asap - 1e-12


def test_early_measurement_helps(ghz_routed):
    link = LinkSpec(1e-5, 0.99)
    early = execute(ghz_routed, NOISE, link).fidelity
    late = execute(ghz_routed, NOISE, link, measure_when_done=False).fidelity
    assert early >= late - 1e-12


def test_schedule_policy_validated(ghz_routed):
    d = gate_durations(ghz_routed, NOISE, IDEAL_LINK)
    with pytest.raises(ValueError):
        schedule(ghz_routed, d, "random")


def test_marginal_and_hellinger():
    p = np.arange(8, dtype=float)
    p /= p.sum()
    m = marginal(p, 3, [2, 0])
    t = p.reshape(2, 2, 2).sum(axis=1)  # [q0, q2]
    assert np.allclose(m, t.T.reshape(-1))
    q = np.full(4, 0.25)
    assert hellinger_fidelity(q, q) == pytest.approx(1.0)
    assert hellinger_fidelity(np.array([1.0, 0]), np.array([0, 1.0])) == 0.0


def test_link_spec_validation():
    with pytest.raises(ValueError):
        LinkSpec(-1.0, 0.9)
    with pytest.raises(ValueError):
        LinkSpec(1e-6, 1.1)
