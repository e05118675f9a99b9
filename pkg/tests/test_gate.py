import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mnqc import densmat as dm
from mnqc.distill import CNOT, NoiseParams
from mnqc.gate import (
    depolarizing_for_process_fidelity,
    dumps_record,
    effective_link_channel,
    spectator_decay_factor,
    teleported_cx,
)

NOISELESS = NoiseParams(T1=math.inf, T2=math.inf, depolarizing_prob=0.0)


def test_perfect_pair_gives_exact_cx():
    res = teleported_cx(dm.bell_state("phi+"), NOISELESS)
    assert res.process_fidelity == pytest.approx(1.0, abs=1e-9)
    assert res.gate_time == pytest.approx(2 * NOISELESS.local_gate_time)


@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_bell_diagonal_pair_fidelity_passes_through(raw):
    # each Bell error of the pair becomes a distinct non-identity Pauli on the output
    c = np.array(raw) / sum(raw)
    rho = dm.bell_diagonal_state(dict(zip(dm.BELL_LABELS, c)))
    res = teleported_cx(rho, NOISELESS)
    assert res.process_fidelity == pytest.approx(c[0], abs=1e-10)


def test_effective_channel_is_trace_preserving():
    res = teleported_cx(dm.werner_state(0.9), NoiseParams())
    assert res.effective_channel.trace_preserving
    assert dm.process_fidelity(res.effective_channel, CNOT) == pytest.approx(res.process_fidelity, abs=1e-10)


def test_local_noise_lowers_fidelity():
    ideal = teleported_cx(dm.bell_state("phi+"), NOISELESS).process_fidelity
    noisy = teleported_cx(dm.bell_state("phi+"), NoiseParams(depolarizing_prob=1e-2)).process_fidelity
    assert noisy < ideal


def test_measurement_latency_adds_time_and_error():
    fast = teleported_cx(dm.bell_state("phi+"), NoiseParams())
    slow = teleported_cx(dm.bell_state("phi+"), NoiseParams(), measurement_time=1e-6, ep_delivery_time=1e-6)
    assert slow.gate_time == pytest.approx(fast.gate_time + 3e-6)
    assert slow.process_fidelity < fast.process_fidelity


@given(st.floats(1 / 16, 1.0))
def test_depolarizing_inversion(f):
    p = depolarizing_for_process_fidelity(f)
    assert dm.process_fidelity(dm.depolarizing_channel(p, 2), np.eye(4)) == pytest.approx(f, abs=1e-12)


def test_unreachable_fidelity():
    with pytest.raises(ValueError):
        depolarizing_for_process_fidelity(0.0)


def test_effective_link_channel():
    bundle = effective_link_channel(0.9, 1e-6, NoiseParams())
    assert dm.process_fidelity(bundle.gate, CNOT) == pytest.approx(0.9, abs=1e-12)
    assert bundle.gate_superop().shape == (16, 16)
    with pytest.raises(ValueError):
        effective_link_channel(1.5, 1e-6)


def test_spectator_decay_factor():
    noise = NoiseParams()
    assert spectator_decay_factor(1e-4, noise) == pytest.approx(math.exp(-1e-4 / noise.t_star))


def test_record_serialization():
    res = teleported_cx(dm.bell_state("phi+"), NOISELESS)
    rec = json.loads(dumps_record(res.record(label="x")))
    assert rec == {"label": "x", "t_ll_seconds": res.gate_time, "f_ll": res.process_fidelity}
