import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mnqc.bench.circuits import (
    ADDER_LAYOUT,
    BENCHMARKS,
    Circuit,
    adder,
    adder_expected_bits,
    bernstein_vazirani,
    build_benchmark,
    ghz,
    lower_to_cx,
    qft,
    qv_model_circuit,
    toffoli,
)
from mnqc.bench.executor import ideal_statevector


def unitary_of(circ):
    """Full unitary from statevectors of every basis input (small circuits only)."""
    n = circ.n_qubits
    cols = []
    for i in range(2**n):
        prep = Circuit(n)
        for q in range(n):
            if (i >> (n - 1 - q)) & 1:
                prep.add("x", q)
        prep.gates.extend(circ.gates)
        cols.append(ideal_statevector(prep))
    return np.array(cols).T


def test_ghz_state():
    psi = ideal_statevector(ghz(5))
    expect = np.zeros(32)
    expect[0] = expect[-1] = 1 / math.sqrt(2)
    assert np.allclose(psi, expect)


@given(st.text("01", min_size=5, max_size=5))
def test_bv_recovers_secret(secret):
    c = bernstein_vazirani(6, secret)
    probs = np.abs(ideal_statevector(c)) ** 2
    data = probs.reshape(2**5, 2).sum(axis=1)
    assert data[int(secret, 2)] == pytest.approx(1.0)


def test_qft_matches_dft():
    n = 4
    c = qft(n, input_state=0)
    c.gates = [g for g in c.gates if g.name != "x"]
    u = unitary_of(c)
    N = 2**n
    dft = np.exp(2j * np.pi * np.outer(np.arange(N), np.arange(N)) / N) / math.sqrt(N)
    assert np.allclose(u, dft, atol=1e-12)


def test_qft_input_preparation():
    c = qft(10)
    xs = [g.qubits[0] for g in c.gates if g.name == "x"]
    assert sum(1 << (9 - q) for q in xs) == 0b1011001110


def test_toffoli_truth_table():
    c = Circuit(3)
    toffoli(c, 0, 1, 2)
    u = unitary_of(c)
    expect = np.eye(8)
    expect[[6, 7]] = expect[[7, 6]]
    assert np.allclose(u, expect, atol=1e-12)
    assert c.count("cx") == 6


@pytest.mark.parametrize("a,b", [(11, 6), (0, 0), (15, 15), (7, 9), (3, 12)])
def test_adder_computes_sum(a, b):
    probs = np.abs(ideal_statevector(adder(a, b))) ** 2
    k = int(np.argmax(probs))
    assert probs[k] == pytest.approx(1.0)
    bits = {name: (k >> (9 - i)) & 1 for i, name in enumerate(ADDER_LAYOUT)}
    assert bits == adder_expected_bits(a, b)


def test_adder_rejects_wide_inputs():
    with pytest.raises(ValueError):
        adder(16, 0)


def random_circuit(n, rng, size):
    c = Circuit(n)
    for _ in range(size):
        kind = rng.integers(5)
        a, b = rng.choice(n, 2, replace=False)
        if kind == 0:
            c.add("h", int(a))
        elif kind == 1:
            c.add("cx", int(a), int(b))
        elif kind == 2:
            c.add("cz", int(a), int(b))
        elif kind == 3:
            c.add("cp", int(a), int(b), params=(float(rng.uniform(-3, 3)),))
        else:
            c.add("swap", int(a), int(b))
    return c


@given(st.integers(0, 2**32 - 1))
def test_lowering_preserves_unitary(seed):
    c = random_circuit(3, np.random.default_rng(seed), 8)
    low = lower_to_cx(c)
    assert {g.name for g in low.gates if g.arity == 2} <= {"cx"}
    assert np.allclose(unitary_of(low), unitary_of(c), atol=1e-10)


def test_qv_model_circuit_shape():
    c = qv_model_circuit(5, np.random.default_rng(0))
    assert len(c.gates) == 5 * 2
    assert all(g.name == "su4" and g.unitary().shape == (4, 4) for g in c.gates)


def test_build_benchmark_names():
    for name in BENCHMARKS:
        assert build_benchmark(name).n_qubits == 10
    with pytest.raises(ValueError):
        build_benchmark("shor")


def test_qubit_range_checked():
    with pytest.raises(ValueError):
        Circuit(2).add("cx", 0, 2)
    with pytest.raises(ValueError):
        bernstein_vazirani(4, "11")
