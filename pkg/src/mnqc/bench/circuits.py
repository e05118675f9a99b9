"""Benchmark circuits: GHZ, Bernstein-Vazirani, QFT, ripple-carry ADDER, QV model circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import densmat as dm

_S2 = 1 / math.sqrt(2)

FIXED_1Q = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": dm.PAULI["X"],
    "y": dm.PAULI["Y"],
    "z": dm.PAULI["Z"],
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]),
}
FIXED_2Q = {
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

# (single-qubit basis gates, CX gates) when lowered to an IBM-style basis
BASIS_COST = {"cx": (0, 1), "cz": (2, 1), "cp": (3, 2), "swap": (0, 3), "su4": (8, 3)}


@dataclass(frozen=True, eq=False)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, repr=False)
    internode: bool = False

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def unitary(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        n = self.name
        if n in FIXED_1Q:
            return FIXED_1Q[n]
        if n in FIXED_2Q:
            return FIXED_2Q[n]
        if n == "rz":
            (th,) = self.params
            return np.diag([np.exp(-0.5j * th), np.exp(0.5j * th)])
        if n == "ry":
            (th,) = self.params
            c, s = math.cos(th / 2), math.sin(th / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if n == "p":
            (th,) = self.params
            return np.diag([1, np.exp(1j * th)])
        if n == "cp":
            (th,) = self.params
            return np.diag([1, 1, 1, np.exp(1j * th)])
        raise ValueError(f"gate {n!r} has no unitary")

    def cx_count(self) -> int:
        return BASIS_COST[self.name][1] if self.arity == 2 else 0

    def remapped(self, qubits, internode=False) -> "Gate":
        return Gate(self.name, tuple(qubits), self.params, self.matrix, internode)


@dataclass(eq=False)
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    # logical qubit -> physical qubit at the end of the circuit
    final_layout: tuple[int, ...] | None = None

    def add(self, name, *qubits, params=(), matrix=None) -> "Circuit":
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} out of range for {self.n_qubits}-qubit circuit")
        self.gates.append(Gate(name, tuple(qubits), tuple(params), matrix))
        return self

    def count(self, name: str) -> int:
        return sum(1 for g in self.gates if g.name == name)

    @property
    def layout(self) -> tuple[int, ...]:
        return self.final_layout or tuple(range(self.n_qubits))


def toffoli(circ: Circuit, a: int, b: int, c: int) -> None:
    """Textbook 6-CX Toffoli with controls a, b and target c."""
    circ.add("h", c)
    circ.add("cx", b, c)
    circ.add("tdg", c)
    circ.add("cx", a, c)
    circ.add("t", c)
    circ.add("cx", b, c)
    circ.add("tdg", c)
    circ.add("cx", a, c)
    circ.add("t", b)
    circ.add("t", c)
    circ.add("h", c)
    circ.add("cx", a, b)
    circ.add("t", a)
    circ.add("tdg", b)
    circ.add("cx", a, b)


def ghz(n: int = 10) -> Circuit:
    c = Circuit(n, metadata={"name": "ghz", "score": "fidelity"})
    c.add("h", 0)
    for q in range(n - 1):
        c.add("cx", q, q + 1)
    return c


def bernstein_vazirani(n: int = 10, secret: str | None = None) -> Circuit:
    """Data qubits 0..n-2, ancilla n-1; the measured data register equals ``secret``."""
    secret = "1" * (n - 1) if secret is None else secret
    if len(secret) != n - 1 or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a {n - 1}-bit string")
    anc = n - 1
    c = Circuit(n, metadata={"name": "bv", "score": "success", "secret": secret})
    c.add("x", anc)
    for q in range(n):
        c.add("h", q)
    for q, bit in enumerate(secret):
        if bit == "1":
            c.add("cx", q, anc)
    for q in range(n - 1):
        c.add("h", q)
    return c


def qft(n: int = 10, input_state: int = 0b1011001110, swaps: bool = True) -> Circuit:
    """QFT applied to the computational basis state ``input_state`` (qubit 0 = MSB)."""
    c = Circuit(n, metadata={"name": "qft", "score": "fidelity", "input_state": input_state})
    for q in range(n):
        if (input_state >> (n - 1 - q)) & 1:
            c.add("x", q)
    for j in range(n):
        c.add("h", j)
        for k in range(j + 1, n):
            c.add("cp", k, j, params=(math.pi / 2 ** (k - j),))
    if swaps:
        for q in range(n // 2):
            c.add("swap", q, n - 1 - q)
    return c


ADDER_LAYOUT = ("c0", "b0", "a0", "b1", "a1", "b2", "a2", "b3", "a3", "z")


def adder(a: int = 11, b: int = 6) -> Circuit:
    """Cuccaro ripple-carry adder on 4-bit registers; b <- a + b, z <- carry.

    Qubits interleave as c0, b0, a0, b1, a1, b2, a2, b3, a3, z so that every
    MAJ/UMA block touches neighbouring indices.
    """
    if not (0 <= a < 16 and 0 <= b < 16):
        raise ValueError("adder inputs must be 4-bit integers")
    idx = {name: i for i, name in enumerate(ADDER_LAYOUT)}
    c = Circuit(10, metadata={"name": "adder", "score": "fidelity", "a": a, "b": b})
    for bit in range(4):
        if (a >> bit) & 1:
            c.add("x", idx[f"a{bit}"])
        if (b >> bit) & 1:
            c.add("x", idx[f"b{bit}"])

    def maj(x, y, z):
        c.add("cx", z, y)
        c.add("cx", z, x)
        toffoli(c, x, y, z)

    def uma(x, y, z):
        toffoli(c, x, y, z)
        c.add("cx", z, x)
        c.add("cx", x, y)

    carries = ["c0", "a0", "a1", "a2"]
    for i in range(4):
        maj(idx[carries[i]], idx[f"b{i}"], idx[f"a{i}"])
    c.add("cx", idx["a3"], idx["z"])
    for i in reversed(range(4)):
        uma(idx[carries[i]], idx[f"b{i}"], idx[f"a{i}"])
    return c


def adder_expected_bits(a: int, b: int) -> dict:
    s = a + b
    out = {"c0": 0, "z": (s >> 4) & 1}
    for bit in range(4):
        out[f"a{bit}"] = (a >> bit) & 1
        out[f"b{bit}"] = (s >> bit) & 1
    return out


def qv_model_circuit(width: int, rng: np.random.Generator, depth: int | None = None) -> Circuit:
    """Square model circuit: per layer a random pairing with Haar SU(4) on each pair."""
    depth = width if depth is None else depth
    c = Circuit(width, metadata={"name": "qv", "score": "heavy", "width": width})
    for _ in range(depth):
        perm = rng.permutation(width)
        for k in range(width // 2):
            q1, q2 = int(perm[2 * k]), int(perm[2 * k + 1])
            c.add("su4", q1, q2, matrix=dm.random_unitary(4, rng))
    return c


def lower_to_cx(circuit: Circuit) -> Circuit:
    """Rewrite CZ, CP and SWAP as CX plus single-qubit gates; other gates pass through."""
    out = Circuit(circuit.n_qubits, metadata=dict(circuit.metadata), final_layout=circuit.final_layout)
    for g in circuit.gates:
        if g.name == "cz":
            a, b = g.qubits
            out.add("h", b).add("cx", a, b).add("h", b)
        elif g.name == "cp":
            a, b = g.qubits
            (th,) = g.params
            out.add("p", a, params=(th / 2,))
            out.add("cx", a, b)
            out.add("p", b, params=(-th / 2,))
            out.add("cx", a, b)
            out.add("p", b, params=(th / 2,))
        elif g.name == "swap":
            a, b = g.qubits
            out.add("cx", a, b).add("cx", b, a).add("cx", a, b)
        else:
            out.gates.append(g)
    return out


BENCHMARKS = ("ghz", "bv", "qft", "adder", "qv")


def build_benchmark(name: str, params: dict | None = None) -> Circuit:
    params = dict(params or {})
    if name == "ghz":
        return ghz(params.get("n", 10))
    if name == "bv":
        return bernstein_vazirani(params.get("n", 10), params.get("secret"))
    if name == "qft":
        return qft(params.get("n", 10), params.get("input_state", 0b1011001110), params.get("swaps", True))
    if name == "adder":
        return adder(params.get("a", 11), params.get("b", 6))
    if name == "qv":
        rng = np.random.default_rng(params.get("seed", 0))
        return qv_model_circuit(params.get("width", 10), rng)
    raise ValueError(f"unknown benchmark {name!r}; expected one of {BENCHMARKS}")
