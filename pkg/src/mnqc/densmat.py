"""Dense density-matrix and Kraus-channel machinery.

Every physics module in the package goes through this file. States are
stored as full ``(D, D)`` complex arrays together with the list of
subsystem dimensions; operators are applied by contracting only the
targeted tensor legs, so a two-qubit gate on a 10-qubit register never
builds a 1024x1024 embedding.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.linalg import expm


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    trace: float = 1e-9
    positivity: float = 1e-9
    unitary: float = 1e-10
    completeness: float = 1e-9


TOL = Tolerances()


class DimensionError(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


@dataclass(frozen=True)
class HilbertLayout:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def __len__(self):
        return len(self.dims)

    def check_targets(self, targets) -> tuple[int, ...]:
        targets = tuple(int(t) for t in targets)
        if len(set(targets)) != len(targets):
            raise DimensionError(f"repeated subsystem index in {targets}")
        for t in targets:
            if not 0 <= t < len(self.dims):
                raise DimensionError(
                    f"subsystem index {t} out of range for {len(self.dims)} subsystems"
                )
        return targets

    def sub_dims(self, targets) -> tuple[int, ...]:
        return tuple(self.dims[t] for t in targets)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density operator over a composite space.

    ``normalized`` is False for heralded (projected, not yet renormalized)
    branches, whose trace lies in (0, 1].
    """

    layout: HilbertLayout
    data: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        n = self.layout.total
        if data.shape != (n, n):
            raise DimensionError(f"data shape {data.shape} does not match layout total {n}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, data, dims=None, normalized=True) -> "DensityMatrix":
        data = np.asarray(data, dtype=complex)
        if dims is None:
            n = data.shape[0]
            k = int(round(np.log2(n)))
            if 2**k != n:
                raise DimensionError("dims must be given for non-qubit registers")
            dims = (2,) * k
        return cls(HilbertLayout(tuple(dims)), data, normalized)

    @classmethod
    def from_ket(cls, ket, dims=None) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex).ravel()
        ket = ket / np.linalg.norm(ket)
        return cls.from_array(np.outer(ket, ket.conj()), dims)

    @classmethod
    def basis(cls, index, dims) -> "DensityMatrix":
        layout = HilbertLayout(tuple(dims))
        if isinstance(index, (tuple, list)):
            index = int(np.ravel_multi_index(tuple(index), layout.dims))
        data = np.zeros((layout.total, layout.total), dtype=complex)
        data[index, index] = 1.0
        return cls(layout, data)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def renormalized(self) -> "DensityMatrix":
        tr = self.trace()
        if tr <= 0:
            raise ValueError("cannot renormalize a state with zero trace")
        return DensityMatrix(self.layout, self.data / tr, True)

    def check(self, tol: Tolerances = TOL) -> None:
        """Raise ``ValueError`` if any density-matrix invariant is violated."""
        herm = np.max(np.abs(self.data - self.data.conj().T)) if self.data.size else 0.0
        if herm > tol.hermitian * max(1.0, np.max(np.abs(self.data))):
            raise ValueError(f"not Hermitian (max deviation {herm:.3e})")
        tr = self.trace()
        if self.normalized and abs(tr - 1.0) > tol.trace:
            raise ValueError(f"normalized state has trace {tr!r}")
        if not self.normalized and not (0.0 < tr <= 1.0 + tol.trace):
            raise ValueError(f"subnormalized state has trace {tr!r}")
        evals = np.linalg.eigvalsh((self.data + self.data.conj().T) / 2)
        if evals.min() < -tol.positivity:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely-positive map acting on subsystems of dimension ``dims``.

    Output dimensions equal input dimensions; loss channels that discard a
    port are modelled by tracing out that port explicitly instead.
    """

    dims: tuple[int, ...]
    kraus: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        n = int(np.prod(dims))
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in kraus:
            if k.shape != (n, n):
                raise DimensionError(f"Kraus operator shape {k.shape}, expected {(n, n)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "kraus", kraus)
        dev = self.completeness_deviation()
        if np.max(np.real(np.diag(dev))) > TOL.completeness:
            raise ValueError("Kraus set is not trace non-increasing")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def completeness_deviation(self) -> np.ndarray:
        total = sum(k.conj().T @ k for k in self.kraus)
        return total - np.eye(self.dim)

    @property
    def trace_preserving(self) -> bool:
        return bool(np.max(np.abs(self.completeness_deviation())) <= TOL.completeness)

    def superoperator(self) -> np.ndarray:
        """Row-major Liouville matrix: vec(K rho K^dag) = (K kron K*) vec(rho)."""
        return sum(np.kron(k, k.conj()) for k in self.kraus)

    def then(self, other: "QuantumChannel") -> "QuantumChannel":
        """Channel that applies ``self`` first and ``other`` second."""
        if other.dims != self.dims:
            raise DimensionError("cannot compose channels on different spaces")
        return QuantumChannel(self.dims, tuple(b @ a for b in other.kraus for a in self.kraus))

    @classmethod
    def from_unitary(cls, u, dims=None) -> "QuantumChannel":
        u = np.asarray(u, dtype=complex)
        if dims is None:
            dims = (2,) * int(round(np.log2(u.shape[0])))
        return cls(tuple(dims), (u,))

    @classmethod
    def identity(cls, dims) -> "QuantumChannel":
        return cls(tuple(dims), (np.eye(int(np.prod(dims))),))


# -- tensor-leg contraction helpers ---------------------------------------


def _apply_left(tensor: np.ndarray, op: np.ndarray, axes: tuple[int, ...], tdims) -> np.ndarray:
    """Contract ``op`` (as a matrix on ``tdims``) into the given tensor axes."""
    k = len(axes)
    op_t = op.reshape(tuple(tdims) * 2)
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_operator_data(data: np.ndarray, dims, op: np.ndarray, targets) -> np.ndarray:
    """Return ``O rho O^dag`` with ``O`` acting on ``targets``; raw arrays in and out."""
    n = len(dims)
    tdims = [dims[t] for t in targets]
    t = data.reshape(tuple(dims) * 2)
    t = _apply_left(t, op, tuple(targets), tdims)
    t = _apply_left(t, op.conj(), tuple(x + n for x in targets), tdims)
    return t.reshape(data.shape)


def apply_superop_data(data: np.ndarray, dims, superop: np.ndarray, targets) -> np.ndarray:
    """Apply a row-major Liouville matrix to the ``targets`` legs of ``data``."""
    n = len(dims)
    targets = tuple(targets)
    tdims = tuple(dims[t] for t in targets)
    k = len(targets)
    s = superop.reshape(tdims * 4)
    t = data.reshape(tuple(dims) * 2)
    axes = targets + tuple(x + n for x in targets)
    out = np.tensordot(s, t, axes=(list(range(2 * k, 4 * k)), list(axes)))
    return np.moveaxis(out, list(range(2 * k)), list(axes)).reshape(data.shape)


def embed_operator(op: np.ndarray, dims, targets) -> np.ndarray:
    """Full-space matrix of ``op`` acting on ``targets`` (identity elsewhere)."""
    total = int(np.prod(dims))
    eye = np.eye(total, dtype=complex).reshape(tuple(dims) * 2)
    return _apply_left(eye, np.asarray(op, dtype=complex), tuple(targets), [dims[t] for t in targets]).reshape(total, total)


# -- operations ------------------------------------------------------------


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(
        HilbertLayout(a.dims + b.dims),
        np.kron(a.data, b.data),
        a.normalized and b.normalized,
    )


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep`` (kept in given order)."""
    keep = rho.layout.check_targets(keep)
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    n = len(rho.dims)
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = [letters[n + i] if i in keep else rows[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = rho.data.reshape(rho.dims * 2)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    kept_dims = rho.layout.sub_dims(keep)
    d = int(np.prod(kept_dims))
    return DensityMatrix(HilbertLayout(kept_dims), reduced.reshape(d, d), rho.normalized)


def is_unitary(u: np.ndarray, tol: float = TOL.unitary) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0
    )


def apply_unitary(rho: DensityMatrix, u, targets) -> DensityMatrix:
    targets = rho.layout.check_targets(targets)
    u = np.asarray(u, dtype=complex)
    d = int(np.prod(rho.layout.sub_dims(targets)))
    if u.shape != (d, d):
        raise DimensionError(f"unitary of shape {u.shape} on targets of total dim {d}")
    if not is_unitary(u):
        raise NotUnitaryError("operator is not unitary within tolerance")
    return DensityMatrix(rho.layout, apply_operator_data(rho.data, rho.dims, u, targets), rho.normalized)


def apply_channel(rho: DensityMatrix, ch: QuantumChannel, targets) -> DensityMatrix:
    targets = rho.layout.check_targets(targets)
    if rho.layout.sub_dims(targets) != ch.dims:
        raise DimensionError(
            f"channel dims {ch.dims} do not match target dims {rho.layout.sub_dims(targets)}"
        )
    out = sum(apply_operator_data(rho.data, rho.dims, k, targets) for k in ch.kraus)
    return DensityMatrix(rho.layout, out, rho.normalized and ch.trace_preserving)


# -- standard channels and states -------------------------------------------

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_strings(n_qubits: int):
    for labels in itertools.product("IXYZ", repeat=n_qubits):
        yield "".join(labels), reduce(np.kron, (PAULI[c] for c in labels))


def depolarizing_channel(p: float, n_qubits: int = 1) -> QuantumChannel:
    """rho -> (1-p) rho + p I/d with d = 2**n_qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    d2 = 4**n_qubits
    kraus = []
    for label, mat in pauli_strings(n_qubits):
        w = 1 - p + p / d2 if set(label) == {"I"} else p / d2
        if w > 0:
            kraus.append(np.sqrt(w) * mat)
    return QuantumChannel((2,) * n_qubits, tuple(kraus))


def relaxation_dephasing_channel(t: float, T1: float, T2: float) -> QuantumChannel:
    """Amplitude damping composed with pure dephasing, in three-Kraus form.

    Excited population decays as exp(-t/T1); coherences as exp(-t/T2).
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    if T1 <= 0 or T2 <= 0:
        raise ValueError("T1 and T2 must be positive")
    if T2 > 2 * T1 * (1 + 1e-12):
        raise ValueError(f"T2={T2} exceeds 2*T1={2 * T1}")
    gamma = -np.expm1(-t / T1)
    # extra dephasing beyond the sqrt(1-gamma) coherence loss from damping
    lam = np.exp(-t * (1.0 / T2 - 0.5 / T1))
    # exp(-t/2T1) directly: sqrt(1 - gamma) cancels to 0 once gamma rounds to 1
    k0 = np.array([[1, 0], [0, np.exp(-0.5 * t / T1)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    kraus = [np.sqrt((1 + lam) / 2) * k0, np.sqrt((1 - lam) / 2) * PAULI["Z"] @ k0, k1]
    return QuantumChannel((2,), tuple(kraus))


def thermal_state(n_bar: float, d_f: int) -> DensityMatrix:
    """Truncated thermal state with geometric weights (n/(1+n))**k, renormalized."""
    if n_bar < 0:
        raise ValueError("mean photon number must be non-negative")
    if d_f < 2:
        raise ValueError("Fock truncation must be at least 2")
    k = np.arange(d_f)
    if n_bar == 0:
        w = (k == 0).astype(float)
    else:
        w = (n_bar / (1.0 + n_bar)) ** k
    return DensityMatrix(HilbertLayout((d_f,)), np.diag(w / w.sum()).astype(complex))


def annihilation(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)


def beamsplitter_unitary(transmission: float, d_f: int) -> np.ndarray:
    """Two-mode beamsplitter on a ``d_f x d_f`` Fock truncation.

    Generated as exp[theta (a^dag b - a b^dag)] with cos^2(theta) = T, which is
    exactly unitary on the truncated space and exact on every photon-number
    sector below the cutoff.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("transmission must lie in [0, 1]")
    theta = np.arccos(np.sqrt(transmission))
    a = annihilation(d_f)
    eye = np.eye(d_f)
    A = np.kron(a, eye)
    B = np.kron(eye, a)
    gen = theta * (A.conj().T @ B - A @ B.conj().T)
    return expm(gen)


_BELL = {
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}
BELL_LABELS = tuple(_BELL)


def bell_ket(label: str) -> np.ndarray:
    try:
        return _BELL[label.lower()].astype(complex)
    except KeyError:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}") from None


def bell_state(label: str = "phi+") -> DensityMatrix:
    return DensityMatrix.from_ket(bell_ket(label))


def werner_state(fidelity: float, label: str = "phi+") -> DensityMatrix:
    """Bell-diagonal state with weight F on ``label`` and (1-F)/3 on the others."""
    coeffs = {lab: (1 - fidelity) / 3 for lab in BELL_LABELS}
    coeffs[label.lower()] = fidelity
    return bell_diagonal_state(coeffs)


def bell_diagonal_state(coeffs: dict) -> DensityMatrix:
    data = sum(w * np.outer(bell_ket(lab), bell_ket(lab).conj()) for lab, w in coeffs.items())
    return DensityMatrix.from_array(data)


def bell_coefficients(rho: DensityMatrix) -> dict:
    return {lab: bell_fidelity(rho, lab) for lab in BELL_LABELS}


def bell_fidelity(rho: DensityMatrix, target: str = "psi+") -> float:
    if rho.dims != (2, 2):
        raise DimensionError(f"bell_fidelity needs a two-qubit state, got dims {rho.dims}")
    ket = bell_ket(target)
    return float(np.real(ket.conj() @ rho.data @ ket))


def state_fidelity_pure(rho: DensityMatrix, ket) -> float:
    ket = np.asarray(ket, dtype=complex).ravel()
    return float(np.real(ket.conj() @ rho.data @ ket))


def choi_state(ch: QuantumChannel) -> np.ndarray:
    """Normalized Choi matrix (I kron channel)(|Phi><Phi|) with the reference first."""
    d = ch.dim
    phi = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    rho = np.outer(phi, phi.conj())
    dims = (d, d)
    return sum(apply_operator_data(rho, dims, k, (1,)) for k in ch.kraus)


def process_fidelity(actual: QuantumChannel, ideal_unitary) -> float:
    """Entanglement fidelity of ``actual`` with respect to a target unitary."""
    u = np.asarray(ideal_unitary, dtype=complex)
    d = actual.dim
    if u.shape != (d, d):
        raise DimensionError(f"ideal unitary shape {u.shape} for channel of dim {d}")
    # (I kron U)|Phi> = sum_i |i> U|i>, flattened row-major
    phi_u = np.kron(np.eye(d), u) @ (np.eye(d, dtype=complex).ravel() / np.sqrt(d))
    return float(np.real(phi_u.conj() @ choi_state(actual) @ phi_u))


def random_density_matrix(dims, rng, rank=None) -> DensityMatrix:
    """Ginibre-distributed random state (test and study helper)."""
    d = int(np.prod(dims))
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DensityMatrix(HilbertLayout(tuple(dims)), m / np.trace(m).real)


def random_unitary(d: int, rng) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(dims, n_kraus: int, rng) -> QuantumChannel:
    """Random CPTP map from a Stiefel isometry (test helper)."""
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    d = int(np.prod(dims))
    v = random_unitary(d * n_kraus, rng)[:, :d]
    return QuantumChannel(dims, tuple(v[i * d:(i + 1) * d] for i in range(n_kraus)))
