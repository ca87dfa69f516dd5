"""Operators and states for a qubit coupled to two truncated bosonic modes.

Basis ordering is qubit-major, then mode 1, then mode 2::

    index = q * n1_max * n2_max + n1 * n2_max + n2

with ``q = 0`` for |up> and ``q = 1`` for |down> (sigma_z eigenbasis). This is
exactly the ordering of ``kron(qubit, mode1, mode2)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatch, TruncationInsufficient


class BasisKind(enum.Enum):
    LOCAL = "local"  # modes (a, b)
    SUPERMODE = "supermode"  # modes (A, B)


class Mode(enum.Enum):
    MODE1 = 1
    MODE2 = 2


class Qubit(enum.Enum):
    UP = 0
    DOWN = 1


HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class BasisSpec:
    n1_max: int
    n2_max: int
    kind: BasisKind = BasisKind.LOCAL

    def __post_init__(self):
        for name in ("n1_max", "n2_max"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")

    @classmethod
    def square(cls, n_max: int, kind: BasisKind = BasisKind.LOCAL) -> "BasisSpec":
        return cls(n_max, n_max, kind)

    @property
    def dim(self) -> int:
        return 2 * self.n1_max * self.n2_max

    def index(self, qubit: int, n1: int, n2: int) -> int:
        if not (0 <= qubit < 2 and 0 <= n1 < self.n1_max and 0 <= n2 < self.n2_max):
            raise IndexError(f"basis label out of range: {(qubit, n1, n2)}")
        return (qubit * self.n1_max + n1) * self.n2_max + n2

    def label(self, index: int) -> tuple[int, int, int]:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} outside [0, {self.dim})")
        rest, n2 = divmod(index, self.n2_max)
        qubit, n1 = divmod(rest, self.n1_max)
        return qubit, n1, n2

    def mode_size(self, which: Mode) -> int:
        return self.n1_max if which is Mode.MODE1 else self.n2_max


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A sparse matrix tagged with the basis it acts on."""

    basis: BasisSpec
    matrix: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise BasisMismatch(f"matrix shape {m.shape} does not match basis dim {self.basis.dim}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian and anti_hermitian_norm(m) >= HERMITIAN_TOL:
            raise ValueError("operator flagged Hermitian but M - M^dagger is not negligible")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.matrix.conj().T.tocsr(), self.hermitian)

    def _check(self, other: "OperatorMatrix"):
        if self.basis != other.basis:
            raise BasisMismatch(f"{self.basis} vs {other.basis}")

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.basis, self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.basis, self.matrix - other.matrix, self.hermitian and other.hermitian)

    def __matmul__(self, other):
        if isinstance(other, QuantumState):
            if other.basis != self.basis:
                raise BasisMismatch(f"{self.basis} vs {other.basis}")
            return QuantumState(self.basis, self.matrix @ other.amplitudes)
        self._check(other)
        return OperatorMatrix(self.basis, self.matrix @ other.matrix)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        herm = self.hermitian and scalar.imag == 0
        return OperatorMatrix(self.basis, self.matrix * scalar, herm)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def anti_hermitian_norm(m) -> float:
    """Largest entry modulus of ``M - M^dagger``."""
    diff = (m - m.conj().T).tocoo()
    return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


@dataclass(frozen=True, eq=False)
class QuantumState:
    basis: BasisSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.basis.dim:
            raise BasisMismatch(f"{amps.shape[0]} amplitudes for basis of dim {self.basis.dim}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm**2 - 1.0) < NORM_TOL

    def normalized(self) -> "QuantumState":
        return QuantumState(self.basis, self.amplitudes / self.norm)

    def amplitude(self, qubit: int, n1: int, n2: int) -> complex:
        return complex(self.amplitudes[self.basis.index(qubit, n1, n2)])


def _mode_lowering(n: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")


def _embed(basis: BasisSpec, qubit_op, mode1_op, mode2_op) -> sp.csr_matrix:
    q = sp.identity(2, format="csr") if qubit_op is None else sp.csr_matrix(qubit_op)
    m1 = sp.identity(basis.n1_max, format="csr") if mode1_op is None else mode1_op
    m2 = sp.identity(basis.n2_max, format="csr") if mode2_op is None else mode2_op
    return sp.kron(sp.kron(q, m1), m2, format="csr").astype(complex)


def annihilation_op(basis: BasisSpec, which: Mode) -> OperatorMatrix:
    """Truncated lowering operator on one mode, identity elsewhere."""
    low = _mode_lowering(basis.mode_size(which))
    if which is Mode.MODE1:
        return OperatorMatrix(basis, _embed(basis, None, low, None))
    return OperatorMatrix(basis, _embed(basis, None, None, low))


def creation_op(basis: BasisSpec, which: Mode) -> OperatorMatrix:
    return annihilation_op(basis, which).dag()


def number_op(basis: BasisSpec, which: Mode) -> OperatorMatrix:
    n = sp.diags(np.arange(basis.mode_size(which), dtype=float), format="csr")
    if which is Mode.MODE1:
        return OperatorMatrix(basis, _embed(basis, None, n, None), hermitian=True)
    return OperatorMatrix(basis, _embed(basis, None, None, n), hermitian=True)


def identity_op(basis: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(basis, sp.identity(basis.dim, dtype=complex, format="csr"), hermitian=True)


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_op(basis: BasisSpec, which: str) -> OperatorMatrix:
    """Pauli matrix in the sigma_z eigenbasis (|up>, |down>) tensored with mode identities."""
    try:
        mat = _PAULI[which.upper()]
    except KeyError:
        raise ValueError(f"unknown Pauli operator {which!r}") from None
    return OperatorMatrix(basis, _embed(basis, mat, None, None), hermitian=True)


def parity_op(basis: BasisSpec) -> OperatorMatrix:
    """sigma_x (x) (-1)^(n1 + n2), the Z2 symmetry of the Rabi Hamiltonians."""
    s1 = sp.diags((-1.0) ** np.arange(basis.n1_max), format="csr")
    s2 = sp.diags((-1.0) ** np.arange(basis.n2_max), format="csr")
    return OperatorMatrix(basis, _embed(basis, _PAULI["X"], s1, s2), hermitian=True)


# qubit vectors in the sigma_z eigenbasis
UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)
GROUND = (UP - DOWN) / np.sqrt(2.0)  # sigma_x |g> = -|g>
EXCITED = (UP + DOWN) / np.sqrt(2.0)


def coherent_amplitudes(alpha: float, n_max: int) -> np.ndarray:
    """<n|alpha> for n = 0 .. n_max-1 (real alpha), without renormalization."""
    amps = np.empty(n_max)
    amps[0] = np.exp(-0.5 * alpha * alpha)
    for n in range(1, n_max):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    return amps


def coherent_cutoff_ok(alpha: float, n_max: int) -> bool:
    a = abs(alpha)
    return a * a + 6.0 * a + 10.0 <= n_max


def product_state(basis: BasisSpec, qubit_vec, mode1_vec, mode2_vec) -> QuantumState:
    return QuantumState(basis, np.kron(np.kron(qubit_vec, mode1_vec), mode2_vec))


def fock_state(basis: BasisSpec, qubit: Qubit | int, n1: int, n2: int) -> QuantumState:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(Qubit(qubit).value, n1, n2)] = 1.0
    return QuantumState(basis, amps)


def coherent_state(
    basis: BasisSpec,
    alpha1: float,
    alpha2: float,
    qubit: Qubit | np.ndarray = Qubit.UP,
    *,
    allow_truncation: bool = False,
) -> QuantumState:
    """Qubit state times |alpha1> |alpha2>, renormalized after truncation.

    ``qubit`` is a :class:`Qubit` label or an explicit 2-vector. Raises
    :class:`TruncationInsufficient` when a cutoff is too small for its
    amplitude unless ``allow_truncation`` is set.
    """
    if not allow_truncation:
        for alpha, n in ((alpha1, basis.n1_max), (alpha2, basis.n2_max)):
            if not coherent_cutoff_ok(alpha, n):
                raise TruncationInsufficient(
                    f"cutoff {n} too small for coherent amplitude {alpha} (need >= {alpha**2 + 6 * abs(alpha) + 10:.1f})"
                )
    if isinstance(qubit, Qubit):
        qvec = UP if qubit is Qubit.UP else DOWN
    else:
        qvec = np.asarray(qubit, dtype=complex)
    state = product_state(
        basis, qvec, coherent_amplitudes(alpha1, basis.n1_max), coherent_amplitudes(alpha2, basis.n2_max)
    )
    return state.normalized()


def _check_pair(b1: BasisSpec, b2: BasisSpec):
    if b1 != b2:
        raise BasisMismatch(f"{b1} vs {b2}")


def expectation(state: QuantumState, op: OperatorMatrix) -> complex:
    _check_pair(state.basis, op.basis)
    psi = state.amplitudes
    return complex(np.vdot(psi, op.matrix @ psi))


def overlap(s1: QuantumState, s2: QuantumState) -> complex:
    """<s1|s2>, conjugating s1."""
    _check_pair(s1.basis, s2.basis)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: QuantumState, s2: QuantumState) -> float:
    return abs(overlap(s1, s2)) ** 2
