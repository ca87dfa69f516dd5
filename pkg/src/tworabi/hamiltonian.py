"""Two-mode Rabi Hamiltonian in the local (a, b) and supermode (A, B) bases.

Units: everything is measured in units of the bare resonator frequency
``omega`` (conventionally 1). The supermodes are A = (a + b)/sqrt(2) and
B = (a - b)/sqrt(2), with frequencies omega + J and omega - J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import BasisMismatch, InvalidParameters
from .fock import (
    BasisKind,
    BasisSpec,
    Mode,
    OperatorMatrix,
    annihilation_op,
    number_op,
    pauli_op,
)


@dataclass(frozen=True)
class ModelParams:
    omega: float = 1.0
    Omega: float = 0.1
    g: float = 0.0
    J: float = 0.0

    def __post_init__(self):
        vals = (self.omega, self.Omega, self.g, self.J)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameters(f"non-finite parameter in {self}")
        if self.omega <= 0:
            raise InvalidParameters(f"omega must be positive, got {self.omega}")
        if self.Omega < 0:
            raise InvalidParameters(f"Omega must be non-negative, got {self.Omega}")
        if self.g < 0:
            raise InvalidParameters(f"g must be non-negative, got {self.g}")
        if self.omega - abs(self.J) <= 0:
            raise InvalidParameters(
                f"supermode frequency omega - |J| = {self.omega - abs(self.J)} must be positive"
            )

    def with_g(self, g: float) -> "ModelParams":
        return replace(self, g=g)

    @property
    def freq_a(self) -> float:
        """Frequency of the symmetric supermode A."""
        return self.omega + self.J

    @property
    def freq_b(self) -> float:
        return self.omega - self.J


def _require(basis: BasisSpec, kind: BasisKind):
    if basis.kind is not kind:
        raise BasisMismatch(f"expected a {kind.value} basis, got {basis.kind.value}")


def build_local_hamiltonian(p: ModelParams, basis: BasisSpec) -> OperatorMatrix:
    """H = w a'a + (Omega/2) sx + (g/2)(a' + a) sz + w b'b + J (a'b + b'a)."""
    _require(basis, BasisKind.LOCAL)
    a = annihilation_op(basis, Mode.MODE1)
    b = annihilation_op(basis, Mode.MODE2)
    sx, sz = pauli_op(basis, "X"), pauli_op(basis, "Z")
    m = (
        p.omega * number_op(basis, Mode.MODE1).matrix
        + p.omega * number_op(basis, Mode.MODE2).matrix
        + 0.5 * p.Omega * sx.matrix
        + 0.5 * p.g * ((a.matrix + a.matrix.T) @ sz.matrix)
        + p.J * (a.matrix.T @ b.matrix + b.matrix.T @ a.matrix)
    )
    return OperatorMatrix(basis, m, hermitian=True)


def build_supermode_hamiltonian(p: ModelParams, basis: BasisSpec) -> OperatorMatrix:
    """H = (w+J) A'A + (w-J) B'B + (Omega/2) sx + g/(2 sqrt 2) (A + A' + B + B') sz."""
    _require(basis, BasisKind.SUPERMODE)
    A = annihilation_op(basis, Mode.MODE1).matrix
    B = annihilation_op(basis, Mode.MODE2).matrix
    sx, sz = pauli_op(basis, "X").matrix, pauli_op(basis, "Z").matrix
    m = (
        p.freq_a * number_op(basis, Mode.MODE1).matrix
        + p.freq_b * number_op(basis, Mode.MODE2).matrix
        + 0.5 * p.Omega * sx
        + p.g / (2.0 * math.sqrt(2.0)) * ((A + A.T + B + B.T) @ sz)
    )
    return OperatorMatrix(basis, m, hermitian=True)


def build_hamiltonian(p: ModelParams, basis: BasisSpec) -> OperatorMatrix:
    if basis.kind is BasisKind.LOCAL:
        return build_local_hamiltonian(p, basis)
    return build_supermode_hamiltonian(p, basis)


def local_number_op_in_supermode_basis(basis: BasisSpec, which: str) -> OperatorMatrix:
    """Local occupation a'a or b'b written in supermode operators.

    ``which`` is ``"a"`` (system resonator, (A'+B')(A+B)/2) or ``"b"``
    (auxiliary resonator, (A'-B')(A-B)/2).
    """
    _require(basis, BasisKind.SUPERMODE)
    A = annihilation_op(basis, Mode.MODE1).matrix
    B = annihilation_op(basis, Mode.MODE2).matrix
    key = which.lower().removesuffix("_res")
    if key == "a":
        low = A + B
    elif key == "b":
        low = A - B
    else:
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")
    return OperatorMatrix(basis, 0.5 * (low.conj().T @ low), hermitian=True)


def local_number_op(basis: BasisSpec, which: str) -> OperatorMatrix:
    """Local occupation in whichever basis ``basis`` is."""
    if basis.kind is BasisKind.SUPERMODE:
        return local_number_op_in_supermode_basis(basis, which)
    key = which.lower().removesuffix("_res")
    if key not in ("a", "b"):
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")
    return number_op(basis, Mode.MODE1 if key == "a" else Mode.MODE2)
