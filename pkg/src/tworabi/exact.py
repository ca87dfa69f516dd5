"""Numerically exact ground state of the truncated two-mode Rabi Hamiltonian."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .errors import InvalidParameters, NotConverged
from .fock import BasisKind, BasisSpec, QuantumState, expectation, parity_op
from .hamiltonian import ModelParams, build_hamiltonian

log = logging.getLogger(__name__)

# above this dimension the iterative Lanczos solver is used
DENSE_MAX_DIM = 600
DEGENERACY_GAP = 1e-12


@dataclass(frozen=True)
class TruncationConfig:
    n_start: int = 12
    n_cap: int = 96
    energy_tol: float = 1e-10

    def __post_init__(self):
        if not 1 <= self.n_start <= self.n_cap:
            raise InvalidParameters(f"need 1 <= n_start <= n_cap, got {self.n_start}, {self.n_cap}")
        if not self.energy_tol > 0:
            raise InvalidParameters(f"energy_tol must be positive, got {self.energy_tol}")

    def schedule(self) -> list[int]:
        cutoffs = [self.n_start]
        while cutoffs[-1] < self.n_cap:
            cutoffs.append(min(2 * cutoffs[-1], self.n_cap))
        return cutoffs


@dataclass(frozen=True, eq=False)
class GroundStateResult:
    energy: float
    state: QuantumState
    cutoff_used: int
    converged: bool
    energy_history: list[tuple[int, float]] = field(default_factory=list)
    residual: float = 0.0
    degenerate: bool = False


def _lowest_eigh(H, k: int) -> tuple[np.ndarray, np.ndarray]:
    dim = H.shape[0]
    k = min(k, dim)
    if dim <= DENSE_MAX_DIM or k >= dim - 1:
        vals, vecs = la.eigh(H.toarray(), subset_by_index=[0, k - 1])
        return vals, vecs
    # seeded generic start vector: reproducible, and overlaps both parity sectors
    v0 = np.random.default_rng(dim).standard_normal(dim).astype(complex)
    vals, vecs = sla.eigsh(H, k=k, which="SA", v0=v0, tol=0)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[i]) / vec[i])


def _parity_resolved(H, basis: BasisSpec) -> np.ndarray:
    """Ground vector of the parity -1 sector inside a degenerate ground doublet.

    Parity -1 under sigma_x (x) (-1)^(n1+n2) is the sector holding
    |0,0> (x) |g>, i.e. the decoupled ground state and the TRWA state. H
    commutes with P, so lifting the +1 sector by more than the spectral
    width leaves the wanted vector as the unique minimum.
    """
    P = parity_op(basis).matrix
    lift = 2.0 * abs(H).sum(axis=1).max() + 1.0  # exceeds the spectral radius
    shifted = H + 0.5 * lift * (sp.identity(basis.dim, format="csr") + P)
    _, vecs = _lowest_eigh(shifted.tocsr(), 1)
    return vecs[:, 0]


def solve_at_cutoff(p: ModelParams, basis: BasisSpec, k: int = 2):
    """Lowest ``k`` eigenpairs of the Hamiltonian at a fixed truncation."""
    H = build_hamiltonian(p, basis).matrix
    return _lowest_eigh(H, k)


def ground_state_at_cutoff(p: ModelParams, basis: BasisSpec) -> tuple[float, QuantumState, float, bool]:
    H = build_hamiltonian(p, basis).matrix
    vals, vecs = _lowest_eigh(H, 2)
    degenerate = len(vals) > 1 and vals[1] - vals[0] < DEGENERACY_GAP
    vec = _parity_resolved(H, basis) if degenerate else vecs[:, 0]
    vec = _fix_phase(vec / np.linalg.norm(vec))
    # Rayleigh quotient: rounding error scales with the occupied levels, not with ||H||
    energy = float(np.vdot(vec, H @ vec).real)
    residual = float(np.linalg.norm(H @ vec - energy * vec))
    return energy, QuantumState(basis, vec), residual, degenerate


def ground_state(
    p: ModelParams,
    cfg: TruncationConfig | None = None,
    basis_kind: BasisKind = BasisKind.SUPERMODE,
) -> GroundStateResult:
    """Ground eigenpair, doubling the per-mode cutoff until the energy settles.

    Returns the best available result with ``converged=False`` when the
    cutoff cap is reached first.
    """
    cfg = cfg or TruncationConfig()
    history: list[tuple[int, float]] = []
    result = None
    for n in cfg.schedule():
        basis = BasisSpec.square(n, basis_kind)
        energy, state, residual, degenerate = ground_state_at_cutoff(p, basis)
        history.append((n, energy))
        result = (energy, state, n, residual, degenerate)
        if len(history) > 1 and abs(history[-1][1] - history[-2][1]) < cfg.energy_tol:
            return GroundStateResult(energy, state, n, True, history, residual, degenerate)
    energy, state, n, residual, degenerate = result
    log.warning("ground state not converged at cutoff cap %d for %s", n, p)
    return GroundStateResult(energy, state, n, False, history, residual, degenerate)


def low_spectrum(
    p: ModelParams,
    cfg: TruncationConfig | None = None,
    k: int = 1,
    basis_kind: BasisKind = BasisKind.SUPERMODE,
) -> list[float]:
    """The ``k`` lowest eigenvalues, ascending, converged in the cutoff."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    cfg = cfg or TruncationConfig()
    prev = None
    for n in cfg.schedule():
        vals, _ = solve_at_cutoff(p, BasisSpec.square(n, basis_kind), k)
        if len(vals) == k and prev is not None and np.max(np.abs(vals - prev)) < cfg.energy_tol:
            return [float(v) for v in vals]
        prev = vals if len(vals) == k else None
    raise NotConverged(f"lowest {k} eigenvalues not converged by cutoff {cfg.n_cap}")


def parity_expectation(state: QuantumState) -> float:
    return float(expectation(state, parity_op(state.basis)).real)
