"""Coupling-strength detection through the auxiliary resonator occupation.

The observable is <n_b> = <b'b> in the ground state. Under the TRWA it is
(xi_A - xi_B)**2 / 2, which grows monotonically with g whenever J != 0, so a
measured occupation can be inverted for g.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    InvalidParameters,
    NonMonotoneBracket,
    NotConverged,
    OutOfRange,
    SingularJacobian,
    TwoRabiError,
)
from .exact import GroundStateResult, TruncationConfig, ground_state
from .fock import BasisKind, coherent_cutoff_ok, expectation, fidelity
from .hamiltonian import ModelParams, local_number_op
from .trwa import (
    CONVENTIONS,
    SQRT2,
    TrwaSolution,
    build_trwa_state,
    denominators,
    rwa_ground,
    solve_self_consistent,
)

JACOBIAN_COND_MAX = 1e12
INVERSION_TOL = 1e-10


def nb_trwa(sol: TrwaSolution) -> float:
    return 0.5 * (sol.xi_a - sol.xi_b) ** 2


def na_trwa(sol: TrwaSolution) -> float:
    return 0.5 * (sol.xi_a + sol.xi_b) ** 2


def solution_derivatives(p: ModelParams, sol: TrwaSolution) -> tuple[float, float, float]:
    """(d xi_A/dg, d xi_B/dg, d eta/dg) by implicit differentiation.

    Residuals F = (xi_A - c/d_A, xi_B - c/d_B, eta - exp(-2(xi_A^2 + xi_B^2)))
    with c = sqrt(2) g / 4 and d_k = w_k -/+ eta*Omega; solve dF/dx . dx/dg = -dF/dg.
    """
    s = CONVENTIONS[sol.convention]
    da, db = denominators(p, sol.eta, sol.convention)
    c = SQRT2 * p.g / 4.0
    e = math.exp(-2.0 * (sol.xi_a**2 + sol.xi_b**2))
    jac = np.array(
        [
            [1.0, 0.0, c * s * p.Omega / da**2],
            [0.0, 1.0, c * s * p.Omega / db**2],
            [4.0 * sol.xi_a * e, 4.0 * sol.xi_b * e, 1.0],
        ]
    )
    rhs = np.array([SQRT2 / (4.0 * da), SQRT2 / (4.0 * db), 0.0])
    cond = np.linalg.cond(jac)
    if not np.isfinite(cond) or cond > JACOBIAN_COND_MAX:
        raise SingularJacobian(f"self-consistency Jacobian condition number {cond:.3e}")
    dxa, dxb, deta = np.linalg.solve(jac, rhs)
    return float(dxa), float(dxb), float(deta)


def nb_slope(p: ModelParams, sol: TrwaSolution) -> float:
    """d<n_b>/dg = (d xi_A/dg - d xi_B/dg)(xi_A - xi_B)."""
    dxa, dxb, _ = solution_derivatives(p, sol)
    return (dxa - dxb) * (sol.xi_a - sol.xi_b)


def nb_from_state(gs: GroundStateResult) -> float:
    """<b'b> in an exact ground state, in whichever basis it was solved."""
    return float(expectation(gs.state, local_number_op(gs.state.basis, "b")).real)


def _require_converged(gs: GroundStateResult, p: ModelParams):
    if not gs.converged:
        raise NotConverged(f"exact ground state not converged by cutoff {gs.cutoff_used} at g={p.g}")


def nb_exact(
    p: ModelParams,
    cfg: TruncationConfig | None = None,
    basis_kind: BasisKind = BasisKind.SUPERMODE,
) -> float:
    gs = ground_state(p, cfg, basis_kind)
    _require_converged(gs, p)
    return nb_from_state(gs)


def _fidelities_from(gs: GroundStateResult, p: ModelParams, sol: TrwaSolution) -> tuple[float, float]:
    basis = gs.state.basis
    if not (coherent_cutoff_ok(sol.xi_a, basis.n1_max) and coherent_cutoff_ok(sol.xi_b, basis.n2_max)):
        # the converged cutoff is too small for the coherent branches; solve again on a larger one
        n = max(basis.n1_max, math.ceil(max(sol.xi_a, sol.xi_b) ** 2 + 6 * max(sol.xi_a, sol.xi_b) + 10))
        gs = ground_state(p, TruncationConfig(n_start=n, n_cap=2 * n), BasisKind.SUPERMODE)
        basis = gs.state.basis
    f_t = fidelity(gs.state, build_trwa_state(sol, basis))
    f_r = fidelity(gs.state, rwa_ground(p, basis)[1])
    return f_t, f_r


def fidelities(
    p: ModelParams, cfg: TruncationConfig | None = None, convention: str = "published"
) -> tuple[float, float]:
    """(F_T, F_R): squared overlaps of the exact ground state with the TRWA and RWA states."""
    gs = ground_state(p, cfg, BasisKind.SUPERMODE)
    _require_converged(gs, p)
    return _fidelities_from(gs, p, solve_self_consistent(p, convention=convention))


@dataclass(frozen=True)
class PointReport:
    g: float
    xi_a: float
    xi_b: float
    eta: float
    E_exact: float
    E_trwa: float
    E_rwa: float
    F_T: float
    F_R: float
    nb_trwa: float
    nb_exact: float
    slope_trwa: float
    cutoff: int
    residual: float

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate_point(
    p: ModelParams, cfg: TruncationConfig | None = None, convention: str = "published"
) -> PointReport:
    """Every detection quantity at one parameter point, from a single exact solve."""
    sol = solve_self_consistent(p, convention=convention)
    gs = ground_state(p, cfg, BasisKind.SUPERMODE)
    _require_converged(gs, p)
    f_t, f_r = _fidelities_from(gs, p, sol)
    return PointReport(
        g=p.g,
        xi_a=sol.xi_a,
        xi_b=sol.xi_b,
        eta=sol.eta,
        E_exact=gs.energy,
        E_trwa=sol.energy,
        E_rwa=-0.5 * p.Omega,
        F_T=f_t,
        F_R=f_r,
        nb_trwa=nb_trwa(sol),
        nb_exact=nb_from_state(gs),
        slope_trwa=nb_slope(p, sol),
        cutoff=gs.cutoff_used,
        residual=sol.residual,
    )


def _curve(p_known: ModelParams, g: float, convention: str) -> float:
    return nb_trwa(solve_self_consistent(p_known.with_g(g), convention=convention))


def estimate_g(
    nb_measured: float,
    p_known: ModelParams,
    g_max: float = 1.0,
    checks: int = 17,
    convention: str = "published",
) -> float:
    """Invert the TRWA curve <n_b>(g) on [0, g_max] by bisection.

    The curve is sampled at ``checks`` points first; if those samples are not
    strictly increasing the inversion is refused rather than guessed.
    """
    if not nb_measured >= 0:
        raise InvalidParameters(f"measured occupation must be non-negative, got {nb_measured}")
    if not g_max > 0:
        raise InvalidParameters(f"g_max must be positive, got {g_max}")
    grid = np.linspace(0.0, g_max, checks)
    values = [_curve(p_known, g, convention) for g in grid]
    if not all(b > a for a, b in zip(values, values[1:])):
        raise NonMonotoneBracket(f"<n_b>(g) is not strictly increasing on [0, {g_max}] (J = {p_known.J})")
    if nb_measured > values[-1]:
        raise OutOfRange(f"<n_b> = {nb_measured} exceeds the curve maximum {values[-1]:.6g} at g = {g_max}")
    if nb_measured == 0.0:
        return 0.0
    # tighten the bracket using the spot-check samples
    k = int(np.searchsorted(values, nb_measured))
    lo, hi = float(grid[max(k - 1, 0)]), float(grid[k])
    while hi - lo > INVERSION_TOL:
        mid = 0.5 * (lo + hi)
        if _curve(p_known, mid, convention) < nb_measured:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class SweepResult:
    params_base: ModelParams
    g_grid: list[float]
    records: list[PointReport]
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


class SweepPointError(TwoRabiError):
    def __init__(self, g: float, cause: TwoRabiError):
        super().__init__(f"at g={g!r}: {cause}")
        self.g = g
        self.cause = cause
        self.stage = cause.stage

    def __reduce__(self):
        return SweepPointError, (self.g, self.cause)


def _evaluate_at(args):
    p, cfg, convention = args
    try:
        return evaluate_point(p, cfg, convention)
    except TwoRabiError as exc:
        raise SweepPointError(p.g, exc) from exc


def run_sweep(
    p_base: ModelParams,
    g_grid,
    cfg: TruncationConfig | None = None,
    workers: int = 1,
    convention: str = "published",
) -> SweepResult:
    """Evaluate every detection quantity along ``g_grid`` (records in grid order)."""
    grid = [float(g) for g in g_grid]
    if not grid:
        raise InvalidParameters("empty g grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameters("g grid must be strictly increasing")
    cfg = cfg or TruncationConfig()
    tasks = [(p_base.with_g(g), cfg, convention) for g in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate_at, tasks))
    else:
        records = [_evaluate_at(t) for t in tasks]
    meta = {
        "n_start": cfg.n_start,
        "n_cap": cfg.n_cap,
        "energy_tol": cfg.energy_tol,
        "convention": convention,
        "cutoffs_used": sorted({r.cutoff for r in records}),
    }
    return SweepResult(p_base, grid, records, meta)
