"""Transformed rotating-wave approximation (TRWA) for the two-mode Rabi model.

The displacements of the two supermodes are fixed by cancelling the
counter-rotating part of the linearised interaction::

    xi_A = sqrt(2) g / (4 [(w + J) - eta * Omega])
    xi_B = sqrt(2) g / (4 [(w - J) - eta * Omega])
    eta  = exp(-2 (xi_A**2 + xi_B**2))

Given eta the displacements are explicit, so the system collapses to one
scalar equation r(eta) = eta - exp(-2 (xi_A(eta)**2 + xi_B(eta)**2)) = 0 on
(0, 1]. With the published sign r is strictly increasing there (both xi
grow with eta while the exponential shrinks), r(0+) < 0 and r(1) >= 0, so the
root is unique.

``convention="corrected"`` uses (w +/- J) + eta*Omega instead. That is the
choice that actually cancels the counter-rotating terms when sigma_z|g> = |e>
and sigma_+- = (sigma_z +/- i sigma_y)/2, and it is also the stationary point
of <G_T|H|G_T> in the displacements. The published form is the default
because it is what the reference curves were computed with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BasisMismatch,
    InvalidParameters,
    NoConvergence,
    SingularDenominator,
    TruncationInsufficient,
)
from .fock import (
    GROUND,
    BasisKind,
    BasisSpec,
    QuantumState,
    coherent_amplitudes,
    coherent_cutoff_ok,
    product_state,
)
from .hamiltonian import ModelParams

DEN_EPS = 1e-9
DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 500
SQRT2 = math.sqrt(2.0)
SCAN_POINTS = 64

# sign of eta*Omega in the displacement denominators
CONVENTIONS = {"published": -1.0, "corrected": 1.0}


def _sign(convention: str) -> float:
    try:
        return CONVENTIONS[convention]
    except KeyError:
        raise ValueError(f"convention must be one of {sorted(CONVENTIONS)}, got {convention!r}") from None


@dataclass(frozen=True)
class TrwaSolution:
    xi_a: float
    xi_b: float
    eta: float
    energy: float
    residual: float
    iterations: int
    method: str = "hybrid"
    convention: str = "published"
    multiple_roots: bool = False


def denominators(p: ModelParams, eta: float, convention: str = "published") -> tuple[float, float]:
    s = _sign(convention)
    da = p.freq_a + s * eta * p.Omega
    db = p.freq_b + s * eta * p.Omega
    if min(da, db) < DEN_EPS:
        raise SingularDenominator(
            f"denominator (omega +/- J) - eta*Omega = {min(da, db):.3e} below {DEN_EPS} at eta={eta:.6g}"
        )
    return da, db


def displacements(p: ModelParams, eta: float, convention: str = "published") -> tuple[float, float]:
    """xi_A, xi_B for a given eta."""
    da, db = denominators(p, eta, convention)
    return SQRT2 * p.g / (4.0 * da), SQRT2 * p.g / (4.0 * db)


def eta_map(p: ModelParams, eta: float, convention: str = "published") -> float:
    """exp(-2 (xi_A**2 + xi_B**2)) with the displacements evaluated at ``eta``."""
    xa, xb = displacements(p, eta, convention)
    return math.exp(-2.0 * (xa * xa + xb * xb))


def self_consistency_residual(p: ModelParams, eta: float, convention: str = "published") -> float:
    return eta - eta_map(p, eta, convention)


def trwa_energy(sol: TrwaSolution, p: ModelParams) -> float:
    """Ground energy -eta Omega/2 + sum_k w_k xi_k^2 - g xi_k / sqrt(2)."""
    return (
        -0.5 * sol.eta * p.Omega
        + p.freq_a * sol.xi_a**2
        - p.g * sol.xi_a / SQRT2
        + p.freq_b * sol.xi_b**2
        - p.g * sol.xi_b / SQRT2
    )


def _check_regime(p: ModelParams, convention: str):
    # both denominators must stay positive for every eta in (0, 1]
    margin = min(p.freq_a, p.freq_b) + min(0.0, _sign(convention)) * p.Omega
    if margin < DEN_EPS:
        raise SingularDenominator(
            f"(omega - |J|) - Omega = {margin:.3e}: the self-consistency denominators vanish inside eta in (0, 1]"
        )


def bracket_eta(p: ModelParams, convention: str = "published", points: int = SCAN_POINTS):
    """Bracket of the root nearest eta = 1, scanning downward from 1.

    Returns ``(lo, hi, n_sign_changes)``; ``lo == hi == 1`` when eta = 1 is
    itself a root (g = 0). r(0+) < 0 always, so a root exists.
    """
    grid = np.linspace(1.0, 0.0, points + 1)
    grid[-1] = np.finfo(float).tiny
    values = [self_consistency_residual(p, eta, convention) for eta in grid]
    if values[0] == 0.0:
        return 1.0, 1.0, 1
    changes = [i for i in range(points) if (values[i] > 0) != (values[i + 1] > 0)]
    if not changes:
        raise NoConvergence("no sign change of the self-consistency residual on (0, 1]")
    i = changes[0]
    return float(grid[i + 1]), float(grid[i]), len(changes)


def bisect_eta(
    p: ModelParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    convention: str = "published",
) -> tuple[float, int, bool]:
    """Root of r(eta) nearest eta = 1 by bisection; returns (eta, iterations, multiple_roots)."""
    lo, hi, n_roots = bracket_eta(p, convention)
    if lo == hi:
        return hi, 0, False
    r_lo = self_consistency_residual(p, lo, convention)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        r_mid = self_consistency_residual(p, mid, convention)
        if (r_mid > 0) == (r_lo > 0):
            lo, r_lo = mid, r_mid
        else:
            hi = mid
        if hi - lo < tol:
            return 0.5 * (lo + hi), it, n_roots > 1
    raise NoConvergence(f"bisection did not reach tol={tol} in {max_iter} iterations")


def iterate_eta(
    p: ModelParams,
    eta0: float = 1.0,
    damping: float = 0.5,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    convention: str = "published",
) -> tuple[float, int]:
    """Damped fixed-point iteration eta <- (1 - d) eta + d * eta_map(eta)."""
    eta = eta0
    for it in range(1, max_iter + 1):
        new = (1.0 - damping) * eta + damping * eta_map(p, eta, convention)
        if abs(new - eta) < tol and abs(self_consistency_residual(p, new, convention)) < tol:
            return new, it
        eta = new
    raise NoConvergence(f"damped iteration did not reach tol={tol} in {max_iter} iterations")


def solve_self_consistent(
    p: ModelParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "hybrid",
    convention: str = "published",
) -> TrwaSolution:
    """Solve for (xi_A, xi_B, eta) and the TRWA ground energy.

    ``method``:

    - ``"bisection"``: bracket the root nearest eta = 1 and bisect.
    - ``"fixed_point"``: damped iteration (damping 0.5) from eta = 1.
    - ``"hybrid"`` (default): bisection, then damped steps from its root.

    The first two share nothing but the residual function, so they serve
    as cross-checks of each other.
    """
    if not tol > 0:
        raise InvalidParameters(f"tol must be positive, got {tol}")
    _check_regime(p, convention)
    multiple = False
    if method in ("bisection", "hybrid"):
        eta, iters, multiple = bisect_eta(p, tol, max_iter, convention)
        if method == "hybrid":
            eta, extra = iterate_eta(p, eta, tol=tol, max_iter=max_iter, convention=convention)
            iters += extra
    elif method == "fixed_point":
        eta, iters = iterate_eta(p, 1.0, tol=tol, max_iter=max_iter, convention=convention)
    else:
        raise ValueError(f"unknown method {method!r}")
    xa, xb = displacements(p, eta, convention)
    residual = abs(self_consistency_residual(p, eta, convention))
    sol = TrwaSolution(xa, xb, eta, 0.0, residual, iters, method, convention, multiple)
    return replace(sol, energy=trwa_energy(sol, p))


def build_trwa_state(sol: TrwaSolution, basis: BasisSpec, *, allow_truncation: bool = False) -> QuantumState:
    """(|-xi_A, -xi_B>|up> - |+xi_A, +xi_B>|down>) / sqrt(2) in the supermode basis."""
    if basis.kind is not BasisKind.SUPERMODE:
        raise BasisMismatch("the TRWA state is built in the supermode basis")
    if not allow_truncation and not (
        coherent_cutoff_ok(sol.xi_a, basis.n1_max) and coherent_cutoff_ok(sol.xi_b, basis.n2_max)
    ):
        raise TruncationInsufficient(f"cutoffs {basis.n1_max}, {basis.n2_max} too small for xi = {sol.xi_a}, {sol.xi_b}")
    up = product_state(
        basis,
        [1.0, 0.0],
        coherent_amplitudes(-sol.xi_a, basis.n1_max),
        coherent_amplitudes(-sol.xi_b, basis.n2_max),
    ).amplitudes
    down = product_state(
        basis,
        [0.0, 1.0],
        coherent_amplitudes(sol.xi_a, basis.n1_max),
        coherent_amplitudes(sol.xi_b, basis.n2_max),
    ).amplitudes
    return QuantumState(basis, (up - down) / SQRT2).normalized()


def rwa_ground(p: ModelParams, basis: BasisSpec) -> tuple[float, QuantumState]:
    """RWA ground state |0, 0> (x) |g> with energy -Omega/2 (independent of g and J)."""
    vac1 = np.zeros(basis.n1_max)
    vac2 = np.zeros(basis.n2_max)
    vac1[0] = vac2[0] = 1.0
    return -0.5 * p.Omega, product_state(basis, GROUND, vac1, vac2)
