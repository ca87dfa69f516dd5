import itertools
import math

import numpy as np
import pytest

from oracles import dense_ground_energy, dense_hamiltonian
from tworabi.errors import BasisMismatch, InvalidParameters
from tworabi.exact import solve_at_cutoff
from tworabi.fock import (
    BasisKind,
    BasisSpec,
    Mode,
    anti_hermitian_norm,
    coherent_state,
    expectation,
    fock_state,
    number_op,
    parity_op,
)
from tworabi.hamiltonian import (
    ModelParams,
    build_local_hamiltonian,
    build_supermode_hamiltonian,
    local_number_op,
    local_number_op_in_supermode_basis,
)

LOCAL = BasisKind.LOCAL
SUPER = BasisKind.SUPERMODE


@pytest.mark.parametrize(
    "kwargs",
    [dict(omega=0.0), dict(omega=1, J=1.0), dict(omega=1, J=-1.5), dict(g=-0.1), dict(Omega=-1), dict(g=math.nan)],
)
def test_invalid_params(kwargs):
    with pytest.raises(InvalidParameters):
        ModelParams(**kwargs)


def test_matches_independent_dense_construction():
    n = 6
    for J, g in [(0.2, 0.5), (0.05, 1.0), (-0.3, 0.7)]:
        p = ModelParams(1.0, 0.1, g, J)
        H_loc = build_local_hamiltonian(p, BasisSpec.square(n, LOCAL)).toarray()
        H_sup = build_supermode_hamiltonian(p, BasisSpec.square(n, SUPER)).toarray()
        assert np.allclose(H_loc, dense_hamiltonian(1.0, 0.1, g, J, n), atol=1e-14)
        assert np.allclose(H_sup, dense_hamiltonian(1.0, 0.1, g, J, n, supermode=True), atol=1e-14)


@pytest.mark.parametrize("kind", [LOCAL, SUPER])
def test_hermitian_and_parity_symmetric(kind):
    b = BasisSpec.square(8, kind)
    builder = build_local_hamiltonian if kind is LOCAL else build_supermode_hamiltonian
    P = parity_op(b).matrix
    for g, J in itertools.product([0.0, 0.4, 1.2], [0.0, 0.2]):
        H = builder(ModelParams(1.0, 0.1, g, J), b).matrix
        assert anti_hermitian_norm(H) < 1e-12
        comm = (H @ P - P @ H).toarray()
        assert np.abs(comm).max() < 1e-12


def test_decoupled_spectrum():
    n = 5
    p = ModelParams(1.0, 0.3, 0.0, 0.0)
    vals = np.linalg.eigvalsh(build_local_hamiltonian(p, BasisSpec.square(n, LOCAL)).toarray())
    expected = sorted(s * 0.15 + n1 + n2 for s in (-1, 1) for n1 in range(n) for n2 in range(n))
    assert np.allclose(vals, expected, atol=1e-12)


@pytest.mark.parametrize("J", [0.0, 0.2, -0.5, 0.9])
def test_ground_energy_at_zero_coupling(J):
    p = ModelParams(1.0, 0.1, 0.0, J)
    for kind in (LOCAL, SUPER):
        vals, _ = solve_at_cutoff(p, BasisSpec.square(10, kind), 1)
        assert vals[0] == pytest.approx(-0.05, abs=1e-12)


def test_local_ground_energy_against_dense_oracle():
    n = 40
    p = ModelParams(1.0, 0.1, 0.5, 0.2)
    oracle = dense_ground_energy(1.0, 0.1, 0.5, 0.2, n)
    vals, _ = solve_at_cutoff(p, BasisSpec.square(n, LOCAL), 1)
    assert vals[0] == pytest.approx(oracle, abs=1e-10)


def test_supermode_and_local_low_spectra_agree():
    p = ModelParams(1.0, 0.1, 0.8, 0.2)
    for n in (24, 32):
        loc, _ = solve_at_cutoff(p, BasisSpec.square(n, LOCAL), 5)
        sup, _ = solve_at_cutoff(p, BasisSpec.square(n, SUPER), 5)
        assert np.max(np.abs(loc - sup)) < 1e-8


def test_degenerate_supermodes_identical_spectra():
    p = ModelParams(1.0, 0.1, 0.8, 0.0)
    loc, _ = solve_at_cutoff(p, BasisSpec.square(30, LOCAL), 6)
    sup, _ = solve_at_cutoff(p, BasisSpec.square(30, SUPER), 6)
    assert np.max(np.abs(loc - sup)) < 1e-10


def test_ground_energy_monotone_in_g():
    energies = [
        solve_at_cutoff(ModelParams(1.0, 0.1, g, 0.2), BasisSpec.square(16, SUPER), 1)[0][0]
        for g in np.linspace(0, 1.2, 13)
    ]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


def test_basis_kind_is_enforced():
    p = ModelParams()
    with pytest.raises(BasisMismatch):
        build_local_hamiltonian(p, BasisSpec.square(3, SUPER))
    with pytest.raises(BasisMismatch):
        build_supermode_hamiltonian(p, BasisSpec.square(3, LOCAL))
    with pytest.raises(BasisMismatch):
        local_number_op_in_supermode_basis(BasisSpec.square(3, LOCAL), "b")


def test_local_number_ops_in_supermode_basis():
    b = BasisSpec.square(20, SUPER)
    na = local_number_op_in_supermode_basis(b, "A_res")
    nb = local_number_op_in_supermode_basis(b, "B_res")
    total = number_op(b, Mode.MODE1) + number_op(b, Mode.MODE2)
    assert np.abs((na + nb - total).toarray()).max() < 1e-12
    assert expectation(fock_state(b, 0, 0, 0), nb) == 0
    s = coherent_state(b, 0.4, 0.1)
    # b = (A - B)/sqrt(2) sees amplitude (0.4 - 0.1)/sqrt(2)
    assert expectation(s, nb).real == pytest.approx(0.045, abs=1e-9)
    assert expectation(s, na).real == pytest.approx(0.125, abs=1e-9)


def test_local_number_op_dispatch():
    loc = BasisSpec.square(4, LOCAL)
    assert np.allclose(local_number_op(loc, "b").toarray(), number_op(loc, Mode.MODE2).toarray())
    with pytest.raises(ValueError):
        local_number_op(loc, "c")
