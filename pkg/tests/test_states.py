import numpy as np
import pytest

from tripartite_lhv.sampling import chunk_rng, haar_pure_state
from tripartite_lhv.states import (
    closed_form_terms,
    family_state,
    invariance_error,
    is_un_invariant,
    maximally_mixed,
    rho_nc_closed_form,
    rho_nc_monte_carlo,
    rho_nc_quadrature,
    rho_T4_closed_form,
    rho_T_nc,
    sub_ensemble,
    twirl,
    twirl_monte_carlo,
    werner,
)
from tripartite_lhv.tensor import SX, SY, SZ, DensityMatrix, kron, partial_trace, pauli_expand

from conftest import random_density


def test_werner_endpoints():
    assert np.allclose(werner(0).matrix, np.eye(4) / 4)
    assert werner(1).min_eigenvalue() == pytest.approx(0, abs=1e-15)
    assert werner(-1 / 3).min_eigenvalue() == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError):
        werner(1.1)


def test_werner_pauli_form():
    # p |psi-><psi-| + (1-p) 1/4 = 1/4 (II - p sum_k s_k s_k)
    coeffs = pauli_expand(werner(0.3), tol=1e-15)
    assert coeffs == pytest.approx({"II": 0.25, "XX": -0.075, "YY": -0.075, "ZZ": -0.075})


def test_sub_ensemble_operators():
    signed, pure, tau = sub_ensemble(np.array([0.0, 0.0, 1.0]), 1.0)
    assert np.allclose(pure.matrix, np.diag([1, 0]))
    # sign(0) = +1, so sign(z-hat) = (1, 1, 1)
    assert np.allclose(signed, 0.5 * (np.eye(2) - SX - SY - SZ))
    assert np.allclose(tau, np.diag([-0.25, 1.25]))
    # accepts a state vector as well as a Bloch vector
    _, pure2, _ = sub_ensemble(np.array([1, 0], dtype=complex), 1.0)
    assert np.allclose(pure2.matrix, pure.matrix)
    with pytest.raises(ValueError):
        sub_ensemble(np.array([0.0, 0.0, 2.0]), 1.0)


def test_sub_ensemble_sign_operator_is_unphysical_off_axis():
    signed, _, _ = sub_ensemble(np.ones(3) / np.sqrt(3), 1.0)
    # (1 - (x+y+z).sigma)/2 has eigenvalues (1 +- sqrt 3)/2
    assert np.linalg.eigvalsh(signed) == pytest.approx([(1 - np.sqrt(3)) / 2, (1 + np.sqrt(3)) / 2])


@pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 1.7])
def test_two_party_family_is_werner(c):
    assert np.max(np.abs(rho_nc_quadrature(2, c).matrix - werner(c / 2).matrix)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("c", [0.0, 0.5, 1.0])
def test_quadrature_matches_closed_form(n, c):
    assert np.max(np.abs(rho_nc_quadrature(n, c).matrix - rho_nc_closed_form(n, c).matrix)) <= 1e-12


def test_three_party_pauli_block():
    coeffs = pauli_expand(rho_nc_quadrature(3, 1.0), tol=1e-13)
    expected = {"III": 1 / 8}
    for k in "XYZ":
        expected["I" + k + k] = 1 / 24
        expected[k + "I" + k] = -1 / 16
        expected[k + k + "I"] = -1 / 16
    assert coeffs == pytest.approx(expected, abs=1e-14)


def test_no_closed_form_for_five():
    with pytest.raises(ValueError):
        closed_form_terms(5, 1.0)
    with pytest.raises(ValueError):
        closed_form_terms(3, 1.0, twirled=True)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_family_marginals(n):
    rho = rho_nc_quadrature(n, 1.0)
    assert np.max(np.abs(partial_trace(rho, [0, 1]).matrix - werner(0.5).matrix)) <= 1e-12
    if n >= 3:
        # two copies of the same pure state average to the symmetric projector / 3
        bc = partial_trace(rho, [1, 2]).matrix
        assert np.max(np.abs(bc - werner(-1 / 3).matrix)) <= 1e-12


def test_monte_carlo_matches_closed_form():
    mc = rho_nc_monte_carlo(3, 1.0, 200_000, seed=42)
    assert np.max(np.abs(mc.matrix - rho_nc_closed_form(3, 1.0).matrix)) <= 5e-3


def test_monte_carlo_is_seeded():
    a = rho_nc_monte_carlo(2, 1.0, 5_000, seed=3)
    b = rho_nc_monte_carlo(2, 1.0, 5_000, seed=3, threads=2)
    assert np.array_equal(a.matrix, b.matrix)


def test_zero_c_family_is_physical():
    for n in (2, 3, 4, 5):
        assert rho_nc_quadrature(n, 0.0).is_physical()


def test_twirled_four_closed_form():
    for c in (0.0, 0.5, 1.0, 10 / 9):
        assert np.max(np.abs(rho_T_nc(4, c).matrix - rho_T4_closed_form(c).matrix)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_twirl_of_family_is_twirled_family(n):
    assert np.max(np.abs(twirl(rho_nc_quadrature(n, 1.0)).matrix - rho_T_nc(n, 1.0).matrix)) <= 1e-12


def test_three_party_family_is_invariant():
    rho = rho_nc_quadrature(3, 1.0)
    assert np.max(np.abs(twirl(rho).matrix - rho.matrix)) <= 1e-12
    assert is_un_invariant(rho)


def test_four_party_family_is_not_invariant():
    assert not is_un_invariant(rho_nc_quadrature(4, 1.0))
    assert is_un_invariant(rho_T_nc(4, 1.0))
    assert invariance_error(rho_nc_quadrature(4, 1.0)) > 1e-3


def test_twirl_basics(rng):
    for n in (2, 3):
        mm = maximally_mixed(n)
        assert np.allclose(twirl(mm).matrix, mm.matrix, atol=1e-14)
    rho = DensityMatrix(random_density(8, rng), (2, 2, 2))
    once = twirl(rho)
    assert np.max(np.abs(twirl(once).matrix - once.matrix)) <= 1e-12
    assert is_un_invariant(once)


def test_twirl_of_product_state_is_symmetric_werner(rng):
    psi = haar_pure_state(2, rng)
    p = np.outer(psi, psi.conj())
    out = twirl(DensityMatrix(kron(p, p), (2, 2))).matrix
    assert np.max(np.abs(out - werner(-1 / 3).matrix)) <= 1e-12


def test_twirl_matches_haar_average(rng):
    rho = DensityMatrix(random_density(4, rng), (2, 2))
    assert np.max(np.abs(twirl_monte_carlo(rho, 100_000).matrix - twirl(rho).matrix)) <= 5e-3


def test_family_state_dispatch():
    assert family_state(3, 1.0) is not None
    assert np.allclose(family_state(4, 1.0, twirled=True).matrix, rho_T_nc(4, 1.0).matrix)
    with pytest.raises(ValueError):
        family_state(6, 1.0)
    with pytest.raises(ValueError):
        rho_nc_quadrature(3, float("inf"))
