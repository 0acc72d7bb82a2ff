import numpy as np
import pytest

from tripartite_lhv.sampling import (
    bloch_vectors,
    chunk_rng,
    chunk_sizes,
    full_octant_rule,
    haar_pure_states,
    haar_unitary,
    map_chunks,
    moment_closed_forms,
    moment_integrand,
    moment_oracle_check,
    monomial_sphere_average,
    octant_quadrature,
    random_directions,
    sign,
    sphere_quadrature,
)


def test_chunk_streams_are_reproducible_and_distinct():
    a = chunk_rng(42, 0).random(5)
    assert np.array_equal(a, chunk_rng(42, 0).random(5))
    assert not np.array_equal(a, chunk_rng(42, 1).random(5))
    assert not np.array_equal(a, chunk_rng(43, 0).random(5))


def test_chunk_sizes():
    assert chunk_sizes(250, 100) == [100, 100, 50]
    assert chunk_sizes(200, 100) == [100, 100]
    with pytest.raises(ValueError):
        chunk_sizes(0)


def test_map_chunks_is_thread_independent():
    def f(rng, size):
        return rng.standard_normal(size).sum()

    one = map_chunks(f, 10_000, 7, chunk_size=1000, threads=1)
    four = map_chunks(f, 10_000, 7, chunk_size=1000, threads=4)
    assert one == four


def test_haar_states_are_normalized(rng):
    psi = haar_pure_states(3, 1000, rng)
    assert np.allclose(np.linalg.norm(psi, axis=1), 1)
    with pytest.raises(ValueError):
        haar_pure_states(1, 3, rng)


def test_haar_state_second_moment(rng):
    # E|psi><psi| = 1/d and E|<0|psi>|^4 = 2/(d(d+1))
    psi = haar_pure_states(3, 200_000, rng)
    assert np.allclose(np.einsum("ni,nj->ij", psi, psi.conj()) / len(psi), np.eye(3) / 3, atol=5e-3)
    assert np.mean(np.abs(psi[:, 0]) ** 4) == pytest.approx(1 / 6, abs=3e-3)


def test_haar_unitary(rng):
    u = haar_unitary(4, rng)
    assert np.allclose(u @ u.conj().T, np.eye(4))


def test_haar_unitary_twirl_depolarizes_qubit(rng):
    rho = np.array([[0.9, 0.2], [0.2, 0.1]], dtype=complex)
    acc = np.zeros((2, 2), dtype=complex)
    for _ in range(100_000):
        u = haar_unitary(2, rng)
        acc += u @ rho @ u.conj().T
    assert np.allclose(acc / 100_000, np.eye(2) / 2, atol=5e-3)


def test_bloch_vectors():
    up = np.array([[1, 0], [1, 1] / np.sqrt(2)], dtype=complex)
    assert np.allclose(bloch_vectors(up), [[0, 0, 1], [1, 0, 0]])


def test_random_directions_are_uniform(rng):
    v = random_directions(200_000, rng)
    assert np.allclose(np.linalg.norm(v, axis=1), 1)
    assert np.allclose(v.mean(axis=0), 0, atol=5e-3)
    assert np.allclose(v.T @ v / len(v), np.eye(3) / 3, atol=5e-3)


def test_sign_convention():
    assert np.array_equal(sign(np.array([-2.0, 0.0, 3.0])), [-1.0, 1.0, 1.0])


@pytest.mark.parametrize("powers", [(0, 0, 0), (2, 0, 0), (2, 2, 0), (4, 0, 0), (2, 2, 2), (6, 0, 0)])
def test_sphere_rule_integrates_polynomials(powers):
    rule = sphere_quadrature(12)
    vals = np.prod(rule.nodes ** np.array(powers), axis=1)
    assert rule.integrate(vals) == pytest.approx(monomial_sphere_average(powers), abs=1e-14)


@pytest.mark.parametrize("powers", [(1, 0, 0), (1, 1, 0), (1, 1, 1), (3, 1, 0), (2, 1, 1)])
def test_octant_rule_integrates_absolute_monomials(powers):
    rule = full_octant_rule(12)
    vals = np.prod(np.abs(rule.nodes) ** np.array(powers), axis=1)
    assert rule.integrate(vals) == pytest.approx(monomial_sphere_average(powers, absolute=True), abs=1e-14)


def test_octant_rule_structure():
    parts = octant_quadrature(12)
    assert len(parts) == 8
    for part in parts:
        # every node sits strictly inside one octant, so sign() is unambiguous
        assert np.all(np.abs(part.nodes) > 0)
        assert len(np.unique(np.sign(part.nodes), axis=0)) == 1
        assert part.weights.sum() == pytest.approx(1 / 8, abs=1e-15)


def test_monomial_average_oracles():
    assert monomial_sphere_average((2, 0, 0)) == pytest.approx(1 / 3)
    assert monomial_sphere_average((1, 0, 0)) == 0
    assert monomial_sphere_average((1, 0, 0), absolute=True) == pytest.approx(1 / 2)
    assert monomial_sphere_average((1, 1, 1), absolute=True) == pytest.approx(1 / (4 * np.pi))


def test_moment_closed_form_examples():
    forms = moment_closed_forms()
    assert np.allclose(forms[("plain", 1)], np.zeros((2, 2)))
    assert len(forms) == 7
    rule = full_octant_rule(12)
    two = rule.integrate(moment_integrand(rule.nodes, 2, with_sign=False))
    assert np.max(np.abs(two - forms[("plain", 2)])) <= 1e-14


def test_moment_oracle_check():
    report = moment_oracle_check(samples=50_000)
    assert report["max_quadrature_deviation"] <= 1e-12
    rows = [v for k, v in report.items() if k != "max_quadrature_deviation"]
    assert len(rows) == 7
    for row in rows:
        assert row["mc_max_z"] <= 5
