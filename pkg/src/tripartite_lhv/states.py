"""Werner states and the rho^(n,c) family built from a shared Bloch vector.

Party A holds the (generally non-physical) operator
``(1 - c sign(Omega).sigma) / 2`` and every other party the pure qubit
``(1 + Omega.sigma) / 2``; rho^(n,c) is the sphere average of their tensor
product. The twirled family replaces A's operator by
``(1 - 3/2 c Omega.sigma) / 2``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .sampling import (
    DEFAULT_DEGREE,
    bloch_vectors,
    chunk_rng,
    full_octant_rule,
    haar_unitary,
    map_chunks,
    random_directions,
    sign,
    sigma_dot,
    sphere_quadrature,
)
from .tensor import (
    I2,
    DensityMatrix,
    cycle_count,
    distinct_permutations,
    kron,
    pauli_string_matrix,
    permutation_operator,
)

SUPPORTED_N = (2, 3, 4, 5)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def _check_n(n: int) -> None:
    if n not in SUPPORTED_N:
        raise ValueError(f"n must be one of {SUPPORTED_N}, got {n}")


def _check_c(c: float) -> None:
    if not np.isfinite(c):
        raise ValueError("c must be finite")


def werner(p: float) -> DensityMatrix:
    """p |psi-><psi-| + (1 - p) 1/4, physical for -1/3 <= p <= 1."""
    if not (-1 / 3 - 1e-12 <= p <= 1 + 1e-12):
        raise ValueError(f"Werner parameter {p} outside [-1/3, 1]")
    singlet = np.outer(SINGLET, SINGLET.conj())
    return DensityMatrix(p * singlet + (1 - p) * np.eye(4) / 4, (2, 2))


def maximally_mixed(n: int) -> DensityMatrix:
    return DensityMatrix(np.eye(2**n, dtype=complex) / 2**n, (2,) * n)


def bloch_vector_of(omega: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega)
    if omega.shape == (3,) and np.isrealobj(omega):
        vec = omega.astype(float)
    else:
        vec = bloch_vectors(np.asarray(omega, dtype=complex))[0]
    if abs(np.linalg.norm(vec) - 1) > 1e-12:
        raise ValueError("input must have unit norm")
    return vec


def sub_ensemble(omega: np.ndarray, c: float) -> tuple[np.ndarray, DensityMatrix, np.ndarray]:
    """The operators attached to one hidden-variable value.

    ``omega`` is either a unit qubit vector in C^2 or a unit Bloch vector in
    R^3. Returns (A's sign operator, the pure state, A's twirled operator).
    """
    vec = bloch_vector_of(omega)
    s = sigma_dot(vec[None, :])[0]
    signed = 0.5 * (I2 - c * sigma_dot(sign(vec)[None, :])[0])
    pure = DensityMatrix(0.5 * (I2 + s), (2,))
    tau = 0.5 * (I2 - 1.5 * c * s)
    return signed, pure, tau


def _batch_kron(first: np.ndarray, second: np.ndarray, copies: int) -> np.ndarray:
    out = first
    for _ in range(copies):
        n, a, _ = out.shape
        out = np.einsum("nij,nkl->nikjl", out, second).reshape(n, 2 * a, 2 * a)
    return out


def _family_integrand(nodes: np.ndarray, n: int, c: float, twirled: bool) -> np.ndarray:
    pure = 0.5 * (I2 + sigma_dot(nodes))
    if twirled:
        first = 0.5 * (I2 - 1.5 * c * sigma_dot(nodes))
    else:
        first = 0.5 * (I2 - c * sigma_dot(sign(nodes)))
    return _batch_kron(first, pure, n - 1)


def _integrate(rule, n: int, c: float, twirled: bool, block: int = 1024) -> np.ndarray:
    total = np.zeros((2**n, 2**n), dtype=complex)
    for start in range(0, len(rule), block):
        sl = slice(start, start + block)
        vals = _family_integrand(rule.nodes[sl], n, c, twirled)
        total += np.tensordot(rule.weights[sl], vals, axes=(0, 0))
    return total


@lru_cache(maxsize=64)
def _rho_nc_matrix(n: int, c: float, degree: int) -> np.ndarray:
    m = _integrate(full_octant_rule(degree), n, c, twirled=False)
    m = 0.5 * (m + m.conj().T)
    m.setflags(write=False)
    return m


def rho_nc_quadrature(n: int, c: float, degree: int = DEFAULT_DEGREE) -> DensityMatrix:
    """rho^(n,c) by the octant quadrature rule (exact up to rounding)."""
    _check_n(n)
    _check_c(c)
    return DensityMatrix(_rho_nc_matrix(n, float(c), degree), (2,) * n)


def rho_nc_monte_carlo(n: int, c: float, samples: int, seed: int = 42,
                       chunk_size: int = 10_000, threads: int = 1) -> DensityMatrix:
    """rho^(n,c) as a Haar-sample average over the hidden variable."""
    _check_n(n)

    def chunk(rng, size):
        return _family_integrand(random_directions(size, rng), n, c, False).sum(axis=0)

    parts = map_chunks(chunk, samples, seed, chunk_size, threads)
    m = sum(parts) / samples
    return DensityMatrix(0.5 * (m + m.conj().T), (2,) * n)


def _pauli_sum(terms: dict[str, float], n: int) -> np.ndarray:
    m = np.zeros((2**n, 2**n), dtype=complex)
    for label, coeff in terms.items():
        m += coeff * pauli_string_matrix(label)
    return m


def _expand_pi(label: str) -> list[str]:
    return distinct_permutations(label)


def closed_form_terms(n: int, c: float, twirled: bool = False) -> dict[str, float]:
    """Pauli coefficients of the printed closed forms for n = 2, 3, 4.

    Twirled coefficients are only printed for n = 4.
    """
    terms: dict[str, float] = {}

    def add(label, value):
        terms[label] = terms.get(label, 0.0) + value

    if n == 2:
        add("II", 0.25)
        for k in "XYZ":
            add(k + k, -c / 8)
    elif n == 3:
        add("III", 1 / 8)
        for k in "XYZ":
            add("I" + k + k, 1 / 24)
            add(k + "I" + k, -c / 16)
            add(k + k + "I", -c / 16)
    elif n == 4:
        four, mixed = (3 * c / 160, c / 160) if twirled else (c / 64, c / 128)
        add("IIII", 1 / 16)
        for k in "XYZ":
            for rest in _expand_pi(k + "II"):
                add(k + rest, -c / 32)
            for rest in _expand_pi(k + k + "I"):
                add("I" + rest, 1 / 48)
            add(k * 4, -four)
        for l, k in (("X", "Y"), ("X", "Z"), ("Y", "Z")):
            for label in _expand_pi(k + k + l + l):
                add(label, -mixed)
    else:
        raise ValueError(f"no closed form for n={n}; use rho_nc_quadrature")
    if twirled and n != 4:
        raise ValueError("a twirled closed form is only available for n=4")
    return terms


def rho_nc_closed_form(n: int, c: float) -> DensityMatrix:
    """rho^(n,c) assembled from its printed Pauli expansion, n in {2, 3, 4}."""
    _check_c(c)
    return DensityMatrix(_pauli_sum(closed_form_terms(n, c), n), (2,) * n)


def rho_T4_closed_form(c: float) -> DensityMatrix:
    _check_c(c)
    return DensityMatrix(_pauli_sum(closed_form_terms(4, c, twirled=True), 4), (2,) * 4)


@lru_cache(maxsize=64)
def _rho_T_matrix(n: int, c: float, degree: int) -> np.ndarray:
    m = _integrate(sphere_quadrature(degree), n, c, twirled=True)
    m = 0.5 * (m + m.conj().T)
    m.setflags(write=False)
    return m


def rho_T_nc(n: int, c: float, degree: int = DEFAULT_DEGREE) -> DensityMatrix:
    """Twirled family, integrated with the plain sphere rule (polynomial integrand)."""
    _check_n(n)
    _check_c(c)
    return DensityMatrix(_rho_T_matrix(n, float(c), degree), (2,) * n)


def family_state(n: int, c: float, twirled: bool = False) -> DensityMatrix:
    return rho_T_nc(n, c) if twirled else rho_nc_quadrature(n, c)


# ----------------------------------------------------------------------------
# twirling

@lru_cache(maxsize=None)
def _permutation_basis(n: int) -> tuple[tuple[tuple[int, ...], ...], np.ndarray, np.ndarray]:
    perms = tuple(itertools.permutations(range(n)))
    ops = np.stack([permutation_operator(p, 2) for p in perms])
    inv = [tuple(np.argsort(p)) for p in perms]
    # Tr(V_p^dag V_q) = 2^{cycles(p^-1 q)}
    gram = np.empty((len(perms), len(perms)))
    for i, p_inv in enumerate(inv):
        for j, q in enumerate(perms):
            composed = tuple(p_inv[q[k]] for k in range(n))
            gram[i, j] = 2.0 ** cycle_count(composed)
    return perms, ops, gram


def twirl(rho: DensityMatrix) -> DensityMatrix:
    """Haar average of U^{x n} rho U^{dag x n}, computed exactly.

    The average is the Hilbert-Schmidt projection onto the span of the n!
    permutation operators. For qubits with n >= 3 these operators are
    linearly dependent, so the normal equations are solved by least squares.
    """
    if any(d != 2 for d in rho.dims):
        raise ValueError("twirl needs qubit subsystems only")
    n = rho.n_parties
    if n > 5:
        raise ValueError("twirl supports at most 5 qubits")
    _, ops, gram = _permutation_basis(n)
    rhs = np.einsum("pji,ji->p", ops.conj(), rho.matrix)
    coeffs, *_ = np.linalg.lstsq(gram.astype(complex), rhs, rcond=1e-12)
    m = np.tensordot(coeffs, ops, axes=(0, 0))
    return DensityMatrix(0.5 * (m + m.conj().T), rho.dims)


def twirl_monte_carlo(rho: DensityMatrix, samples: int, seed: int = 42) -> DensityMatrix:
    """Twirl by averaging over Haar-random single-qubit unitaries."""
    n = rho.n_parties

    def chunk(rng, size):
        acc = np.zeros_like(rho.matrix)
        for _ in range(size):
            u = kron(*([haar_unitary(2, rng)] * n))
            acc += u @ rho.matrix @ u.conj().T
        return acc

    m = sum(map_chunks(chunk, samples, seed, chunk_size=10_000)) / samples
    return DensityMatrix(0.5 * (m + m.conj().T), rho.dims)


def invariance_error(rho: DensityMatrix, trials: int = 20, seed: int = 42) -> float:
    """Largest max-entry change of rho under sampled collective unitaries U^{x n}."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = chunk_rng(seed, 0)
    worst = 0.0
    for _ in range(trials):
        u = kron(*([haar_unitary(rho.dims[0], rng)] * rho.n_parties))
        worst = max(worst, float(np.max(np.abs(u @ rho.matrix @ u.conj().T - rho.matrix))))
    return worst


def is_un_invariant(rho: DensityMatrix, trials: int = 20, tol: float = 1e-10, seed: int = 42) -> bool:
    return invariance_error(rho, trials, seed) <= tol
