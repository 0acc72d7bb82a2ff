"""Haar sampling and Bloch-sphere quadrature.

Random numbers come from numpy's PCG64 generator; Gaussians are drawn with
``Generator.standard_normal`` (ziggurat). Large sample counts are split into
fixed-size chunks, and chunk ``k`` of a run with seed ``s`` draws from
``SeedSequence(s, spawn_key=(k,))``. Results therefore depend only on the
seed and the chunk size, never on how many workers process the chunks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import gamma
from typing import Callable

import numpy as np

from .tensor import SIGMAS, distinct_permutations, kron, pauli_string_matrix

DEFAULT_DEGREE = 12
DEFAULT_CHUNK = 100_000


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def chunk_sizes(samples: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    if samples <= 0:
        raise ValueError("samples must be positive")
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_chunks(func: Callable[[np.random.Generator, int], object], samples: int, seed: int,
               chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> list:
    """Run ``func(rng, size)`` on every chunk; results come back in chunk order."""
    sizes = chunk_sizes(samples, chunk_size)
    jobs = [(chunk_rng(seed, k), size) for k, size in enumerate(sizes)]
    if threads <= 1 or len(jobs) == 1:
        return [func(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


def haar_pure_states(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` unitarily invariant random unit vectors in C^d, shape (size, d)."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    g = rng.standard_normal((size, 2 * d))
    psi = g[:, :d] + 1j * g[:, d:]
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def haar_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_pure_states(d, 1, rng)[0]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar random unitary: QR of a complex Ginibre matrix with the phase of diag(R) removed."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def bloch_vectors(psi: np.ndarray) -> np.ndarray:
    """Bloch vectors of qubit states, shape (N, 2) -> (N, 3)."""
    psi = np.atleast_2d(psi)
    a, b = psi[:, 0], psi[:, 1]
    cross = np.conj(a) * b
    return np.stack([2 * cross.real, 2 * cross.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=1)


def random_directions(size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vectors in R^3 (Bloch vectors of Haar qubit states)."""
    return bloch_vectors(haar_pure_states(2, size, rng))


def sign(x: np.ndarray) -> np.ndarray:
    """Componentwise sign with sign(0) = +1."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes on the unit sphere with weights normalized to total mass 1."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the leading (node) axis of ``values``."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def __len__(self):
        return len(self.weights)


def _spherical(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


@lru_cache(maxsize=None)
def sphere_quadrature(degree: int = DEFAULT_DEGREE) -> QuadratureRule:
    """Gauss-Legendre in cos(theta) times the trapezoid rule in phi.

    Exact for every polynomial in (x, y, z) of total degree <= ``degree``.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n_z = degree // 2 + 1
    n_phi = degree + 1
    z, wz = np.polynomial.legendre.leggauss(n_z)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    nodes = _spherical(np.arccos(zz), pp).reshape(-1, 3)
    weights = np.outer(wz / 2, np.full(n_phi, 1 / n_phi)).reshape(-1)
    return QuadratureRule(nodes, weights, degree)


@lru_cache(maxsize=None)
def octant_quadrature(degree: int = DEFAULT_DEGREE) -> tuple[QuadratureRule, ...]:
    """Eight sub-rules, one per sign pattern of (x, y, z).

    Within an octant a sign-weighted polynomial is an ordinary polynomial.
    Each sub-rule is a Gauss-Legendre product in (theta, phi) over the
    octant's angular box; the integrand is then an entire trigonometric
    polynomial and the rule converges to machine precision well before the
    node count used here (2 * degree + 10 per angle). Gauss nodes are
    interior, so no node lies on a coordinate plane.

    Sub-rules are ordered by sign pattern (+,+,+), (+,+,-), ... with the
    z sign varying fastest.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n = 2 * degree + 10
    t, wt = np.polynomial.legendre.leggauss(n)
    half = np.pi / 4
    ang = half * (t + 1)
    w = half * wt
    th, ph = np.meshgrid(ang, ang, indexing="ij")
    base = _spherical(th, ph).reshape(-1, 3)
    base_w = (np.outer(w * np.sin(ang), w) / (4 * np.pi)).reshape(-1)
    rules = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                rules.append(QuadratureRule(base * np.array([sx, sy, sz]), base_w, degree))
    return tuple(rules)


@lru_cache(maxsize=None)
def full_octant_rule(degree: int = DEFAULT_DEGREE) -> QuadratureRule:
    """Union of the eight octant sub-rules as a single rule."""
    parts = octant_quadrature(degree)
    return QuadratureRule(
        np.concatenate([r.nodes for r in parts]),
        np.concatenate([r.weights for r in parts]),
        degree,
    )


def monomial_sphere_average(powers: tuple[int, int, int], absolute: bool = False) -> float:
    """Exact average of x^a y^b z^c (or |x|^a |y|^b |z|^c) over the unit sphere."""
    if not absolute and any(p % 2 for p in powers):
        return 0.0
    betas = [(p + 1) / 2 for p in powers]
    full = 2 * gamma(betas[0]) * gamma(betas[1]) * gamma(betas[2]) / gamma(sum(betas))
    return full / (4 * np.pi)


# ----------------------------------------------------------------------------
# moment identities of the Bloch-sphere integrals

def sigma_dot(vecs: np.ndarray) -> np.ndarray:
    """Stack of ``v . sigma`` matrices, shape (N, 3) -> (N, 2, 2)."""
    return np.einsum("nk,kij->nij", vecs, np.stack(SIGMAS))


def _tensor_power_batch(mats: list[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        n, a, _ = out.shape
        b = m.shape[1]
        out = np.einsum("nij,nkl->nikjl", out, m).reshape(n, a * b, a * b)
    return out


def moment_integrand(nodes: np.ndarray, m: int, with_sign: bool) -> np.ndarray:
    """(Omega.sigma)^{x m}, followed by sign(Omega).sigma when ``with_sign``."""
    factors = [sigma_dot(nodes)] * m
    if with_sign:
        factors.append(sigma_dot(sign(nodes)))
    if not factors:
        return np.ones((len(nodes), 1, 1), dtype=complex)
    return _tensor_power_batch(factors)


def _sum_sigma_power(power: int) -> np.ndarray:
    return sum(kron(*([s] * power)) for s in SIGMAS)


def _j_operator() -> np.ndarray:
    labels = []
    for k, l in (("X", "Y"), ("X", "Z"), ("Y", "Z")):
        labels += distinct_permutations(k + k + l + l)
    return sum(pauli_string_matrix(lab) for lab in labels)


def moment_closed_forms() -> dict[tuple[str, int], np.ndarray]:
    """The closed forms of the plain moments (m = 1..3) and sign moments (m = 0..3)."""
    return {
        ("plain", 1): np.zeros((2, 2), dtype=complex),
        ("plain", 2): _sum_sigma_power(2) / 3,
        ("plain", 3): np.zeros((8, 8), dtype=complex),
        ("sign", 0): np.zeros((2, 2), dtype=complex),
        ("sign", 1): _sum_sigma_power(2) / 2,
        ("sign", 2): np.zeros((8, 8), dtype=complex),
        ("sign", 3): _sum_sigma_power(4) / 4 + _j_operator() / 8,
    }


def moment_oracle_check(samples: int = 200_000, seed: int = 42,
                        degree: int = DEFAULT_DEGREE) -> dict:
    """Evaluate every moment identity by quadrature and by Monte-Carlo.

    Returns per-identity maximum entrywise deviations from the closed form.
    The Monte-Carlo deviation is also expressed in standard errors.
    """
    rule = full_octant_rule(degree)
    rng = chunk_rng(seed, 0)
    mc_nodes = random_directions(samples, rng)
    report = {}
    for (kind, m), exact in moment_closed_forms().items():
        with_sign = kind == "sign"
        quad = rule.integrate(moment_integrand(rule.nodes, m, with_sign))
        vals = moment_integrand(mc_nodes, m, with_sign)
        mean = vals.mean(axis=0)
        stderr = np.sqrt(vals.real.var(axis=0) + vals.imag.var(axis=0)) / np.sqrt(samples)
        dev = np.abs(mean - exact)
        z = np.max(np.where(stderr > 0, dev / np.where(stderr > 0, stderr, 1), 0.0))
        report[f"{kind}_m{m}"] = {
            "quadrature_deviation": float(np.max(np.abs(quad - exact))),
            "mc_deviation": float(np.max(dev)),
            "mc_max_z": float(z),
        }
    report["max_quadrature_deviation"] = max(v["quadrature_deviation"] for v in report.values())
    return report
