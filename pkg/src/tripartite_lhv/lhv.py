"""The local hidden variable model.

The hidden variable is a Haar-random pure state omega. Party A answers
deterministically with the outcome whose projector has the *smallest*
overlap with omega; every other party answers as if it held omega itself.
With a parameter c < 1, party A follows the deterministic rule with
probability c and otherwise answers from the maximally mixed state, which
reproduces the rho^(n,c) family linearly in c.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .sampling import (
    DEFAULT_CHUNK,
    DEFAULT_DEGREE,
    bloch_vectors,
    chunk_rng,
    full_octant_rule,
    haar_pure_states,
    map_chunks,
    random_directions,
    sign,
    sphere_quadrature,
)
from .states import rho_nc_quadrature
from .tensor import SIGMAS, DensityMatrix, kron

PROJECTOR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Measurement:
    """A von Neumann measurement ``sum_k values[k] * projectors[k]``."""

    values: np.ndarray
    projectors: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        projs = np.asarray(self.projectors, dtype=complex)
        if projs.ndim != 3 or projs.shape[1] != projs.shape[2] or len(projs) != len(values):
            raise ValueError("need one square projector per outcome value")
        d = projs.shape[1]
        if np.max(np.abs(projs.sum(axis=0) - np.eye(d))) > PROJECTOR_TOL:
            raise ValueError("projectors do not sum to the identity")
        for k, p in enumerate(projs):
            for l, q in enumerate(projs):
                target = p if k == l else np.zeros_like(p)
                if np.max(np.abs(p @ q - target)) > PROJECTOR_TOL:
                    raise ValueError("projectors are not orthogonal projectors")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return np.tensordot(self.values, self.projectors, axes=(0, 0))

    @property
    def is_trivial(self) -> bool:
        return len(self.values) == 1

    @classmethod
    def from_bloch(cls, direction: Sequence[float]) -> "Measurement":
        """The qubit observable n.sigma with outcomes +1, -1."""
        n = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(n)
        if abs(norm - 1) > 1e-12:
            raise ValueError("Bloch direction must be a unit vector")
        s = np.tensordot(n, np.stack(SIGMAS), axes=(0, 0))
        eye = np.eye(2)
        return cls(np.array([1.0, -1.0]), np.stack([(eye + s) / 2, (eye - s) / 2]))

    @classmethod
    def pauli(cls, axis: str, sign_: int = 1) -> "Measurement":
        vec = np.zeros(3)
        vec["xyz".index(axis.lower())] = sign_
        return cls.from_bloch(vec)

    @classmethod
    def identity(cls, d: int = 2) -> "Measurement":
        """The trivial measurement: a single outcome +1."""
        return cls(np.array([1.0]), np.eye(d, dtype=complex)[None])

    @classmethod
    def from_basis(cls, values: Sequence[float], basis: np.ndarray) -> "Measurement":
        """Rank-one projectors onto the columns of a unitary ``basis``."""
        basis = np.asarray(basis, dtype=complex)
        projs = np.einsum("ik,jk->kij", basis, basis.conj())
        return cls(np.asarray(values, dtype=float), projs)

    def qubit_affine(self) -> tuple[float, np.ndarray]:
        """(a0, a) with Tr(M (1 + Omega.sigma)/2) = a0 + a.Omega; qubits only."""
        if self.dim != 2:
            raise ValueError("qubit measurement required")
        m = self.matrix
        a0 = float(np.trace(m).real / 2)
        a = np.array([np.trace(m @ s).real / 2 for s in SIGMAS])
        return a0, a

    def qubit_deterministic(self) -> tuple[float, float, np.ndarray]:
        """(d0, d1, u) with A's deterministic answer d0 + d1 sign(u.Omega).

        For a trivial measurement d1 = 0 and u is arbitrary.
        """
        if self.dim != 2:
            raise ValueError("qubit measurement required")
        if self.is_trivial:
            return float(self.values[0]), 0.0, np.array([0.0, 0.0, 1.0])
        if len(self.values) != 2:
            raise ValueError("qubit measurement must have one or two outcomes")
        # P_0 = (1 + u.sigma)/2 has the smaller overlap exactly when u.Omega < 0
        p0 = self.projectors[0]
        u = np.array([np.trace(p0 @ s).real for s in SIGMAS])
        a0, a1 = self.values
        return (a0 + a1) / 2, (a1 - a0) / 2, u


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    std_err: float
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _overlaps(m: Measurement, omegas: np.ndarray) -> np.ndarray:
    """<omega|P_k|omega> for a batch of states, shape (N, K)."""
    return np.sum((omegas.conj()[None] @ m.projectors) * omegas[None], axis=-1).real.T


def _deterministic_batch(m: Measurement, omegas: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum, i.e. ties go to the lowest index
    return m.values[np.argmin(_overlaps(m, omegas), axis=1)]


def _quantum_batch(m: Measurement, omegas: np.ndarray) -> np.ndarray:
    return _overlaps(m, omegas) @ m.values


def response_deterministic(m: Measurement, omega: np.ndarray, c: float = 1.0) -> float:
    """Party A's answer: the value of the least likely outcome for omega.

    At c < 1 the expected answer mixes in Tr(M)/d.
    """
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (m.dim,):
        raise ValueError("dimension mismatch between measurement and hidden variable")
    det = float(_deterministic_batch(m, omega[None])[0])
    return c * det + (1 - c) * _mixed_value(m)


def response_quantum(m: Measurement, omega: np.ndarray) -> float:
    """Expectation value of M in the pure state omega."""
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (m.dim,):
        raise ValueError("dimension mismatch between measurement and hidden variable")
    return float(_quantum_batch(m, omega[None])[0])


def _mixed_value(m: Measurement) -> float:
    ranks = np.trace(m.projectors, axis1=1, axis2=2).real
    return float(np.sum(m.values * ranks) / m.dim)


def _check_settings(settings: Sequence[Measurement]) -> int:
    if not settings:
        raise ValueError("need at least one party")
    d = settings[0].dim
    if any(m.dim != d for m in settings):
        raise ValueError("all parties must share the hidden variable's dimension")
    return d


def _response_products(settings_list: Sequence[Sequence[Measurement]], omegas: np.ndarray,
                       c: float) -> np.ndarray:
    """Per-sample products of responses for every settings tuple, shape (S, N)."""
    cache: dict[tuple[int, bool], np.ndarray | float] = {}

    def response(m: Measurement, first: bool):
        if m.is_trivial:
            return float(m.values[0])
        key = (id(m), first)
        if key not in cache:
            if first:
                cache[key] = c * deterministic(m) + (1 - c) * _mixed_value(m)
            else:
                cache[key] = quantum(m)
        return cache[key]

    if omegas.shape[1] == 2:
        bloch = bloch_vectors(omegas)

        def deterministic(m):
            d0, d1, u = m.qubit_deterministic()
            # P_0 is the less likely outcome when u.Omega < 0; a tie goes to P_0
            return np.where(bloch @ u <= 0, d0 - d1, d0 + d1)

        def quantum(m):
            a0, a = m.qubit_affine()
            return a0 + bloch @ a
    else:
        def deterministic(m):
            return _deterministic_batch(m, omegas)

        def quantum(m):
            return _quantum_batch(m, omegas)

    out = np.empty((len(settings_list), len(omegas)))
    for s, settings in enumerate(settings_list):
        prod = response(settings[0], True)
        for m in settings[1:]:
            prod = prod * response(m, False)
        out[s] = prod
    return out


def lhv_correlations_mc(settings_list: Sequence[Sequence[Measurement]], samples: int,
                        seed: int = 42, c: float = 1.0, chunk_size: int = DEFAULT_CHUNK,
                        threads: int = 1) -> list[CorrelationEstimate]:
    """Monte-Carlo estimates for many settings tuples on one stream of hidden variables."""
    d = _check_settings(settings_list[0])
    for settings in settings_list:
        if _check_settings(settings) != d:
            raise ValueError("all settings tuples must have the same local dimension")

    def chunk(rng, size):
        prods = _response_products(settings_list, haar_pure_states(d, size, rng), c)
        return prods.sum(axis=1), (prods**2).sum(axis=1)

    parts = map_chunks(chunk, samples, seed, chunk_size, threads)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / samples
    var = np.maximum(total_sq / samples - mean**2, 0.0) * samples / max(samples - 1, 1)
    err = np.sqrt(var / samples)
    return [CorrelationEstimate(float(v), float(e), samples, seed) for v, e in zip(mean, err)]


def lhv_correlation_mc(settings: Sequence[Measurement], samples: int, seed: int = 42,
                       c: float = 1.0, chunk_size: int = DEFAULT_CHUNK,
                       threads: int = 1) -> CorrelationEstimate:
    """Monte-Carlo average of the product of all parties' responses."""
    return lhv_correlations_mc([settings], samples, seed, c, chunk_size, threads)[0]


def _rotation_to_z(u: np.ndarray) -> np.ndarray:
    """Orthogonal R with R u = e_z."""
    u = u / np.linalg.norm(u)
    helper = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - (helper @ u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return np.stack([e1, e2, u])


def lhv_correlation_exact(settings: Sequence[Measurement], c: float = 1.0,
                          degree: int = DEFAULT_DEGREE) -> float:
    """The model's correlation as an exact sphere integral (qubits only).

    Party A's answer jumps across the great circle orthogonal to its
    measurement direction; rotating that direction onto e_z turns the jump
    into sign(Omega_z), which the octant rule integrates exactly.
    """
    if any(m.dim != 2 for m in settings):
        raise ValueError("exact evaluation is implemented for qubits only")
    d0, d1, u = settings[0].qubit_deterministic()
    if d1 == 0.0:
        nodes = sphere_quadrature(degree).nodes
        weights = sphere_quadrature(degree).weights
        first = np.full(len(nodes), d0)
        rot = np.eye(3)
    else:
        rule = full_octant_rule(degree)
        nodes, weights = rule.nodes, rule.weights
        first = d0 + c * d1 * sign(nodes[:, 2])
        rot = _rotation_to_z(u)
    prod = first
    for m in settings[1:]:
        a0, a = m.qubit_affine()
        # Omega = R^T Omega' with Omega' the rule node
        prod = prod * (a0 + nodes @ (rot @ a))
    return float(weights @ prod)


def quantum_correlation(rho: DensityMatrix, settings: Sequence[Measurement]) -> float:
    """Tr(M_1 x ... x M_n rho)."""
    if len(settings) != rho.n_parties or any(m.dim != d for m, d in zip(settings, rho.dims)):
        raise ValueError("settings do not match the state's subsystems")
    op = kron(*(m.matrix for m in settings))
    return float(np.trace(op @ rho.matrix).real)


def sample_rounds(settings: Sequence[Measurement], rounds: int, rng: np.random.Generator,
                  c: float = 1.0) -> np.ndarray:
    """Outcomes of ``rounds`` independent rounds of the model, shape (rounds, n)."""
    d = _check_settings(settings)
    omegas = haar_pure_states(d, rounds, rng)
    out = np.empty((rounds, len(settings)))
    first = settings[0]
    det = _deterministic_batch(first, omegas)
    # with probability 1 - c, party A answers from the maximally mixed state
    ranks = np.trace(first.projectors, axis1=1, axis2=2).real
    noisy = first.values[rng.choice(len(ranks), size=rounds, p=ranks / ranks.sum())]
    out[:, 0] = np.where(rng.random(rounds) < c, det, noisy)
    for i, m in enumerate(settings[1:], start=1):
        probs = _overlaps(m, omegas)
        cum = np.cumsum(probs, axis=1)
        draws = rng.random(rounds)[:, None] * cum[:, -1:]
        k = np.minimum((draws >= cum).sum(axis=1), len(m.values) - 1)
        out[:, i] = m.values[k]
    return out


def sample_round(settings: Sequence[Measurement], rng: np.random.Generator,
                 c: float = 1.0) -> tuple[float, ...]:
    return tuple(sample_rounds(settings, 1, rng, c)[0])


def sample_rounds_for_omega(settings: Sequence[Measurement], omega: np.ndarray, rounds: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Rounds at a fixed hidden variable (c = 1), shape (rounds, n)."""
    omega = np.asarray(omega, dtype=complex)[None]
    out = np.empty((rounds, len(settings)))
    out[:, 0] = _deterministic_batch(settings[0], omega)[0]
    for i, m in enumerate(settings[1:], start=1):
        probs = _overlaps(m, omega)[0]
        out[:, i] = m.values[rng.choice(len(probs), size=rounds, p=probs / probs.sum())]
    return out


# ----------------------------------------------------------------------------
# agreement between the model and quantum predictions

def random_qubit_settings(n: int, count: int, rng: np.random.Generator,
                          pauli_first: bool = False) -> list[list[Measurement]]:
    """``count`` tuples of Haar-random qubit directions.

    With ``pauli_first`` party A measures a random signed Pauli axis.
    """
    out = []
    for _ in range(count):
        dirs = random_directions(n, rng)
        tup = [Measurement.from_bloch(v) for v in dirs]
        if pauli_first:
            axis = "xyz"[rng.integers(3)]
            tup[0] = Measurement.pauli(axis, 1 if rng.random() < 0.5 else -1)
        out.append(tup)
    return out


def marginal_subsets(n: int) -> list[tuple[int, ...]]:
    """Every nonempty subset of parties, full set first."""
    subsets = []
    for size in range(n, 0, -1):
        subsets.extend(itertools.combinations(range(n), size))
    return subsets


def restrict(settings: Sequence[Measurement], subset: Sequence[int]) -> list[Measurement]:
    return [m if i in subset else Measurement.identity(m.dim) for i, m in enumerate(settings)]


def agreement_test(n: int = 3, c: float = 1.0, settings_count: int = 100, samples: int = 1_000_000,
                   seed: int = 42, z_threshold: float = 5.0, abs_cap: float = 1e-2,
                   exact_tol: float = 1e-10, threads: int = 1) -> dict:
    """Compare the model with quantum predictions on random settings.

    Parties beyond A use Haar-random directions; for n >= 4 party A is
    restricted to signed Pauli axes. Every marginal subset is compared too.
    A comparison passes when the Monte-Carlo deviation is within
    ``z_threshold`` standard errors and below ``abs_cap``, and the exact
    integral agrees within ``exact_tol``.
    """
    if n not in (2, 3, 4, 5):
        raise ValueError("n must be in 2..5")
    rng = chunk_rng(seed, 1 << 20)
    tuples = random_qubit_settings(n, settings_count, rng, pauli_first=n >= 4)
    rho = rho_nc_quadrature(n, c)
    subsets = marginal_subsets(n)
    flat = [restrict(t, s) for t in tuples for s in subsets]
    mc = lhv_correlations_mc(flat, samples, seed, c, threads=threads)
    rows = []
    for k, settings in enumerate(flat):
        q = quantum_correlation(rho, settings)
        ex = lhv_correlation_exact(settings, c)
        est = mc[k]
        delta = abs(est.value - q)
        z = delta / est.std_err if est.std_err > 0 else (0.0 if delta < 1e-12 else np.inf)
        rows.append({
            "tuple": k // len(subsets),
            "subset": list(subsets[k % len(subsets)]),
            "quantum": q,
            "lhv_exact": ex,
            "lhv_mc": est.value,
            "std_err": est.std_err,
            "abs_dev_mc": delta,
            "z": float(z),
            "abs_dev_exact": abs(ex - q),
        })
    max_dev = max(r["abs_dev_mc"] for r in rows)
    max_z = max(r["z"] for r in rows)
    max_exact = max(r["abs_dev_exact"] for r in rows)
    within_loose = all(r["abs_dev_mc"] <= max(z_threshold * r["std_err"], abs_cap) for r in rows)
    within_strict = all(r["abs_dev_mc"] <= abs_cap and r["z"] <= z_threshold for r in rows)
    return {
        "n": n,
        "c": c,
        "settings_count": settings_count,
        "comparisons": len(rows),
        "samples": samples,
        "seed": seed,
        "party_a_restricted_to_pauli": n >= 4,
        "max_abs_dev_mc": max_dev,
        "max_z": max_z,
        "max_abs_dev_exact": max_exact,
        "pass_mc_max_rule": bool(within_loose),
        "pass_mc_strict": bool(within_strict),
        "pass_exact": bool(max_exact <= exact_tol),
        "passed": bool(within_strict and max_exact <= exact_tol),
        "rows": rows,
    }
