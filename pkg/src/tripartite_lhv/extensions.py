"""Symmetric extensions of two-qubit Werner states from the rho^(n,c) family.

An n-qubit operator H is a (1, n-1) symmetric extension of a two-qubit
state rho when it is positive semidefinite, its marginal on the first two
parties is rho, and it is invariant under permutations of parties 2..n.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .sampling import chunk_rng, haar_pure_states
from .states import SUPPORTED_N, family_state, werner
from .tensor import PSD_TOL, DensityMatrix, hermitian_eigenvalues, partial_trace, permutation_operator

CERT_TOL = 1e-10
BISECTION_BRACKET = (0.0, 4.0)
BISECTION_STEPS = 60


@dataclass(frozen=True)
class ExtensionCertificate:
    n: int
    c: float | None
    twirled: bool | None
    target_p: float | None
    min_eigenvalue: float
    marginal_error: float
    symmetry_error: float

    @property
    def valid(self) -> bool:
        return (self.min_eigenvalue >= -CERT_TOL and self.marginal_error <= CERT_TOL
                and self.symmetry_error <= CERT_TOL)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["valid"] = self.valid
        return out


def symmetry_error(rho: DensityMatrix) -> float:
    """Largest change of rho under any permutation of parties 2..n."""
    n = rho.n_parties
    worst = 0.0
    for tail in itertools.permutations(range(1, n)):
        v = permutation_operator((0,) + tail, rho.dims[0])
        worst = max(worst, float(np.max(np.abs(v @ rho.matrix @ v.conj().T - rho.matrix))))
    return worst


def verify_extension(rho: DensityMatrix, target: DensityMatrix, *, c: float | None = None,
                     twirled: bool | None = None, target_p: float | None = None) -> ExtensionCertificate:
    if target.dims != (2, 2):
        raise ValueError("target must be a two-qubit state")
    if rho.n_parties < 3 or any(d != 2 for d in rho.dims):
        raise ValueError("candidate extension must have at least three qubits")
    marginal = partial_trace(rho, (0, 1))
    return ExtensionCertificate(
        n=rho.n_parties,
        c=c,
        twirled=twirled,
        target_p=target_p,
        min_eigenvalue=float(hermitian_eigenvalues(rho.matrix)[0]),
        marginal_error=float(np.max(np.abs(marginal.matrix - target.matrix))),
        symmetry_error=symmetry_error(rho),
    )


def family_extension(n: int, c: float, twirled: bool) -> ExtensionCertificate:
    """Certificate that the family state at (n, c) extends werner(c/2)."""
    return verify_extension(family_state(n, c, twirled), werner(c / 2), c=c, twirled=twirled, target_p=c / 2)


def extension_for_p(n: int, p: float, twirled: bool = True) -> ExtensionCertificate:
    return family_extension(n, 2 * p, twirled)


def max_psd_c(n: int, twirled: bool, tol: float = 1e-12) -> float:
    """Largest c in [0, 4] for which the family state is positive semidefinite.

    The state is affine in c, so its smallest eigenvalue is concave in c and
    the PSD set is an interval containing c = 0.
    """
    if n not in SUPPORTED_N:
        raise ValueError(f"n must be one of {SUPPORTED_N}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    base = family_state(n, 0.0, twirled).matrix
    slope = family_state(n, 1.0, twirled).matrix - base

    def min_eig(c):
        return hermitian_eigenvalues(base + c * slope)[0]

    lo, hi = BISECTION_BRACKET
    if min_eig(hi) >= -PSD_TOL:
        return hi
    for _ in range(BISECTION_STEPS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if min_eig(mid) >= -PSD_TOL:
            lo = mid
        else:
            hi = mid
    return lo


def quasi_extension_check(rho: DensityMatrix | np.ndarray, trials: int = 10_000, refine: int = 20,
                          seed: int = 42, threshold: float = -1e-9) -> bool:
    """Heuristic test that <phi|rho|phi> >= 0 on product states.

    Minimizes the expectation over random product states, then polishes the
    best candidates by alternating single-party minimization. Returns False
    only when a value below ``threshold`` is actually found.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    rng = chunk_rng(seed, 0)
    locals_ = [haar_pure_states(2, trials, rng) for _ in range(n)]
    states = locals_[0]
    for loc in locals_[1:]:
        states = np.einsum("ni,nj->nij", states, loc).reshape(trials, -1)
    vals = np.einsum("ni,ij,nj->n", states.conj(), m, states).real
    if vals.min() < threshold:
        return False
    eye = np.eye(2)
    for idx in np.argsort(vals)[:5]:
        parts = [loc[idx].copy() for loc in locals_]
        for _ in range(refine):
            for k in range(n):
                # columns: product states with party k set to |0>, |1>
                cols = []
                for a in range(2):
                    vec = np.ones(1, dtype=complex)
                    for j in range(n):
                        vec = np.kron(vec, eye[a] if j == k else parts[j])
                    cols.append(vec)
                embed = np.stack(cols, axis=1)
                w, v = np.linalg.eigh(embed.conj().T @ m @ embed)
                parts[k] = v[:, 0]
                if w[0] < threshold:
                    return False
    return True
