"""Dense linear algebra on small multipartite systems.

Party A is the leftmost (most significant) tensor factor everywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
MAX_DIM = 64

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": SX, "Y": SY, "Z": SZ}
SIGMAS = (SX, SY, SZ)


@dataclass(frozen=True)
class DensityMatrix:
    """A square complex matrix together with its subsystem dimensions.

    Unit trace and Hermiticity are checked on construction. Positivity is
    not required (several operators in this package are deliberately
    non-physical); use :meth:`is_physical` for that.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        if any(d < 2 for d in dims):
            raise ValueError(f"all local dimensions must be >= 2, got {dims}")
        if int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix size {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m) - 1) > HERMITIAN_TOL:
            raise ValueError(f"trace is {np.trace(m)}, expected 1")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return hermitian_eigenvalues(self.matrix)[0]

    def is_physical(self, tol: float = PSD_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def to_json_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "real": self.matrix.real.tolist(),
            "imag": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DensityMatrix":
        m = np.asarray(data["real"], dtype=float) + 1j * np.asarray(data["imag"], dtype=float)
        return cls(m, tuple(data["dims"]))


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    return reduce(np.kron, mats)


def _check_parties(parties: Iterable[int], n: int) -> list[int]:
    parties = list(parties)
    for p in parties:
        if not isinstance(p, (int, np.integer)) or p < 0 or p >= n:
            raise ValueError(f"invalid party index {p} for {n} parties")
    if len(set(parties)) != len(parties):
        raise ValueError(f"repeated party index in {parties}")
    return parties


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(_check_parties(keep, rho.n_parties))
    if not keep:
        raise ValueError("keep must be nonempty")
    n = rho.n_parties
    t = rho.matrix.reshape(rho.dims * 2)
    traced = [p for p in range(n) if p not in keep]
    # trace the highest index first so remaining axis numbers stay valid
    for count, p in enumerate(sorted(traced, reverse=True)):
        cur = n - count
        t = np.trace(t, axis1=p, axis2=p + cur)
    dims = tuple(rho.dims[p] for p in keep)
    d = int(np.prod(dims))
    return DensityMatrix(t.reshape(d, d), dims)


def partial_transpose(rho: DensityMatrix, party: int | Iterable[int]) -> np.ndarray:
    parties = [party] if isinstance(party, (int, np.integer)) else list(party)
    parties = _check_parties(parties, rho.n_parties)
    n = rho.n_parties
    t = rho.matrix.reshape(rho.dims * 2)
    axes = list(range(2 * n))
    for p in parties:
        axes[p], axes[p + n] = axes[p + n], axes[p]
    return t.transpose(axes).reshape(rho.dim, rho.dim)


def hermitian_eigenvalues(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix (LAPACK ``heevd``)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def permutation_operator(perm: Sequence[int], local_dim: int = 2) -> np.ndarray:
    """Unitary that moves the tensor factor at position k to position perm[k].

    ``permutation_operator((1, 0))`` is the two-party swap.
    """
    perm = tuple(int(p) for p in perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    d = local_dim**n
    # output factor at position perm[k] comes from input factor k
    inv = [0] * n
    for k, p in enumerate(perm):
        inv[p] = k
    idx = np.arange(d).reshape((local_dim,) * n)
    out_idx = idx.transpose(inv).reshape(-1)
    v = np.zeros((d, d), dtype=complex)
    v[np.arange(d), out_idx] = 1.0
    return v


def swap_operator(i: int, j: int, n: int, local_dim: int = 2) -> np.ndarray:
    """Exchange of parties i and j among n."""
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return permutation_operator(perm, local_dim)


def cycle_count(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycles += 1
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
    return cycles


def pauli_string_matrix(label: str) -> np.ndarray:
    return kron(*(PAULIS[ch] for ch in label))


def _pauli_contract(m: np.ndarray, n: int) -> np.ndarray:
    # stack[a, i, j] = P_a[j, i], so contracting (row, col) gives Tr(P_a m_local)
    stack = np.stack([PAULIS[k].T for k in "IXYZ"])
    t = m.reshape((2,) * (2 * n))
    for k in range(n):
        remaining = n - k
        # row axis of the next party is 0, its column axis sits after the remaining rows
        t = np.tensordot(t, stack, axes=([0, remaining], [1, 2]))
    return t


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """Array ``c[a1, ..., an] = Tr(m P_a1 x ... x P_an) / 2**n`` with a in I, X, Y, Z order."""
    m = np.asarray(m, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    if 2**n != m.shape[0]:
        raise ValueError("matrix size is not a power of two")
    return _pauli_contract(m, n) / 2**n


def pauli_expand(rho: DensityMatrix | np.ndarray, tol: float = 0.0) -> dict[str, float]:
    """Coefficients ``Tr(rho s) / 2**n`` for every Pauli string s.

    Strings whose coefficient magnitude is <= tol are omitted. Plain
    Hermitian arrays are accepted as well as density matrices.
    """
    if isinstance(rho, DensityMatrix):
        if any(d != 2 for d in rho.dims):
            raise ValueError("pauli_expand needs qubit subsystems only")
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
    coeffs = pauli_coefficients(m).real
    out = {}
    for index in itertools.product(range(4), repeat=coeffs.ndim):
        val = float(coeffs[index])
        if abs(val) > tol:
            out["".join("IXYZ"[a] for a in index)] = val
    return out


def pauli_reconstruct(coeffs: dict[str, float]) -> np.ndarray:
    n = len(next(iter(coeffs)))
    m = np.zeros((2**n, 2**n), dtype=complex)
    for label, c in coeffs.items():
        m += c * pauli_string_matrix(label)
    return m


def distinct_permutations(label: str) -> list[str]:
    """All distinct rearrangements of a Pauli label (the Pi[.] sum)."""
    return sorted(set("".join(p) for p in itertools.permutations(label)))


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))
