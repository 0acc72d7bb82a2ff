"""The two ways the model fails to generalize.

Four qubits: the only U^{x4}-invariant candidate matching the model's
xxyy correlation (K = 1/128) predicts -3/8 for xxxx while the model gives
-1/4.

Three qutrits: party A's answer depends on how a degenerate observable is
split into projectors. M_A = |1><1| measured with the projectors
{|1>, |2'>, |3'>} gives a correlation that changes with the choice of
|2'>, |3'>, so no quantum state reproduces it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lhv import CorrelationEstimate, Measurement, lhv_correlation_exact
from .sampling import DEFAULT_CHUNK, haar_pure_states, map_chunks
from .tensor import distinct_permutations

CANDIDATE_K = 1 / 128
QUTRIT_UNPRIMED = 13 / 162
QUTRIT_EQUAL_SPLIT = 15 / 162
QUTRIT_SAMPLES = 10_000_000


@dataclass(frozen=True)
class CandidateCorrelator:
    """Four-body part of the candidate state: -K (3 sum_k s_k^x4 + sum_{l<k} Pi[s_k s_k s_l s_l])."""

    K: float

    def pauli_terms(self) -> dict[str, float]:
        terms = {k * 4: -3 * self.K for k in "XYZ"}
        for l, k in (("X", "Y"), ("X", "Z"), ("Y", "Z")):
            for label in distinct_permutations(k + k + l + l):
                terms[label] = -self.K
        return terms


def _pauli_label(m: Measurement) -> tuple[str, int]:
    """('X'|'Y'|'Z', +-1) for a signed Pauli measurement."""
    if m.dim != 2 or m.is_trivial:
        raise ValueError("setting must be a signed Pauli observable")
    a0, a = m.qubit_affine()
    nz = np.flatnonzero(np.abs(a) > 1e-12)
    if abs(a0) > 1e-12 or len(nz) != 1 or abs(abs(a[nz[0]]) - 1) > 1e-12:
        raise ValueError("setting must be +-sigma_x, +-sigma_y or +-sigma_z")
    return "XYZ"[nz[0]], int(np.sign(a[nz[0]]))


def candidate_fourbody(corr: CandidateCorrelator, settings: list[Measurement]) -> float:
    """Tr(s_A s_B s_C s_D rho') for signed Pauli settings.

    Only the K-term contributes to full four-body Pauli correlations, and
    Tr(s s') = 16 delta_{s s'} for four-qubit Pauli strings.
    """
    if len(settings) != 4:
        raise ValueError("need four settings")
    label, sgn = "", 1
    for m in settings:
        axis, s = _pauli_label(m)
        label += axis
        sgn *= s
    return sgn * 16 * corr.pauli_terms().get(label, 0.0)


def four_qubit_mismatch_report(K: float = CANDIDATE_K) -> dict:
    x, y = Measurement.pauli("x"), Measurement.pauli("y")
    corr = CandidateCorrelator(K)
    lhv_xxxx = lhv_correlation_exact([x, x, x, x])
    lhv_xxyy = lhv_correlation_exact([x, x, y, y])
    cand_xxxx = candidate_fourbody(corr, [x, x, x, x])
    cand_xxyy = candidate_fourbody(corr, [x, x, y, y])
    mismatch = abs(lhv_xxxx - cand_xxxx) > 1e-10
    return {
        "K": K,
        "lhv_value": {"xxxx": lhv_xxxx, "xxyy": lhv_xxyy},
        "candidate_value": {"xxxx": cand_xxxx, "xxyy": cand_xxyy},
        "xxyy_fixed_by_K": abs(lhv_xxyy - cand_xxyy) <= 1e-10,
        "mismatch": mismatch,
        "gap": cand_xxxx - lhv_xxxx,
        "verdict": ("NO_GO: no four-qubit matrix reproduces the model's correlations"
                    if mismatch else "NO_MISMATCH"),
    }


# ----------------------------------------------------------------------------
# qutrit inconsistency

@dataclass(frozen=True)
class PrimedBasis:
    """|2'> = alpha|2> + beta|3>, |3'> = conj(beta)|2> - conj(alpha)|3>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1) > 1e-12:
            raise ValueError("|alpha|^2 + |beta|^2 must be 1")

    def matrix(self) -> np.ndarray:
        """Columns |1>, |2'>, |3'> in the computational basis."""
        a, b = complex(self.alpha), complex(self.beta)
        return np.array([
            [1, 0, 0],
            [0, a, np.conj(b)],
            [0, b, -np.conj(a)],
        ], dtype=complex)

    def measurement(self) -> Measurement:
        """M_A' = |1><1| with outcome values (1, 0, 0) on the primed projectors."""
        return Measurement.from_basis([1.0, 0.0, 0.0], self.matrix())


def qutrit_analytic(basis: PrimedBasis) -> float:
    a2, b2 = abs(basis.alpha) ** 2, abs(basis.beta) ** 2
    return float(13 / 162 * (a2**2 + b2**2) + 17 / 81 * a2 * b2)


def _qutrit_chunk(basis_t: np.ndarray, d: int):
    def run(rng, size):
        omegas = haar_pure_states(d, size, rng)
        coeffs = omegas @ basis_t  # <k'|omega> for each primed vector k'
        u = np.abs(coeffs) ** 2
        in_s = (u[:, 0] < u[:, 1]) & (u[:, 0] < u[:, 2]) if d == 3 else (u[:, 0] < u[:, 1])
        p2 = np.abs(omegas[:, 1]) ** 2
        vals = np.where(in_s, p2**2, 0.0)
        return vals.sum(), (vals**2).sum(), in_s.sum()
    return run


def _qutrit_run(basis_matrix: np.ndarray, samples: int, seed: int, chunk_size: int, threads: int):
    d = basis_matrix.shape[0]
    parts = map_chunks(_qutrit_chunk(basis_matrix.conj(), d), samples, seed, chunk_size, threads)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    hits = sum(int(p[2]) for p in parts)
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0) * samples / max(samples - 1, 1)
    return CorrelationEstimate(float(mean), float(np.sqrt(var / samples)), samples, seed), hits / samples


def qutrit_model_correlation(basis: PrimedBasis, samples: int = QUTRIT_SAMPLES, seed: int = 42,
                             chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> CorrelationEstimate:
    """<M_A' x M_B x M_C> of the qutrit model with M_B = M_C = |2><2|.

    Party A answers 1 exactly when |1> is the least likely primed outcome
    (strict inequalities), so the correlation is the average of
    <omega|2><2|omega>^2 over that region.
    """
    return _qutrit_run(basis.matrix(), samples, seed, chunk_size, threads)[0]


def qutrit_region_probability(basis: PrimedBasis, samples: int = 1_000_000, seed: int = 42) -> CorrelationEstimate:
    """Fraction of hidden variables for which party A answers 1 (expected 1/3)."""
    _, frac = _qutrit_run(basis.matrix(), samples, seed, DEFAULT_CHUNK, 1)
    return CorrelationEstimate(frac, float(np.sqrt(frac * (1 - frac) / samples)), samples, seed)


def qubit_control(phase: float = 0.7, samples: int = 1_000_000, seed: int = 42) -> dict:
    """The qubit analogue: re-phasing |2> cannot change the model's answer."""
    plain = np.eye(2, dtype=complex)
    phased = np.diag([1.0, np.exp(1j * phase)])
    a, _ = _qutrit_run(plain, samples, seed, DEFAULT_CHUNK, 1)
    b, _ = _qutrit_run(phased, samples, seed, DEFAULT_CHUNK, 1)
    return {"unprimed": a.value, "primed": b.value, "gap": b.value - a.value, "std_err": a.std_err}


def qutrit_inconsistency_report(samples: int = QUTRIT_SAMPLES, seed: int = 42,
                                threads: int = 1) -> dict:
    unprimed = PrimedBasis(1.0, 0.0)
    primed = PrimedBasis(1 / np.sqrt(2), 1 / np.sqrt(2))
    est_u = qutrit_model_correlation(unprimed, samples, seed, threads=threads)
    # an independent stream for the primed estimate keeps the two errors uncorrelated
    est_p = qutrit_model_correlation(primed, samples, seed + 1, threads=threads)
    gap_mc = est_p.value - est_u.value
    gap_err = float(np.hypot(est_u.std_err, est_p.std_err))
    exact_gap = Fraction(15, 162) - Fraction(13, 162)
    return {
        "unprimed_value": est_u.value,
        "primed_value": est_p.value,
        "unprimed_analytic": qutrit_analytic(unprimed),
        "primed_analytic": qutrit_analytic(primed),
        "gap": gap_mc,
        "gap_analytic": float(exact_gap),
        "gap_analytic_fraction": str(exact_gap),
        "std_err": gap_err,
        "gap_sigma": gap_mc / gap_err,
        "unprimed_std_err": est_u.std_err,
        "primed_std_err": est_p.std_err,
        "samples": samples,
        "seed": seed,
        "verdict": ("INCONSISTENT: same observable, different correlations"
                    if gap_mc / gap_err >= 5 else "NOT_RESOLVED"),
    }
