"""Partial-transpose tests and the (r1, r2) projection of three-qubit states.

r1 and r2 are expectation values of two combinations of the qubit swaps
V_AB, V_BC, V_CA. Pure biseparable states project into three congruent
disks; mixed biseparable states lie in their convex hull, whose largest r1
is (sqrt(13) + 1) / 6. Any state beyond that value is genuinely tripartite
entangled.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull

from .states import maximally_mixed, rho_nc_quadrature, werner
from .tensor import (
    DensityMatrix,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
    permutation_operator,
    swap_operator,
)

BISEP_R1_BOUND = (np.sqrt(13) + 1) / 6
GENUINE_C_THRESHOLD = (np.sqrt(13) - 1) / 3
DISTILLABLE_C_THRESHOLD = 2 / 3
ROTATIONS_DEG = (0.0, 120.0, -120.0)


def negativity(rho: DensityMatrix, party: int | tuple[int, ...] = 1) -> float:
    """Sum of |negative eigenvalues| of the partial transpose on ``party``."""
    eig = hermitian_eigenvalues(partial_transpose(rho, party))
    return max(0.0, float(-eig[eig < 0].sum()))


def min_pt_eigenvalue(rho: DensityMatrix, party: int | tuple[int, ...] = 1) -> float:
    return float(hermitian_eigenvalues(partial_transpose(rho, party))[0])


@lru_cache(maxsize=None)
def r_operators() -> tuple[np.ndarray, np.ndarray]:
    v_ab = swap_operator(0, 1, 3)
    v_bc = swap_operator(1, 2, 3)
    v_ca = swap_operator(2, 0, 3)
    r1 = (2 * v_bc - v_ca - v_ab) / 3
    r2 = (v_ab - v_ca) / np.sqrt(3)
    return r1, r2


@dataclass(frozen=True)
class RegionPoint:
    r1: float
    r2: float


def r1_r2(rho: DensityMatrix) -> RegionPoint:
    if rho.dims != (2, 2, 2):
        raise ValueError("r1_r2 needs a three-qubit state")
    r1, r2 = r_operators()
    return RegionPoint(float(np.trace(r1 @ rho.matrix).real), float(np.trace(r2 @ rho.matrix).real))


# ----------------------------------------------------------------------------
# biseparable region

@dataclass(frozen=True)
class QuadraticDisk:
    """The set (a r1' + b)^2 + r2'^2 <= rhs, with (r1', r2') the point rotated by -angle."""

    a: float
    b: float
    rhs: float
    angle_deg: float

    def _unrotate(self, r1, r2):
        t = np.deg2rad(-self.angle_deg)
        return np.cos(t) * r1 - np.sin(t) * r2, np.sin(t) * r1 + np.cos(t) * r2

    def value(self, r1, r2):
        x, y = self._unrotate(np.asarray(r1, float), np.asarray(r2, float))
        return (self.a * x + self.b) ** 2 + y**2 - self.rhs

    def contains(self, r1, r2, tol: float = 1e-12):
        return self.value(r1, r2) <= tol

    def boundary(self, points: int) -> np.ndarray:
        """``points`` samples of the boundary curve, shape (points, 2)."""
        t = np.linspace(0, 2 * np.pi, points, endpoint=False)
        rad = np.sqrt(self.rhs)
        x = (rad * np.cos(t) - self.b) / self.a
        y = rad * np.sin(t)
        ang = np.deg2rad(self.angle_deg)
        return np.stack([np.cos(ang) * x - np.sin(ang) * y, np.sin(ang) * x + np.cos(ang) * y], axis=1)


@dataclass(frozen=True)
class BisepRegion:
    disks: tuple[QuadraticDisk, ...]
    hull: np.ndarray  # closed polyline, shape (K, 2)

    def max_r1(self) -> float:
        return float(self.hull[:, 0].max())


def bisep_disks() -> tuple[QuadraticDisk, ...]:
    return tuple(QuadraticDisk(np.sqrt(3) / 2, 1 / (2 * np.sqrt(3)), 1 / 3, ang) for ang in ROTATIONS_DEG)


def bisep_region(points_per_arc: int = 720) -> BisepRegion:
    """The three disks and the numerically computed boundary of their convex hull."""
    if points_per_arc < 8:
        raise ValueError("points_per_arc must be >= 8")
    disks = bisep_disks()
    pts = np.concatenate([d.boundary(points_per_arc) for d in disks])
    hull = ConvexHull(pts)
    poly = pts[hull.vertices]
    return BisepRegion(disks, np.vstack([poly, poly[:1]]))


def max_r1_grid_search(points: int = 10_000) -> float:
    """Largest r1 over the disk boundaries, sampled at ``points`` per disk."""
    return float(max(d.boundary(points)[:, 0].max() for d in bisep_disks()))


def fig2_markers() -> list[tuple[str, str, RegionPoint]]:
    """Marker points: rho^(3,1), its qubit permutations, and rho^(2,1) x 1/2 variants."""
    rho3 = rho_nc_quadrature(3, 1.0)
    markers = [("diamond", "rho3_ABC", r1_r2(rho3))]
    seen = set()
    for perm in itertools.permutations(range(3)):
        if perm == (0, 1, 2):
            continue
        v = permutation_operator(perm)
        pt = r1_r2(DensityMatrix(v @ rho3.matrix @ v.conj().T, (2, 2, 2)))
        key = (round(pt.r1, 10), round(pt.r2, 10))
        if key in seen or key == (round(markers[0][2].r1, 10), round(markers[0][2].r2, 10)):
            continue
        seen.add(key)
        markers.append(("circle", "rho3_perm" + "".join(map(str, perm)), pt))
    w = werner(0.5).matrix
    half = np.eye(2) / 2
    for label, pair_first in (("AB", True), ("BC", False)):
        m = kron(w, half) if pair_first else kron(half, w)
        markers.append(("triangle", "werner_" + label, r1_r2(DensityMatrix(m, (2, 2, 2)))))
    v = swap_operator(1, 2, 3)
    m = v @ kron(w, half) @ v
    markers.append(("triangle", "werner_AC", r1_r2(DensityMatrix(m, (2, 2, 2)))))
    return markers


def region_csv(points_per_arc: int = 180) -> str:
    """Rows (curve_id, r1, r2): disk boundaries, hull polyline, then marker points."""
    region = bisep_region(points_per_arc)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["curve_id", "r1", "r2"])
    for i, d in enumerate(region.disks):
        for r1, r2 in d.boundary(points_per_arc):
            writer.writerow([f"disk{i}", repr(float(r1)), repr(float(r2))])
    for r1, r2 in region.hull:
        writer.writerow(["hull", repr(float(r1)), repr(float(r2))])
    writer.writerow(["bound", repr(float(BISEP_R1_BOUND)), "nan"])
    for kind, name, pt in fig2_markers():
        writer.writerow([f"{kind}:{name}", repr(pt.r1), repr(pt.r2)])
    return buf.getvalue()


# ----------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class TripartiteVerdict:
    r1: float
    r2: float
    bound: float
    verdict: str  # GENUINE or INCONCLUSIVE

    def to_dict(self) -> dict:
        return asdict(self)


def genuine_tripartite_verdict(rho: DensityMatrix) -> TripartiteVerdict:
    """One-sided witness: GENUINE when r1 exceeds the biseparable maximum."""
    pt = r1_r2(rho)
    verdict = "GENUINE" if pt.r1 > BISEP_R1_BOUND else "INCONCLUSIVE"
    return TripartiteVerdict(pt.r1, pt.r2, float(BISEP_R1_BOUND), verdict)


def distillability_report(c: float) -> dict:
    rho = rho_nc_quadrature(3, c)
    pairs = {"AB": (0, 1), "AC": (0, 2), "BC": (1, 2)}
    neg = {}
    min_pt = {}
    for name, keep in pairs.items():
        red = partial_trace(rho, keep)
        neg[name] = negativity(red, 1)
        min_pt[name] = min_pt_eigenvalue(red, 1)
    npt = {name: min_pt[name] < -1e-10 for name in pairs}
    return {
        "c": c,
        "negativity": neg,
        "min_pt_eigenvalue": min_pt,
        "npt": npt,
        "ab_ac_distillable": bool(npt["AB"] and npt["AC"]),
        "bc_separable": not npt["BC"],
        "expected_ab_ac_distillable": bool(c > DISTILLABLE_C_THRESHOLD),
    }


def pt_crossing(c_lo: float = 0.0, c_hi: float = 1.0, tol: float = 1e-12) -> float:
    """Bisection for the c where the AB marginal's partial transpose stops being positive."""

    def f(c):
        return min_pt_eigenvalue(partial_trace(rho_nc_quadrature(3, c), (0, 1)), 1)

    lo, hi = c_lo, c_hi
    if not (f(lo) >= 0 > f(hi)):
        raise ValueError("no sign change of the partial-transpose eigenvalue in the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entanglement_report(c: float) -> dict:
    rho = rho_nc_quadrature(3, c)
    return {
        "c": c,
        "verdict": genuine_tripartite_verdict(rho).to_dict(),
        "expected_r1": (2 + 3 * c) / 6,
        "distillability": distillability_report(c),
        "maximally_mixed_r": asdict(r1_r2(maximally_mixed(3))),
    }
