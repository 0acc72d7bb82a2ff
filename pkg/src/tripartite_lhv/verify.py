"""The claim table: one check per acceptance criterion.

Each check returns a :class:`ClaimResult` holding the measured numbers so
callers can re-assert them independently.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import entanglement as ent
from .extensions import extension_for_p, max_psd_c
from .lhv import agreement_test
from .nogo import (
    PrimedBasis,
    four_qubit_mismatch_report,
    qutrit_analytic,
    qutrit_inconsistency_report,
    qutrit_model_correlation,
)
from .sampling import chunk_rng, moment_oracle_check
from .states import (
    rho_nc_closed_form,
    rho_nc_monte_carlo,
    rho_nc_quadrature,
    werner,
)
from .tensor import DensityMatrix, kron, max_abs, partial_trace, partial_transpose, pauli_expand, pauli_reconstruct


@dataclass
class ClaimResult:
    number: int
    name: str
    passed: bool
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.name}"


def to_json(obj) -> str:
    """Deterministic JSON: sorted keys, full double precision."""
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"cannot serialize {type(o)}")
    return json.dumps(obj, sort_keys=True, indent=2, default=default)


def claim_state_identity() -> ClaimResult:
    devs = {c: max_abs(rho_nc_quadrature(2, c).matrix - werner(c / 2).matrix) for c in (0.0, 0.5, 1.0)}
    return ClaimResult(1, "two-party family equals werner(c/2)", max(devs.values()) <= 1e-12,
                       {"max_dev": devs})


def claim_closed_forms(mc_samples: int = 1_000_000) -> ClaimResult:
    vals = {}
    for n in (3, 4):
        for c in (0.0, 0.5, 1.0):
            vals[f"quad_vs_closed_n{n}_c{c}"] = max_abs(
                rho_nc_quadrature(n, c).matrix - rho_nc_closed_form(n, c).matrix)
        vals[f"mc_vs_closed_n{n}"] = max_abs(
            rho_nc_monte_carlo(n, 1.0, mc_samples, seed=42).matrix - rho_nc_closed_form(n, 1.0).matrix)
    quad_ok = all(v <= 1e-12 for k, v in vals.items() if k.startswith("quad"))
    mc_ok = all(v <= 5e-3 for k, v in vals.items() if k.startswith("mc"))
    return ClaimResult(2, "quadrature and Monte-Carlo match the closed forms", quad_ok and mc_ok, vals)


def claim_moments() -> ClaimResult:
    report = moment_oracle_check()
    return ClaimResult(3, "sphere moment identities by octant quadrature",
                       report["max_quadrature_deviation"] <= 1e-12, report)


def claim_agreement(samples: int = 1_000_000, settings_count: int = 100) -> ClaimResult:
    report = agreement_test(3, 1.0, settings_count, samples, seed=42)
    summary = {k: v for k, v in report.items() if k != "rows"}
    return ClaimResult(4, "three-qubit model agrees with quantum predictions",
                       report["pass_mc_max_rule"] and report["pass_exact"], summary)


def claim_entanglement() -> ClaimResult:
    cs = (0.0, 0.5, 2 / 3, float(ent.GENUINE_C_THRESHOLD), 1.0)
    r1_dev = max(abs(ent.r1_r2(rho_nc_quadrature(3, c)).r1 - (2 + 3 * c) / 6) for c in cs)
    bound_dev = abs(ent.max_r1_grid_search(10_000) - ent.BISEP_R1_BOUND)
    c_star = float(ent.GENUINE_C_THRESHOLD)
    above = ent.genuine_tripartite_verdict(rho_nc_quadrature(3, c_star + 1e-6)).verdict
    below = ent.genuine_tripartite_verdict(rho_nc_quadrature(3, c_star - 1e-6)).verdict
    ok = r1_dev <= 1e-12 and bound_dev <= 1e-6 and above == "GENUINE" and below == "INCONCLUSIVE"
    return ClaimResult(5, "r1 formula, biseparable bound and verdict threshold", ok, {
        "r1_max_dev": r1_dev, "bound_dev": bound_dev, "verdict_above": above, "verdict_below": below,
    })


def claim_distillability() -> ClaimResult:
    crossing = ent.pt_crossing()
    bc = {c: ent.distillability_report(c)["negativity"]["BC"] for c in (0.0, 0.25, 0.5, 2 / 3, 0.9, 1.0)}
    ok = abs(crossing - 2 / 3) <= 1e-6 and max(bc.values()) <= 1e-10
    return ClaimResult(6, "AB marginal turns NPT at c = 2/3, BC never does", ok,
                       {"crossing": crossing, "bc_negativity": bc})


def claim_extensions() -> ClaimResult:
    certs = {f"n{n}_p{p:.6f}": extension_for_p(n, p).to_dict() for n, p in ((3, 2 / 3), (4, 5 / 9), (5, 1 / 2))}
    ranges = {n: (max_psd_c(n, True), max_psd_c(n, False)) for n in (3, 4, 5)}
    ok = all(c["valid"] and c["min_eigenvalue"] >= -1e-10 and c["marginal_error"] <= 1e-10
             for c in certs.values())
    ok = ok and all(t >= u for t, u in ranges.values())
    return ClaimResult(7, "symmetric extensions at p = 2/3, 5/9, 1/2", ok, {
        "certificates": certs,
        "max_psd_c": {str(n): {"twirled": t, "untwirled": u} for n, (t, u) in ranges.items()},
    })


def claim_four_qubit() -> ClaimResult:
    r = four_qubit_mismatch_report()
    ok = (abs(r["lhv_value"]["xxxx"] + 0.25) <= 1e-12 and abs(r["lhv_value"]["xxyy"] + 0.125) <= 1e-12
          and abs(r["candidate_value"]["xxxx"] + 0.375) <= 1e-12
          and abs(r["candidate_value"]["xxyy"] + 0.125) <= 1e-12 and r["mismatch"])
    return ClaimResult(8, "four-qubit candidate fails on xxxx", ok, r)


def claim_qutrit(samples: int = 10_000_000, random_bases: int = 10) -> ClaimResult:
    r = qutrit_inconsistency_report(samples, seed=42)
    ok_values = (abs(r["unprimed_value"] - 13 / 162) <= 5 * r["unprimed_std_err"]
                 and abs(r["primed_value"] - 15 / 162) <= 5 * r["primed_std_err"]
                 and max(r["unprimed_std_err"], r["primed_std_err"]) <= 1e-3)
    rng = chunk_rng(42, 7)
    checks = []
    for k in range(random_bases):
        a_abs = rng.uniform(0, 1)
        phases = rng.uniform(0, 2 * np.pi, size=2)
        basis = PrimedBasis(a_abs * np.exp(1j * phases[0]), np.sqrt(1 - a_abs**2) * np.exp(1j * phases[1]))
        est = qutrit_model_correlation(basis, samples, seed=1000 + k)
        exact = qutrit_analytic(basis)
        checks.append({"abs_alpha": a_abs, "mc": est.value, "std_err": est.std_err,
                       "analytic": exact, "z": abs(est.value - exact) / est.std_err})
    ok_random = all(c["z"] <= 5 for c in checks)
    ok_gap = r["gap_sigma"] >= 5
    return ClaimResult(9, "qutrit model is not self-consistent", ok_values and ok_random and ok_gap,
                       {"report": r, "random_bases": checks})


def tensor_property_sweep(cases: int = 1000, seed: int = 42) -> dict:
    """Round-trip and linearity invariants of the tensor core on random inputs."""
    rng = chunk_rng(seed, 3)

    def herm(d):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = g @ g.conj().T
        return h / np.trace(h).real

    worst = {"pauli_roundtrip": 0.0, "kron_assoc": 0.0, "ptrace_product": 0.0,
             "ptrace_linear": 0.0, "pt_involution": 0.0, "pauli_linear": 0.0}
    for _ in range(cases):
        a, b, c = herm(2), herm(2), herm(2)
        h3 = herm(8)
        worst["pauli_roundtrip"] = max(worst["pauli_roundtrip"], max_abs(pauli_reconstruct(pauli_expand(h3)) - h3))
        worst["kron_assoc"] = max(worst["kron_assoc"], max_abs(np.kron(np.kron(a, b), c) - np.kron(a, np.kron(b, c))))
        ab = DensityMatrix(kron(a, b), (2, 2))
        worst["ptrace_product"] = max(worst["ptrace_product"], max_abs(partial_trace(ab, [0]).matrix - a * np.trace(b)))
        x, y = herm(8), herm(8)
        t = rng.uniform()
        mix = DensityMatrix(t * x + (1 - t) * y, (2, 2, 2))
        lin = t * partial_trace(DensityMatrix(x, (2, 2, 2)), [0, 2]).matrix + \
            (1 - t) * partial_trace(DensityMatrix(y, (2, 2, 2)), [0, 2]).matrix
        worst["ptrace_linear"] = max(worst["ptrace_linear"], max_abs(partial_trace(mix, [0, 2]).matrix - lin))
        pt = partial_transpose(DensityMatrix(partial_transpose(mix, 1), (2, 2, 2)), 1)
        worst["pt_involution"] = max(worst["pt_involution"], max_abs(pt - mix.matrix))
        px, py, pm = pauli_expand(x), pauli_expand(y), pauli_expand(mix)
        worst["pauli_linear"] = max(worst["pauli_linear"],
                                    max(abs(pm[k] - t * px[k] - (1 - t) * py[k]) for k in pm))
    return worst


def claim_properties(cases: int = 1000) -> ClaimResult:
    worst = tensor_property_sweep(cases)
    first = to_json({k: v for k, v in agreement_test(3, 1.0, 5, 20_000, seed=42).items()})
    second = to_json({k: v for k, v in agreement_test(3, 1.0, 5, 20_000, seed=42).items()})
    ok = max(worst.values()) <= 1e-12 and first == second
    return ClaimResult(10, "tensor invariants and seeded determinism", ok,
                       {"worst": worst, "byte_identical": first == second})


CLAIMS: list[Callable[[], ClaimResult]] = [
    claim_state_identity,
    claim_closed_forms,
    claim_moments,
    claim_agreement,
    claim_entanglement,
    claim_distillability,
    claim_extensions,
    claim_four_qubit,
    claim_qutrit,
    claim_properties,
]


def run_all(echo: Callable[[str], None] | None = print) -> list[ClaimResult]:
    results = []
    for claim in CLAIMS:
        res = claim()
        if echo:
            echo(res.line())
        results.append(res)
    return results
