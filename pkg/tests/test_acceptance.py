"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary
(see conftest.py). Run directly with ``python tests/test_acceptance.py`` to
print the lines without pytest.
"""
from tripartite_lhv import verify
from tripartite_lhv.entanglement import BISEP_R1_BOUND, GENUINE_C_THRESHOLD

RESULTS: list[str] = []


def _record(number: int, name: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {name} ({detail})")


def test_criterion_01_state_identity():
    r = verify.claim_state_identity()
    worst = max(r.values["max_dev"].values())
    ok = worst <= 1e-12
    _record(1, "rho^(2,c) = werner(c/2)", ok, f"max dev {worst:.2e} <= 1e-12")
    assert ok


def test_criterion_02_closed_forms():
    r = verify.claim_closed_forms(mc_samples=1_000_000)
    quad = max(v for k, v in r.values.items() if k.startswith("quad"))
    mc = max(v for k, v in r.values.items() if k.startswith("mc"))
    ok = quad <= 1e-12 and mc <= 5e-3
    _record(2, "closed forms n=3,4", ok, f"quadrature {quad:.2e} <= 1e-12, MC(1e6) {mc:.2e} <= 5e-3")
    assert ok


def test_criterion_03_moments():
    r = verify.claim_moments()
    worst = r.values["max_quadrature_deviation"]
    count = sum(1 for k in r.values if k != "max_quadrature_deviation")
    ok = worst <= 1e-12 and count == 7
    _record(3, "moment identities", ok, f"{count} identities, max dev {worst:.2e} <= 1e-12")
    assert ok


def test_criterion_04_agreement():
    r = verify.claim_agreement(samples=1_000_000, settings_count=100)
    v = r.values
    ok = v["pass_mc_max_rule"] and v["max_abs_dev_exact"] <= 1e-10 and v["comparisons"] == 700
    _record(4, "three-qubit LHV agreement", ok,
            f"{v['comparisons']} comparisons, max |MC-q| {v['max_abs_dev_mc']:.2e}, max z {v['max_z']:.2f}, "
            f"max |exact-q| {v['max_abs_dev_exact']:.2e}")
    assert ok


def test_criterion_05_entanglement():
    r = verify.claim_entanglement()
    v = r.values
    ok = (v["r1_max_dev"] <= 1e-12 and v["bound_dev"] <= 1e-6
          and v["verdict_above"] == "GENUINE" and v["verdict_below"] == "INCONCLUSIVE")
    _record(5, "r1, biseparable bound, verdict threshold", ok,
            f"r1 dev {v['r1_max_dev']:.2e}, bound {BISEP_R1_BOUND:.10f} dev {v['bound_dev']:.2e}, "
            f"flip at c = {GENUINE_C_THRESHOLD:.10f}")
    assert ok


def test_criterion_06_distillability():
    r = verify.claim_distillability()
    crossing = r.values["crossing"]
    bc = max(r.values["bc_negativity"].values())
    ok = abs(crossing - 2 / 3) <= 1e-6 and bc <= 1e-12
    _record(6, "distillability", ok, f"AB crossing at {crossing:.12f}, max BC negativity {bc:.1e}")
    assert ok


def test_criterion_07_extensions():
    r = verify.claim_extensions()
    certs = r.values["certificates"]
    min_eig = min(c["min_eigenvalue"] for c in certs.values())
    marg = max(c["marginal_error"] for c in certs.values())
    expected_c = {3: 4 / 3, 4: 10 / 9, 5: 1.0}
    cs_ok = all(abs(c["c"] - expected_c[c["n"]]) <= 1e-12 for c in certs.values())
    ranges = r.values["max_psd_c"]
    range_ok = all(ranges[str(n)]["twirled"] >= ranges[str(n)]["untwirled"] for n in (3, 4, 5))
    ok = all(c["valid"] for c in certs.values()) and min_eig >= -1e-10 and marg <= 1e-10 and cs_ok and range_ok
    _record(7, "symmetric extensions", ok,
            f"min eig {min_eig:.2e}, marginal err {marg:.2e}, twirled range >= untwirled: {range_ok}")
    assert ok


def test_criterion_08_four_qubit():
    r = verify.claim_four_qubit()
    v = r.values
    ok = (abs(v["lhv_value"]["xxxx"] + 1 / 4) <= 1e-12 and abs(v["lhv_value"]["xxyy"] + 1 / 8) <= 1e-12
          and abs(v["candidate_value"]["xxxx"] + 3 / 8) <= 1e-12
          and abs(v["candidate_value"]["xxyy"] + 1 / 8) <= 1e-12 and v["mismatch"])
    _record(8, "four-qubit no-go", ok,
            f"LHV xxxx {v['lhv_value']['xxxx']:.6f}, candidate xxxx {v['candidate_value']['xxxx']:.6f}")
    assert ok


def test_criterion_09_qutrit():
    r = verify.claim_qutrit(samples=10_000_000, random_bases=10)
    rep = r.values["report"]
    z_u = abs(rep["unprimed_value"] - 13 / 162) / rep["unprimed_std_err"]
    z_p = abs(rep["primed_value"] - 15 / 162) / rep["primed_std_err"]
    err = max(rep["unprimed_std_err"], rep["primed_std_err"])
    z_rand = max(c["z"] for c in r.values["random_bases"])
    ok = (z_u <= 5 and z_p <= 5 and err <= 1e-3 and len(r.values["random_bases"]) == 10
          and z_rand <= 5 and rep["gap_sigma"] >= 5)
    _record(9, "qutrit inconsistency", ok,
            f"z(13/162) {z_u:.2f}, z(15/162) {z_p:.2f}, std err {err:.1e}, "
            f"max z random bases {z_rand:.2f}, gap {rep['gap_sigma']:.0f} sigma")
    assert ok


def test_criterion_10_properties():
    r = verify.claim_properties(cases=1000)
    worst = max(r.values["worst"].values())
    ok = worst <= 1e-12 and r.values["byte_identical"]
    _record(10, "tensor invariants and determinism", ok,
            f"1000 cases, worst {worst:.2e} <= 1e-12, byte-identical: {r.values['byte_identical']}")
    assert ok


if __name__ == "__main__":
    results = verify.run_all()
    raise SystemExit(0 if all(r.passed for r in results) else 1)
