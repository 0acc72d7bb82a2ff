import csv
import io
import json

import pytest

from tripartite_lhv.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, OUT_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_state_json(capsys):
    code, out = run(capsys, "state", "--n", "3", "--c", "1")
    assert code == EXIT_OK
    data = json.loads(out.out)
    assert data["dims"] == [2, 2, 2]
    assert data["pauli"]["XXI"] == pytest.approx(-1 / 16, abs=1e-14)
    assert data["pauli"]["IZZ"] == pytest.approx(1 / 24, abs=1e-14)
    assert data["un_invariant"]


def test_state_four_not_invariant(capsys):
    code, out = run(capsys, "state", "--n", "4", "--c", "1")
    assert code == EXIT_OK
    assert not json.loads(out.out)["un_invariant"]


def test_state_zero_c_physical(capsys):
    _, out = run(capsys, "state", "--n", "3", "--c", "0")
    # the exact spectrum contains zeros (1/2 x antisymmetric subspace); allow rounding
    assert json.loads(out.out)["min_eigenvalue"] >= -1e-15


def test_invalid_params_exit_2(capsys):
    assert main(["state", "--c", "nan"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["state", "--n", "7"])
    assert err.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["lhv-test", "--samples", "0"])
    assert err.value.code == EXIT_USAGE


def test_lhv_test_exit_codes(capsys):
    code, out = run(capsys, "lhv-test", "--n", "2", "--settings", "5", "--samples", "100000")
    assert code == EXIT_OK
    assert json.loads(out.out)["passed"]
    code, _ = run(capsys, "lhv-test", "--n", "3", "--settings", "20", "--samples", "100")
    assert code == EXIT_FAILED


def test_entanglement(capsys):
    code, out = run(capsys, "entanglement", "--c", "1")
    assert code == EXIT_OK
    data = json.loads(out.out)
    assert data["verdict"]["verdict"] == "GENUINE"
    assert data["verdict"]["r1"] == pytest.approx(5 / 6, abs=1e-12)


def test_region_csv(capsys):
    code, out = run(capsys, "region", "--points", "32")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out.out)))
    assert rows[0] == ["curve_id", "r1", "r2"]
    kinds = {r[0].split(":")[0] for r in rows[1:]}
    assert {"disk0", "hull", "diamond", "circle", "triangle"} <= kinds


def test_region_json(capsys):
    code, out = run(capsys, "region", "--points", "32", "--format", "json")
    assert code == EXIT_OK
    assert len(json.loads(out.out)["disks"]) == 3


def test_extension(capsys):
    code, out = run(capsys, "extension", "--n", "3", "--p", str(2 / 3), "--twirled")
    assert code == EXIT_OK
    assert json.loads(out.out)["valid"]
    code, _ = run(capsys, "extension", "--n", "4", "--p", "0.6", "--twirled")
    assert code == EXIT_FAILED


def test_nogo_fourqubit(capsys):
    code, out = run(capsys, "nogo", "fourqubit")
    assert code == EXIT_OK
    assert json.loads(out.out)["mismatch"]


def test_nogo_qutrit_small(capsys):
    code, out = run(capsys, "nogo", "qutrit", "--samples", "1000000")
    assert code == EXIT_OK
    assert json.loads(out.out)["gap_analytic_fraction"] == "1/81"


def test_output_files_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["lhv-test", "--settings", "3", "--samples", "20000"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.json.meta.json").read_text())
    assert "created" in meta


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    assert main(["nogo", "fourqubit"]) == EXIT_OK
    assert (tmp_path / "nogo_fourqubit.json").exists()
    assert capsys.readouterr().out == ""
