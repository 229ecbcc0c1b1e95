import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ahconserved import read_data

CLI = [sys.executable, "-m", "ahconserved"]


def run(*args, cwd=None):
    return subprocess.run(CLI + [str(a) for a in args], capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    out = {}
    for name, extra in {
        "zero": ["--kind", "minkowski_hyperboloid"],
        "schw": ["--kind", "schwarzschild_aspect", "--m0", "1"],
        "moving": ["--kind", "random_bandlimited", "--seed", "3"],
        "rest": ["--kind", "random_bandlimited", "--seed", "4", "--zero-momentum"],
    }.items():
        path = root / f"{name}.json"
        r = run("gen", "--band-limit", "16", "--output", path, *extra)
        assert r.returncode == 0, r.stderr
        out[name] = path
    out["root"] = root
    return out


def test_gen_output_validates(files):
    r = run("validate", "--input", files["zero"])
    assert r.returncode == 0
    assert json.loads(r.stdout) == {"valid": True, "violations": []}


def test_validate_flags_trace(files, tmp_path):
    doc = json.loads(files["zero"].read_text())
    doc["fields"]["p_ab_0"]["theta_theta"][0][0] = 1.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    r = run("validate", "--input", bad)
    assert r.returncode == 1
    assert json.loads(r.stdout)["violations"][0]["field"] == "p_ab_0"
    assert run("compute", "--input", bad).returncode == 1


def test_compute_zero(files):
    r = run("compute", "--input", files["zero"])
    assert r.returncode == 0
    rec = json.loads(r.stdout)
    assert rec["E"] == 0.0 and rec["P"] == [0.0, 0.0, 0.0]
    assert rec["C"] == [0.0, 0.0, 0.0] and rec["J"] == [0.0, 0.0, 0.0]
    assert rec["vacuum_loss_rate"] == 0.0


def test_compute_schwarzschild(files):
    rec = json.loads(run("compute", "--input", files["schw"]).stdout)
    assert rec["E"] == pytest.approx(1.0, abs=1e-12)
    assert rec["M_rest"] == pytest.approx(1.0, abs=1e-12)
    assert max(abs(p) for p in rec["P"]) < 1e-12


def test_compute_gate(files):
    assert run("compute", "--input", files["moving"]).returncode == 0
    r = run("compute", "--input", files["moving"], "--require-com")
    assert r.returncode == 2 and "center of mass undefined" in r.stderr
    assert run("compute", "--input", files["rest"], "--require-com").returncode == 0


def test_missing_input_fails(tmp_path):
    r = run("compute", "--input", tmp_path / "nope.json")
    assert r.returncode == 1 and "not found" in r.stderr


def test_usage_errors_exit_one():
    assert run("compute", "--bogus").returncode == 1
    assert run().returncode == 1
    assert run("--help").returncode == 0


def test_help_documents_csv_columns():
    out = run("--help").stdout
    assert "boost_energy" in out and "r4_weighted_residual" in out


def test_band_limit_checks(files, tmp_path):
    assert run("gen", "--kind", "minkowski_hyperboloid", "--band-limit", "4",
               "--output", tmp_path / "x.json").returncode == 1
    assert run("compute", "--input", files["zero"], "--band-limit", "32").returncode == 1


def test_boost_command(files, tmp_path):
    table = tmp_path / "b.csv"
    r = run("boost", "--input", files["schw"], "--rapidity", "0", "0.5", "1", "--axis", "x", "--csv", table)
    assert r.returncode == 0
    rec = json.loads(r.stdout)
    assert [row["boost_energy"] for row in rec["rows"]] == pytest.approx([1.0, np.cosh(0.5), np.cosh(1.0)])
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 3 and float(rows[2]["a1"]) == pytest.approx(np.sinh(1.0))
    assert max(float(r["abs_error"]) for r in rows) < 1e-10


def test_boost_rejects_bad_axis(files):
    assert run("boost", "--input", files["schw"], "--axis", "0,0,0").returncode == 1


def test_embed_rest_data(files, tmp_path):
    x0 = tmp_path / "x0.json"
    r = run("embed", "--input", files["rest"], "--output", x0)
    assert r.returncode == 0
    rec = json.loads(r.stdout)
    assert rec["solvable"] is True and rec["residual"] <= 1e-10
    assert "X0_0" in json.loads(x0.read_text())["fields"]


def test_embed_moving_data(files, tmp_path):
    x0 = tmp_path / "x0.json"
    rec = json.loads(run("embed", "--input", files["moving"], "--output", x0).stdout)
    assert rec["solvable"] is False and rec["residual"] is None
    assert not x0.exists()


def test_extract(files, tmp_path):
    table = tmp_path / "e.csv"
    r = run("extract", "--input", files["moving"], "--csv", table)
    assert r.returncode == 0, r.stderr
    rec = json.loads(r.stdout)
    assert rec["h_m2_error"] <= 1e-6 and rec["trace_variant"] == "g_m2"
    rows = list(csv.DictReader(table.open()))
    assert [float(row["radius"]) for row in rows] == [100.0, 200.0, 400.0, 800.0]


def test_extract_underdetermined(files):
    r = run("extract", "--input", files["moving"], "--radii", "100", "200")
    assert r.returncode == 1 and "radii" in r.stderr


def test_extract_radii_checks(files):
    assert run("extract", "--input", files["moving"], "--radii", "5", "100", "200", "400").returncode == 1
    assert run("extract", "--input", files["moving"], "--radii", "400", "100", "200", "800").returncode == 1


def test_verify_subset(tmp_path):
    report = tmp_path / "v.json"
    r = run("verify", "--only", "boost-identity", "--band-limit", "16", "--output", report)
    assert r.returncode == 0
    rec = json.loads(report.read_text())
    assert {c["group"] for c in rec["checks"]} == {"boost-identity"}
    assert rec["passed"] is True


def test_verify_fault_injection():
    r = run("verify", "--only", "loss-sign", "--inject-fault", "flip-loss-sign")
    assert r.returncode == 1 and "FAIL" in r.stdout


def test_verify_unknown_group():
    assert run("verify", "--only", "nonsense").returncode == 1


def test_cli_round_trip(files):
    d = read_data(files["rest"])
    assert d.grid.L == 16
