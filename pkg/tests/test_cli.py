"""
Tests for the qpt command line
"""

import json

import pytest

from app.cli.main import main
from app.services import golden_service
from app.services.export_service import ExportService

def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err

def test_solve_decoupled(capsys):
    """alpha = 0 prints the free two-qubit report"""
    code, out, _ = _run(capsys, "solve", "--delta", "0.1", "--epsilon", "1e-5", "--alpha", "0", "--s", "1")
    report = json.loads(out)

    assert code == 0
    assert report["e_g"] == pytest.approx(-0.1, abs=1e-9)
    assert report["sx"] == pytest.approx(1.0, abs=1e-6)
    assert report["sz"] == pytest.approx(1e-4, abs=1e-7)
    assert report["branch"] == "Delocalized"
    assert report["validity"] is True
    assert len(report["rho"]) == 16

def test_solve_below_transition(capsys):
    """--pinned adds the sigma0 = 0 energy"""
    code, out, _ = _run(capsys, "solve", "--delta", "0.1", "--epsilon", "1e-5", "--alpha", "0.13", "--s", "1",
                        "--pinned")
    report = json.loads(out)

    assert code == 0
    assert report["branch"] == "Delocalized"
    assert report["energy_gain"] >= 0

def test_super_ohmic_rejected(capsys):
    """Validation failures exit with 1 and name the field on stderr"""
    code, out, err = _run(capsys, "solve", "--s", "1.5")
    error = json.loads(err)

    assert code == 1
    assert out == ""
    assert error["success"] is False
    assert error["error_code"] == "SUPER_OHMIC_UNSUPPORTED"
    assert error["field"] == "s"

def test_unknown_config_key(capsys, tmp_path):
    """Config files may not carry unknown fields"""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "solve", "gamma": 1.0}))
    code, _, err = _run(capsys, "solve", "--config", str(path))

    assert code == 1
    assert json.loads(err)["error_code"] == "INVALID_CONFIG"

def test_flags_override_config_file(capsys, tmp_path):
    """Values from the config file are used unless a flag is given"""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "solve", "delta": 0.2, "alpha": 0.05, "epsilon": 1e-5}))
    _, from_file, _ = _run(capsys, "solve", "--config", str(path))
    _, overridden, _ = _run(capsys, "solve", "--config", str(path), "--alpha", "0")

    assert json.loads(from_file)["e_g"] < -0.2
    assert json.loads(overridden)["e_g"] == pytest.approx(-0.2, abs=1e-9)

def test_output_is_deterministic(capsys):
    """Identical invocations print identical bytes"""
    argv = ("solve", "--delta", "0.1", "--epsilon", "1e-5", "--alpha", "0.1")
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second

def test_iteration_budget_exit_code(capsys):
    """NotConverged exits with 2"""
    code, _, err = _run(capsys, "solve", "--alpha", "0.1", "--epsilon", "1e-5", "--max-iter", "1")

    assert code == 2
    assert json.loads(err)["error_code"] == "NOT_CONVERGED"

def test_no_command(capsys):
    """Usage on stderr and exit 1"""
    code, _, err = _run(capsys)
    assert code == 1
    assert "usage" in err

def test_output_file(capsys, tmp_path):
    """-o writes the report to a file instead of stdout"""
    path = tmp_path / "out.json"
    code, out, _ = _run(capsys, "solve", "--alpha", "0", "--epsilon", "1e-5", "-o", str(path))

    assert code == 0
    assert out == ""
    assert json.loads(path.read_text())["branch"] == "Delocalized"

@pytest.mark.slow
def test_entropy_scan_clamped(capsys):
    """A grid past the validity window is clamped with a leading note"""
    code, out, _ = _run(capsys, "entropy", "--delta", "0.1", "--epsilon", "1e-5", "--s", "1",
                        "--start", "0", "--stop", "0.2", "--count", "21")
    lines = out.splitlines()

    assert code == 0
    assert lines[0] == "# clamped: validity window"
    assert lines[1].startswith("k_ising,alpha,alpha_c,")
    assert all(float(line.split(",")[1]) <= 1.1 * 0.1338 + 2e-3 for line in lines[2:])

def test_oracle_row(capsys):
    """One comparison row against exact diagonalization"""
    code, out, _ = _run(capsys, "oracle", "--alpha", "0.01", "--epsilon", "1e-5", "--modes", "2",
                        "--n-max", "4", "--format", "json")
    row = json.loads(out)["rows"][0]

    assert code == 0
    assert row["upper_bound"] is True
    assert row["dimension"] == 4 * 5 ** 2

def test_golden_records_then_matches(capsys, tmp_path, monkeypatch):
    """--record writes golden files, a plain run compares against them"""
    monkeypatch.setattr(golden_service, "CASES", {"decoupled": golden_service.CASES["decoupled"]})
    first, out, _ = _run(capsys, "--golden", "--record", "--golden-dir", str(tmp_path))
    assert first == 0
    assert "decoupled,recorded," in out
    assert (tmp_path / "decoupled.json").exists()

    second, out, _ = _run(capsys, "--golden", "--golden-dir", str(tmp_path))
    assert second == 0
    assert "decoupled,match," in out

def test_golden_mismatch_exit_code(capsys, tmp_path, monkeypatch):
    """A differing golden file exits with 3"""
    monkeypatch.setattr(golden_service, "CASES", {"decoupled": golden_service.CASES["decoupled"]})
    (tmp_path / "decoupled.json").write_text(json.dumps({"e_g": 1.0}))
    code, out, _ = _run(capsys, "--golden", "--golden-dir", str(tmp_path))

    assert code == 3
    assert "mismatch" in out

def test_golden_missing_file_fails(capsys, tmp_path, monkeypatch):
    """Without --record a missing golden file is a failure, not a recording"""
    monkeypatch.setattr(golden_service, "CASES", {"decoupled": golden_service.CASES["decoupled"]})
    code, out, _ = _run(capsys, "--golden", "--golden-dir", str(tmp_path))

    assert code == 4
    assert "decoupled,missing," in out
    assert not (tmp_path / "decoupled.json").exists()

def test_solve_flags_alpha_above_window(capsys):
    """Single solves know alpha_c, so alpha > 1.1 alpha_c is flagged"""
    code, out, _ = _run(capsys, "solve", "--delta", "0.1", "--epsilon", "1e-5", "--alpha", "0.16", "--s", "1")
    report = json.loads(out)

    assert code == 0
    assert report["validity"] is False
    assert any("alpha" in note for note in report["validity_notes"])

def test_solve_branches(capsys):
    """--branches reports a list; below alpha_c both starts meet on one branch"""
    code, out, _ = _run(capsys, "solve", "--delta", "0.1", "--epsilon", "1e-5", "--alpha", "0.05", "--s", "1",
                        "--branches")
    reports = json.loads(out)

    assert code == 0
    assert len(reports) == 1
    assert reports[0]["branch"] == "Delocalized"

@pytest.mark.slow
def test_entropy_curves_per_delta(capsys):
    """--delta-values gives one entropy curve per tunneling value"""
    code, out, _ = _run(capsys, "entropy", "--epsilon", "1e-6", "--delta-values", "0.05", "0.1",
                        "--start", "0", "--stop", "0.1", "--count", "5")
    table, _ = ExportService.read_csv(out)

    assert code == 0
    assert table["delta"].tolist() == [0.05] * 5 + [0.1] * 5
    assert (table["alpha_c"].groupby(table["delta"]).nunique() == 1).all()
    assert table.groupby("delta")["alpha_c"].first().is_monotonic_increasing

@pytest.mark.slow
def test_exponent_data_table(capsys):
    """--data emits the log-log points behind each fit"""
    code, out, _ = _run(capsys, "exponents", "--delta", "0.1", "--s", "1", "--data")
    table, _ = ExportService.read_csv(out)

    assert code == 0
    assert set(table["exponent"]) == {"delta", "gamma", "beta", "beta_prime", "zeta"}
    assert (table.groupby("exponent").size() == 24).all()
    assert (table["x"] > 0).all()
    assert (table["y"] > 0).all()
