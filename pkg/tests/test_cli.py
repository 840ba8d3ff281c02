import json
import subprocess
import sys

import pytest

from pmpressure.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- pressure ----------------------------------------------------------------


def test_pressure_json_contract(capsys):
    code, out, _ = run_cli(
        capsys, "pressure", "--alpha", "1", "--gamma", "1",
        "--potential", "const(0)", "--tol", "1e-3",
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"lower", "upper", "method", "n_used"}
    assert payload["lower"] <= 0.6931471805599453 <= payload["upper"]


def test_pressure_geometric_contains_zero(capsys):
    code, out, _ = run_cli(
        capsys, "pressure", "--alpha", "0.8", "--gamma", "0.8",
        "--potential", "-1*logdf", "--tol", "0.02",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["lower"] <= 0.0 <= payload["upper"]


def test_pressure_csv_header(capsys):
    code, out, _ = run_cli(
        capsys, "pressure", "--alpha", "1", "--gamma", "1",
        "--potential", "const(0)", "--tol", "1e-3", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lower,upper,method,n_used"
    assert len(lines) == 2
    assert float(lines[1].split(",")[0]) == pytest.approx(0.693147, abs=1e-3)


def test_missing_flag_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "pressure", "--alpha", "1", "--gamma", "1", "--tol", "1e-3"
    )
    assert code == 2
    assert "missing --potential" in err


def test_bad_expression_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "pressure", "--alpha", "1", "--gamma", "1",
        "--potential", "nope(1)", "--tol", "1e-3",
    )
    assert code == 2
    assert "--potential" in err


# --- config file ---------------------------------------------------------------


def test_config_supplies_flags_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"alpha": 1.0, "gamma": 1.0, "potential": "const(0)", "tol": 1e-3})
    )
    code, out, _ = run_cli(capsys, "pressure", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["upper"] - json.loads(out)["lower"] <= 1e-3

    code, out, _ = run_cli(
        capsys, "pressure", "--config", str(cfg), "--potential", "const(0.5)"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["lower"] == pytest.approx(0.5 + 0.6931471805599453, abs=1e-3)


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "frobnicate": 3}))
    code, _, err = run_cli(capsys, "pressure", "--config", str(cfg))
    assert code == 2
    assert "frobnicate" in err


# --- classify / ct / trace exit codes -------------------------------------------


def test_classify_certified_exit_zero(capsys):
    code, out, _ = run_cli(
        capsys, "classify", "--alpha", "1", "--gamma", "0.5",
        "--potential", "8*omega(0.5)",
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "StationaryCertified"


def test_ct_infinity_marker(capsys):
    code, out, _ = run_cli(
        capsys, "ct", "--alpha", "0.5", "--gamma", "1",
        "--potential", "omega(1)", "--beta-max", "16",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["hi"] == "infinity"
    assert payload["lo"] == 16.0


def test_groundstate_violated_exit_zero(capsys):
    code, out, _ = run_cli(
        capsys, "groundstate", "--alpha", "1",
        "--potential", "-1*omega(1)", "--period-max", "2", "--neutral-depth", "8",
    )
    assert code == 0
    assert json.loads(out)["status"] == "Violated"


def test_groundstate_consistent_exit_three(capsys):
    code, out, _ = run_cli(
        capsys, "groundstate", "--alpha", "1",
        "--potential", "omega(0.5)", "--period-max", "2", "--neutral-depth", "8",
    )
    assert code == 3
    assert json.loads(out)["status"] == "ConsistentUpTo"


# --- scan -------------------------------------------------------------------------


SCAN_ARGS = [
    "scan", "--alpha", "1", "--gamma", "0.5",
    "--potential", "const(0)", "--dir-u", "omega(0.5)", "--dir-v", "-logdf",
    "--u", "0.5:1:2", "--v", "1.2:1.4:2", "--tol", "0.1",
    "--induced-depth", "1024",
]


def test_scan_csv_schema_and_grid_order(capsys):
    code, out, _ = run_cli(capsys, *SCAN_ARGS)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "u,v,verdict,P_lower,P_upper"
    assert len(lines) == 5
    us = [line.split(",")[0] for line in lines[1:]]
    assert us == ["0.5", "0.5", "1.0", "1.0"]  # grid order, u-major


def test_scan_threads_do_not_change_bytes(capsys):
    _, seq, _ = run_cli(capsys, *SCAN_ARGS, "--threads", "1")
    _, par, _ = run_cli(capsys, *SCAN_ARGS, "--threads", "4")
    assert seq == par


def test_scan_timings_column_is_opt_in(capsys):
    _, out, _ = run_cli(capsys, *SCAN_ARGS, "--timings")
    assert out.splitlines()[0] == "u,v,verdict,P_lower,P_upper,wall_time"


def test_scan_json_format(capsys):
    code, out, _ = run_cli(capsys, *SCAN_ARGS, "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 4
    assert set(rows[0]) == {"u", "v", "verdict", "P_lower", "P_upper"}


def test_scan_tau0_trailer(capsys):
    # tau0 applies when the v direction is the omega atom
    code, out, _ = run_cli(
        capsys, "scan", "--alpha", "1", "--gamma", "0.5",
        "--potential", "const(0)", "--dir-u", "-logdf", "--dir-v", "omega(0.5)",
        "--u", "1.2:1.4:2", "--v", "0.5:1:2", "--tol", "0.1",
        "--induced-depth", "1024", "--tau0",
    )
    assert code == 0
    trailer = [line for line in out.splitlines() if line.startswith("#")]
    assert len(trailer) == 2  # one per u-column
    assert all("tau0" in line and "lo=" in line for line in trailer)


def test_scan_tau0_needs_omega_direction(capsys):
    code, _, err = run_cli(capsys, *SCAN_ARGS, "--tau0")
    assert code == 2
    assert "omega" in err


def test_scan_bad_grid_is_usage_error(capsys):
    code, _, err = run_cli(capsys, *SCAN_ARGS[:-4], "--u", "oops", "--v", "0:1:2")
    assert code == 2
    assert "LO:HI:STEPS" in err


def test_scan_plot_script_requires_out(capsys):
    code, _, err = run_cli(capsys, *SCAN_ARGS, "--plot-script")
    assert code == 2
    assert "--out" in err


def test_scan_out_writes_file(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    code, out, _ = run_cli(capsys, *SCAN_ARGS, "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("u,v,verdict")


# --- validate ------------------------------------------------------------------------


def test_validate_only_entropy(capsys):
    code, out, _ = run_cli(capsys, "validate", "--only", "entropy")
    assert code == 0
    rows = json.loads(out)
    assert rows and all(r["pass"] for r in rows)
    assert set(rows[0]) == {"scenario", "check", "expected", "got", "pass", "reference"}


def test_validate_unknown_scenario(capsys):
    code, _, err = run_cli(capsys, "validate", "--only", "nope")
    assert code == 2
    assert "unknown scenario" in err


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "pmpressure.cli", "validate", "--only", "entropy"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["pass"] is True
