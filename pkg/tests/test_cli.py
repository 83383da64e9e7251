"""Tests for the command-line interface.

Runs the entry point in-process via ``main(argv)``; one test goes through
the installed console script to cover packaging.
"""

import json
import math
import subprocess
import sys

import pytest

from maryland_lab import bessel_j0_zero
from maryland_lab.cli import EXIT_OK, EXIT_USAGE, main, read_config


def run(args):
    return main([str(a) for a in args])


def test_qklr_outputs(tmp_path):
    out = tmp_path / "run"
    assert run(["qklr", "--k", 1.0, "--p", 1, "--q", 3,
                "--kicks", 6, "--window", 12, "--out", out]) == EXIT_OK
    for name in ("propagator", "trajectory", "energy", "tailmass"):
        assert (out / f"{name}.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["period_kicks"] == 3
    assert summary["fidelity_after_q_kicks"] == pytest.approx(1.0, abs=1e-12)
    # gamma vanishes after a full period of 3 kicks
    assert summary["per_kick"][-1]["gamma"] == pytest.approx(0.0, abs=1e-12)


def test_qklr_requires_k(tmp_path):
    assert run(["qklr", "--tau", 1.0, "--out", tmp_path / "x"]) == EXIT_USAGE


def test_qklr_rejects_half_rational(tmp_path):
    assert run(["qklr", "--k", 1.0, "--p", 1,
                "--out", tmp_path / "x"]) == EXIT_USAGE


def test_unknown_subcommand_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k = 2.0\ntau = 1.0\nkicks = 3  # comment\n")
    out = tmp_path / "a"
    assert run(["qklr", "--config", cfg, "--out", out]) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert s["config"]["k"] == 2.0
    assert s["config"]["kicks"] == 3
    # Explicit flag beats the file value.
    out2 = tmp_path / "b"
    assert run(["qklr", "--config", cfg, "--k", 0.5, "--out", out2]) == EXIT_OK
    s2 = json.loads((out2 / "summary.json").read_text())
    assert s2["config"]["k"] == 0.5


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("k=1.0\nbogus=3\n")
    assert run(["qklr", "--config", cfg, "--out", tmp_path / "x"]) == EXIT_USAGE


def test_read_config_bad_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just words\n")
    with pytest.raises(ValueError):
        read_config(str(cfg))


def test_csv_precision_round_trips(tmp_path):
    out = tmp_path / "run"
    run(["qklr", "--k", 1.0, "--tau", 1.0, "--kicks", 2,
         "--window", 8, "--out", out])
    lines = (out / "energy.csv").read_text().splitlines()
    assert lines[0] == "kick,p_squared"
    for line in lines[1:]:
        for fieldval in line.split(","):
            # 17 significant digits survive a float round trip exactly.
            assert f"{float(fieldval):.16e}" == fieldval


def test_json_format_option(tmp_path):
    out = tmp_path / "run"
    run(["qklr", "--k", 1.0, "--tau", 1.0, "--kicks", 1,
         "--window", 8, "--out", out, "--format", "json"])
    data = json.loads((out / "energy.json").read_text())
    assert data["columns"] == ["kick", "p_squared"]
    assert not (out / "energy.csv").exists()


def test_run_determinism(tmp_path):
    args = ["qklr", "--k", 1.3, "--tau", 0.9, "--kicks", 5, "--window", 15]
    run(args + ["--out", tmp_path / "a"])
    run(args + ["--out", tmp_path / "b"])
    for name in ("propagator.csv", "trajectory.csv", "energy.csv",
                 "tailmass.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() \
            == (tmp_path / "b" / name).read_bytes()


def test_dunlap_outputs(tmp_path):
    out = tmp_path / "run"
    assert run(["dunlap", "--T", 0.5, "--E", 1.0, "--periods", 2,
                "--window", 10, "--out", out]) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    lines = (out / "msd.csv").read_text().splitlines()
    assert lines[0] == "periods,msd_bessel_sum,msd_closed_form"
    last = [float(v) for v in lines[-1].split(",")]
    assert last[1] == pytest.approx(last[2], rel=1e-9)
    assert s["localization_fields"][0] == pytest.approx(
        bessel_j0_zero(1), abs=1e-9)


def test_dunlap_requires_both_params(tmp_path):
    assert run(["dunlap", "--T", 1.0, "--out", tmp_path / "x"]) == EXIT_USAGE


def test_scan_roots(tmp_path):
    out = tmp_path / "run"
    assert run(["scan", "--emin", 0, "--emax", 6, "--out", out]) == EXIT_OK
    lines = (out / "roots.csv").read_text().splitlines()
    assert len(lines) == 3  # header + two roots below 6
    root1 = float(lines[1].split(",")[1])
    assert root1 == pytest.approx(bessel_j0_zero(1), abs=1e-9)


def test_scan_respects_thread_env(tmp_path, monkeypatch):
    monkeypatch.setenv("MARYLAND_LAB_THREADS", "1")
    out1 = tmp_path / "one"
    run(["scan", "--emin", 0, "--emax", 6, "--out", out1])
    monkeypatch.setenv("MARYLAND_LAB_THREADS", "3")
    out3 = tmp_path / "three"
    run(["scan", "--emin", 0, "--emax", 6, "--out", out3])
    assert (out1 / "scan.csv").read_bytes() == (out3 / "scan.csv").read_bytes()


def test_console_script_version():
    proc = subprocess.run([sys.executable, "-m", "maryland_lab.cli",
                           "--version"], capture_output=True, text=True)
    assert proc.returncode == 0


def test_verify_tolerance_injection_fails_fast(tmp_path):
    # An impossible injected tolerance must flip the exit code to 1; run
    # only the cheap deterministic checks by keeping the default dim.
    cfg = tmp_path / "strict.cfg"
    cfg.write_text("tol_laurent_commutativity=1e-30\n")
    code = main(["verify", "--config", str(cfg), "--out", str(tmp_path / "v")])
    assert code == 1
    report = json.loads((tmp_path / "v" / "report.json").read_text())
    failed = [c for c in report["checks"] if not c["passed"]]
    assert [c["check"] for c in failed] == ["laurent_commutativity"]
    assert not report["all_passed"]
