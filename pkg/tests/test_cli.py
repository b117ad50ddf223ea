"""Command-line behaviour: exit codes, outputs and config precedence."""

from __future__ import annotations

import csv
import json

import pytest

from spinsoliton import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_calibrate_toy(tmp_path, capsys):
    code, out = run(capsys, "calibrate", "--preset", "dimensionless", "--hbar", "2", "--out", str(tmp_path))
    assert code == 0
    data = json.loads(out.out)
    assert (data["r0"], data["c2"]) == (1.25, 1.875)
    assert json.loads((tmp_path / "calibration.json").read_text()) == data


def test_missing_constants_exit_2(tmp_path, capsys):
    code, out = run(capsys, "verify", "--out", str(tmp_path))
    assert code == 2
    assert "missing" in out.err


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["calibrate", "--preset", "dimensionless", "--bogus"])
    assert exc.value.code == 2


def test_explicit_constants_without_preset(tmp_path, capsys):
    args = ["calibrate", "--e", "1", "--m", "1", "--hbar", "2", "--c", "1", "--out", str(tmp_path)]
    code, out = run(capsys, *args)
    assert code == 0
    assert json.loads(out.out)["r0"] == 1.25


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# toy\npreset=dimensionless\nhbar=1\nout=%s\n" % tmp_path)
    code, out = run(capsys, "calibrate", "--config", str(cfg), "--hbar", "2")
    assert code == 0
    assert json.loads(out.out)["constants"]["hbar"] == 2.0


def test_config_unknown_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("preset=dimensionless\nwidth=3\n")
    code, _ = run(capsys, "calibrate", "--config", str(cfg))
    assert code == 2


def test_run_config_roundtrip():
    c = cli.RunConfig(preset="physical", r0=0.1 + 0.2, axis=(0.0, 0.6, 0.8), n_radial=32, seed=7)
    assert cli.RunConfig.loads(c.dumps()) == c


def test_sample_fields(tmp_path, capsys):
    code, _ = run(
        capsys, "sample-fields", "--preset", "dimensionless", "--hbar", "2", "--out", str(tmp_path),
        "--n-r", "5", "--n-theta", "3", "--r-min", "0.5", "--r-max", "3",
    )
    assert code == 0
    rows = read_csv(tmp_path / "fields.csv")
    assert len(rows) == 15
    assert list(rows[0]) == list(cli.FIELD_COLUMNS)
    axis_rows = [r for r in rows if float(r["theta"]) == 0.0]
    assert all(float(r["H_theta"]) == 0.0 for r in axis_rows)
    inner = [r for r in rows if float(r["r"]) < 2.0]
    assert inner and all(float(r[k]) == 0.0 for r in inner for k in ("E_r", "H_r", "H_theta", "U", "l_z"))


def test_sample_fields_grid_at_origin_exit_2(tmp_path, capsys):
    code, _ = run(capsys, "sample-fields", "--preset", "dimensionless", "--r-min", "0", "--out", str(tmp_path))
    assert code == 2


def test_residuals_observed_order(tmp_path, capsys):
    code, _ = run(capsys, "residuals", "--preset", "dimensionless", "--hbar", "2", "--out", str(tmp_path))
    assert code == 0
    rows = read_csv(tmp_path / "residuals.csv")
    orders = [float(r["observed_order"]) for r in rows if r["observed_order"] != "nan"]
    assert orders and all(abs(o - 2.0) < 0.3 for o in orders)


def test_outputs_byte_identical(tmp_path, capsys):
    for sub in ("a", "b"):
        run(capsys, "residuals", "--preset", "dimensionless", "--out", str(tmp_path / sub))
        run(capsys, "sample-fields", "--preset", "dimensionless", "--out", str(tmp_path / sub))
    for name in ("residuals.csv", "fields.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_writes_report_and_reflects_failures(tmp_path, capsys):
    code, out = run(capsys, "verify", "--preset", "dimensionless", "--hbar", "2", "--out", str(tmp_path))
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["calibration"]["lz_ratio_paper"] == pytest.approx(1.0, rel=1e-12)
    assert any(c["name"] == "determinism.identical_reruns" and c["pass"] for c in report["checks"])
    # exit code mirrors the overall verdict
    assert code == (0 if report["pass"] else 1)
    assert "lz_ratio_paper=1.000000000000" in out.out
