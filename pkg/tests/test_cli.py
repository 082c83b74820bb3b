import csv
import subprocess
import sys

import pytest

from mwphase.cli import BAND_HEADER, CURRENT_HEADER, CURVE_HEADER, SINGLE_HEADER, SWEEP_HEADER, main


def _header(path):
    with open(path, newline="") as fh:
        return next(csv.reader(fh))


def test_usage_errors_exit_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["design"]) == 2
    err = capsys.readouterr().err
    assert "mwphase-error code=2 kind=UsageError" in err


def test_validation_errors_exit_3(tmp_path, capsys):
    assert main(["design", "--theta", "0.8", "--config", str(tmp_path / "missing.cfg")]) == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("ic1 = -1 uA\n")
    assert main(["design", "--theta", "0.8", "--config", str(bad)]) == 3
    assert main(["compensate", "--flux", "0.1,0.2", "--out", str(tmp_path)]) == 3
    assert "code=3" in capsys.readouterr().err


def test_computation_errors_exit_4(tmp_path, capsys):
    m = tmp_path / "sing.txt"
    m.write_text("units = pH\n1 2\n2 4\n")
    assert main(["compensate", "--matrix", str(m), "--flux", "0.1,0.2", "--out", str(tmp_path)]) == 4
    assert "kind=NonInvertibleError" in capsys.readouterr().err


def test_design_feasible_point(capsys):
    assert main(["design", "--theta", "0.8", "--config", "device.cfg"]) == 0
    out = dict(line.split(" = ", 1) for line in capsys.readouterr().out.splitlines())
    assert out["feasible"] == "true"
    assert abs(float(out["s21_abs"]) - 1.0) < 1e-9


def test_sweep_csv_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["sweep-flux", "--config", "device.cfg", "--grid", "11x13", "--out", str(d)]) == 0
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
    assert _header(a / "sweep.csv") == SWEEP_HEADER
    assert len((a / "sweep.csv").read_text().splitlines()) == 1 + 11 * 13


def test_single_photon_and_band(tmp_path):
    assert main(["single-photon", "--gamma", "0.62", "--points", "5", "--out", str(tmp_path)]) == 0
    assert _header(tmp_path / "single_photon.csv") == SINGLE_HEADER
    assert main(["band", "--points", "8", "--out", str(tmp_path)]) == 0
    assert _header(tmp_path / "band.csv") == BAND_HEADER


def test_ft_curve(tmp_path):
    assert main(["ft-curve", "--config", "device.cfg", "--samples", "11",
                 "--window", "0.3,0.5,0,0.5", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "curve.csv")))
    assert rows[0] == CURVE_HEADER and len(rows) == 12
    assert all(abs(float(r[4]) - 1.0) < 1e-9 for r in rows[1:])


def test_compensate_default_matrix(tmp_path):
    assert main(["compensate", "--flux", "0.1,0.2,0.3", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "currents.csv")))
    assert rows[0] == CURRENT_HEADER
    for r in rows[1:]:
        assert abs(float(r[2]) - float(r[3])) <= 1e-12 * abs(float(r[2]))


def test_selftest_passes():
    assert main(["selftest", "--quiet"]) == 0


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "mwphase.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("mwphase ")
