import json
from pathlib import Path
import subprocess
import sys

import numpy as np
import pytest

from bsvkernels.cli import main, read_csv

QUICK = Path(__file__).resolve().parents[1] / "configs" / "quick.ini"


@pytest.mark.parametrize("verb, files", [
    ("single", ["profile.csv"]),
    ("sweep-gain", ["sweep_gain.csv"]),
    ("two-crystal", ["profile.csv"]),
    ("sweep-distance", ["profiles.csv", "sweep_distance.csv"]),
    ("schmidt", ["weights.csv", "modes.csv"]),
    ("covariance", ["covariance.csv"]),
])
def test_verbs_write_outputs(tmp_path, verb, files):
    assert main([verb, "--config", str(QUICK), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["command"] == verb
    for f in files:
        text = (tmp_path / f).read_text()
        assert text.startswith("# bsvkernels ")
        assert "config_sha256" in text


def test_single_summary_values(tmp_path):
    main(["single", "--config", str(QUICK), "--out", str(tmp_path)])
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["gamma"] == pytest.approx(3.0 * 0.0212)
    assert s["symplectic_defect"] < 1e-6
    prof = read_csv(tmp_path / "profile.csv")
    w = np.diff(prof["q_per_m"])[0]
    assert np.sum(prof["N"]) * w == pytest.approx(s["total_photons"], rel=0.05)


def test_calibrate_roundtrip_from_csv(tmp_path):
    main(["sweep-gain", "--config", str(QUICK), "--out", str(tmp_path)])
    out = tmp_path / "cal"
    assert main(["calibrate", "--config", str(QUICK), "--out", str(out),
                 "--input", str(tmp_path / "sweep_gain.csv")]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["A"] > 0 and s["B"] > 0


def test_calibrate_recomputes(tmp_path):
    assert main(["calibrate", "--config", str(QUICK), "--out", str(tmp_path)]) == 0
    table = read_csv(tmp_path / "calibration.csv")
    assert len(table["gamma"]) == 6


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[crystal]\nlength_m = -1\n")
    assert main(["single", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_short_calibration_input_exit_code(tmp_path):
    csv = tmp_path / "short.csv"
    csv.write_text("gamma,N_collinear\n0.1,1\n0.2,2\n")
    assert main(["calibrate", "--config", str(QUICK), "--out", str(tmp_path),
                 "--input", str(csv)]) == 2


def test_numerical_diagnostic_exit_code(tmp_path, monkeypatch):
    import bsvkernels.cli as cli
    monkeypatch.setattr(cli, "SYMPLECTIC_TOL", 0.0)
    assert main(["single", "--config", str(QUICK), "--out", str(tmp_path)]) == 3


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "bsvkernels.cli", "schmidt", "--config", str(QUICK),
                          "--out", str(tmp_path), "--grid-n", "16"], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert len(read_csv(tmp_path / "weights.csv")["n"]) == 16
