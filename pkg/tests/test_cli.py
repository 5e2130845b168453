import csv
import math
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from pmicsim.cli import main
from pmicsim.io import read_csv_slice, read_pgm

CONFIGS = Path(__file__).parents[1] / "configs"
SMALL = """\
L = 1
y0 = 0.245
a = 0.01
N = 2000
y_points = 1024
t_points = 16
t_list = 0, 2e-5
d_list = 0, 4e-4
"""


@pytest.fixture
def small_cfg(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    p = tmp_path / "small.cfg"
    p.write_text(SMALL + f"out_dir = {tmp_path / 'out'}\n")
    return p


@pytest.fixture
def default_cfg(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return CONFIGS / "default.cfg"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_slice_plateau_end_to_end(default_cfg, tmp_path, capsys):
    code, out, err = _run(capsys, "slice", default_cfg, "--t", "0")
    assert code == 0, err
    y, d = read_csv_slice(tmp_path / "out" / "slice_t0.csv")
    assert y.size == 4096
    core = np.abs(y - 0.245) <= 0.003
    assert np.mean(d[core]) == pytest.approx(100, rel=0.01)
    assert out.strip().endswith("slice_t0.csv")


def test_slice_uses_t_list(small_cfg, tmp_path, capsys):
    code, out, _ = _run(capsys, "slice", small_cfg)
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["slice_t0.csv", "slice_t2e-05.csv"]


def test_screen_outputs_match_slices(small_cfg, tmp_path, capsys):
    assert _run(capsys, "screen", small_cfg)[0] == 0
    assert _run(capsys, "slice", small_cfg, "--t", "0", "--t", "4e-5")[0] == 0
    out = tmp_path / "out"
    # D = 4e-4 at k_x = 10 is a flight time of 4e-5
    assert (out / "screen_d0.0004.csv").read_bytes() == (out / "slice_t4e-05.csv").read_bytes()
    assert (out / "screen_d0.csv").read_bytes() == (out / "slice_t0.csv").read_bytes()


def test_carpet_outputs(small_cfg, tmp_path, capsys):
    assert _run(capsys, "carpet", small_cfg)[0] == 0
    pix, peak = read_pgm(tmp_path / "out" / "carpet.pgm")
    assert pix.shape == (16, 1024)
    np.testing.assert_array_equal(pix[0], pix[-1])
    assert pix.max() == 65535 and peak > 0
    with open(tmp_path / "out" / "carpet.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "y", "density"]
    assert len(rows) == 1 + 16 * 1024
    assert float(rows[-1][0]) == pytest.approx(4 / math.pi)


def test_carpet_is_deterministic_across_workers(small_cfg, tmp_path, capsys):
    assert _run(capsys, "carpet", small_cfg, "--workers", "1")[0] == 0
    one = [(tmp_path / "out" / n).read_bytes() for n in ("carpet.pgm", "carpet.csv")]
    assert _run(capsys, "carpet", small_cfg, "--workers", "3")[0] == 0
    three = [(tmp_path / "out" / n).read_bytes() for n in ("carpet.pgm", "carpet.csv")]
    assert one == three


def test_revivals_small(small_cfg, tmp_path, capsys):
    T = 4 / math.pi
    assert _run(capsys, "revivals", small_cfg, "--t-max", 1.01 * T)[0] == 0
    with open(tmp_path / "out" / "revivals.csv") as fh:
        rows = list(csv.DictReader(fh))
    kinds = {(r["class"], round(float(r["time"]) / T, 6)) for r in rows}
    assert {("full", 0.0), ("mirror", 0.5), ("full", 1.0)} <= kinds
    assert ("fractional/5", 0.1) in kinds


def test_revivals_default_config(default_cfg, tmp_path, capsys):
    T = 4 / math.pi
    assert _run(capsys, "revivals", default_cfg)[0] == 0
    with open(tmp_path / "out" / "revivals.csv") as fh:
        rows = list(csv.DictReader(fh))
    hits = [(r["class"], float(r["time"])) for r in rows]
    full = [t for c, t in hits if c == "full"]
    mirror = [t for c, t in hits if c == "mirror"]
    assert full[0] == 0.0 and full[1] == pytest.approx(T, rel=1e-12)
    assert mirror == [pytest.approx(T / 2, rel=1e-12)]


def test_validate_default_config(default_cfg, capsys):
    code, out, err = _run(capsys, "validate", default_cfg)
    assert code == 0, err
    lines = out.strip().splitlines()
    assert lines and all(l.startswith("PASS") for l in lines)


def test_figures_parameter_sets(small_cfg, tmp_path, capsys):
    p = tmp_path / "fig.cfg"
    p.write_text(SMALL.replace("y_points = 1024", "y_points = 256").replace("t_points = 16", "t_points = 8") + f"out_dir = {tmp_path / 'figs'}\n")
    assert _run(capsys, "figures", p)[0] == 0
    names = {f.name for f in (tmp_path / "figs").iterdir()}
    assert "fig1_carpet.pgm" in names
    assert {"fig2a.csv", "fig3c.csv", "fig6b.csv", "fig7c.csv", "fig7d.csv", "fig7a_t0.1T.csv"} <= names
    pix, _ = read_pgm(tmp_path / "figs" / "fig1_carpet.pgm")
    # y0 = 0 carpet: every row is mirror symmetric, byte for byte
    np.testing.assert_array_equal(pix, pix[:, ::-1])


def test_config_error_is_single_line(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("L=1\ny0=0.6\na=0.01\nN=10\n")
    code, out, err = _run(capsys, "slice", p, "--t", "0")
    assert code == 1
    assert err.count("\n") == 1
    assert err.startswith("error: kind=validation key=y0 line=2 message=")


def test_missing_times_is_a_validation_error(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("L=1\ny0=0.245\na=0.01\nN=10\n")
    code, _, err = _run(capsys, "slice", p)
    assert code == 1 and "key=t_list" in err


def test_usage_errors(tmp_path, capsys):
    code, _, err = _run(capsys, "nonsense")
    assert code == 1 and err.startswith("error: kind=validation")
    code, _, err = _run(capsys, "slice", tmp_path / "absent.cfg", "--t", "0")
    assert code == 1 and err.count("\n") == 1


def test_bad_workers(small_cfg, capsys):
    code, _, err = _run(capsys, "carpet", small_cfg, "--workers", "0")
    assert code == 1 and "key=workers" in err


def test_unwritable_output_is_a_runtime_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    p = tmp_path / "c.cfg"
    p.write_text(SMALL + f"out_dir = {blocker / 'sub'}\n")
    code, _, err = _run(capsys, "slice", p, "--t", "0")
    assert code == 2
    assert err.startswith("error: kind=runtime") and err.count("\n") == 1


@pytest.mark.skipif(shutil.which("pmicsim") is None, reason="console script not installed")
def test_console_script(small_cfg, tmp_path):
    res = subprocess.run(["pmicsim", "slice", str(small_cfg), "--t", "0"], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "out" / "slice_t0.csv").exists()
