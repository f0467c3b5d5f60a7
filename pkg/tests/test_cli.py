import csv
import io
import json

import numpy as np
import pytest

from lpwave.cli import main
from lpwave.experiment import RATIO_COLUMNS
from lpwave.grid import Grid1D, GridND, SampledFunction, load_function, save_function


@pytest.fixture
def half(tmp_path):
    # chi[0, 1/2) on [0, 1) at J = 7
    g = Grid1D.from_interval(7, 0, 1)
    path = tmp_path / "half.fn"
    save_function(SampledFunction.from_callable(g, lambda x: (x < 0.5) * 1.0), path)
    return path


@pytest.fixture
def square(tmp_path):
    g = Grid1D.from_interval(6, 0, 1)
    path = tmp_path / "sq.fn"
    save_function(SampledFunction.from_callable(GridND.cube(g, 2), lambda x, y: (x < 0.5) * (y < 0.25) * 1.0), path)
    return path


@pytest.fixture(autouse=True)
def no_env_dir(monkeypatch):
    monkeypatch.delenv("LPWAVE_OUTPUT_DIR", raising=False)


def test_project_and_detail(half, tmp_path):
    out = tmp_path / "p.fn"
    assert main(["project", "--kappa", "0", "--in", str(half), "--out", str(out)]) == 0
    assert np.allclose(load_function(out).samples, 0.5)
    assert main(["project", "--kappa", "1", "--detail", "--in", str(half), "--out", str(out)]) == 0
    assert np.allclose(np.abs(load_function(out).samples), 0.5)


def test_project_nd_paths_agree(square, tmp_path):
    a, b = tmp_path / "a.fn", tmp_path / "b.fn"
    assert main(["project-nd", "--kappa", "1,2", "--detail", "--in", str(square), "--out", str(a)]) == 0
    assert main(["project-nd", "--kappa", "1,2", "--detail", "--inclusion-exclusion",
                 "--in", str(square), "--out", str(b)]) == 0
    assert load_function(a).sup_distance(load_function(b)) <= 1e-13


def test_lp_ratio_stdout(half, capsys):
    assert main(["lp-ratio", "--k-cap", "2", "--p", "4", "--in", str(half)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert tuple(rows[0]) == RATIO_COLUMNS
    assert abs(float(rows[0]["ratio"]) - 2**-0.25) <= 1e-14
    assert len(rows[0]["config_hash"]) == 12


def test_env_dir_overrides(half, tmp_path, monkeypatch):
    monkeypatch.setenv("LPWAVE_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["lp-ratio", "--k-cap", "2", "--in", str(half), "--out-dir", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "env" / "ratios.csv").exists() and not (tmp_path / "flag").exists()


def test_sign_sweep_writes_dir(half, tmp_path):
    assert main(["sign-sweep", "--k-cap", "2", "--trials", "5", "--in", str(half), "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "signs.csv").open()))
    assert len(rows) == 5 and {r["free_signs"] for r in rows} == {"0"}


def test_czd_and_weak11(half, tmp_path, capsys):
    assert main(["czd", "--alpha", "0.25", "--in", str(half), "--out", str(tmp_path / "cz.json")]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["selected"] == [[0, 0]] and info["reconstruction"]["passed"]
    assert main(["weak11", "--k-cap", "2", "--signs", "1,-1,1", "--in", str(half)]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["grid_max"] <= info["sup"] * (1 + 1e-12)


def test_khintchine(capsys):
    assert main(["khintchine", "--a", "1,1", "--p", "4"]) == 0
    res = json.loads(capsys.readouterr().out)["results"][0]
    assert res["moment"] == 8.0 and res["exhaustive"]


def test_validate_and_gen_scaling(tmp_path, capsys):
    assert main(["validate", "--scaling", "db2", "--J", "7"]) == 0
    assert json.loads(capsys.readouterr().out)["valid"]
    assert main(["gen-scaling", "--scaling", "db2", "--J", "6", "--out", str(tmp_path / "d2.sys")]) == 0
    assert main(["validate", "--scaling", f"file:{tmp_path / 'd2.sys'}", "--J", "6"]) == 0


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("J = 6\nk_cap = 2\np = 2\nkind = step\nbox = 0,1\n")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    first = (tmp_path / "o" / "ratios.csv").read_bytes()
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "ratios.csv").read_bytes() == first


@pytest.mark.parametrize(
    "text, fragment",
    [("J = 6\nk_cap = 2\nkind = none\n", "no inputs"), ("J = 6\nk_cap = 2\np = 1\n", "exp.cfg:3:")],
)
def test_run_bad_configs_exit_2(tmp_path, capsys, text, fragment):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(text)
    assert main(["run", str(cfg)]) == 2
    assert fragment in capsys.readouterr().err


def test_bad_inputs_exit_2(half, tmp_path, capsys):
    assert main(["lp-ratio", "--k-cap", "2"]) == 2
    assert main(["lp-ratio", "--k-cap", "2", "--p", "1", "--in", str(half)]) == 2
    assert main(["project", "--kappa", "0", "--in", str(tmp_path / "missing.fn")]) == 2
    assert main(["project", "--kappa", "5", "--in", str(half)]) == 2
    assert main(["project", "--kappa", "0", "--scaling", "mexican-hat", "--in", str(half)]) == 2


def test_suite_single_criterion(capsys):
    assert main(["suite", "--only", "8"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  8. Khintchine" in out and "1/1 criteria passed" in out
