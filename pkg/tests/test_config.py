import csv
import io
import os

import pytest

from lpwave.config import ExperimentConfig, ParseError, load_config, override, parse_config
from lpwave.experiment import RATIO_COLUMNS, SIGN_COLUMNS, NoInputsError, atomic_write, run, write_outputs

SMALL = """\
# a small run
scaling = db2
J = 7
k_cap = 3
p = 1.5
p = 3
kind = bandlimited
kind = bump
trials = 4
seed = 7
plot = no
"""


def test_parse_accumulates_and_broadcasts():
    cfg = parse_config(SMALL + "d = 2\n")
    assert cfg.p == (1.5, 3.0) and cfg.kind == ("bandlimited", "bump")
    assert cfg.k_cap == (3, 3) and cfg.band == 1 and cfg.scaling_specs == ("db2", "db2")
    assert cfg.plot is False


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("J = 7\nJ = 8\n", 2, "duplicate"),
        ("J = 7\nfoo = 1\n", 2, "unknown key"),
        ("J = 7\n\njust words\n", 3, "key = value"),
        ("d = two\n", 1, "bad value"),
        ("J = 8\nk_cap = 5\n", 2, "exceeds"),
        ("p = 1\n", 1, "outside"),
        ("kind = noise\n", 1, "unknown kind"),
        ("J = 6\nk_cap = 2\nbox = 0,0.3\n", 3, "multiple"),
        ("scaling = haar,db2,db3\nd = 2\n", 1, "scaling specs"),
    ],
)
def test_parse_errors_name_the_line(text, line, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        parse_config(text, "exp.cfg")
    assert info.value.line == line
    assert str(info.value).startswith(f"exp.cfg:{line}:")


def test_load_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        load_config(tmp_path / "nope.cfg")


def test_hash_ignores_output_only():
    a = parse_config(SMALL)
    assert a.hash() == override(a, output="elsewhere").hash()
    assert a.hash() != override(a, seed=8).hash()
    assert len(a.hash()) == 12


def test_empty_corpus_is_an_error():
    cfg = parse_config("J = 6\nk_cap = 2\nkind = none\n")
    with pytest.raises(NoInputsError):
        run(cfg)


def test_minimal_haar_config_gives_ratio_one():
    # haar on [0, 1) with a step function at the cap scale: S f = |f| exactly for p = 2
    res = run(parse_config("J = 6\nk_cap = 2\np = 2\nkind = step\nbox = 0,1\n"))
    assert res.ok
    assert all(abs(r["ratio"] - 1) <= 1e-12 for r in res.ratio_rows)


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_outputs_are_deterministic_and_hashed(tmp_path):
    cfg = parse_config(SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    write_outputs(run(cfg), a)
    write_outputs(run(cfg), b)
    names = sorted(os.listdir(a))
    assert names == ["ratios.csv", "signs.csv", "summary.json"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    rows = read_csv(a / "ratios.csv")
    assert tuple(rows[0]) == RATIO_COLUMNS
    assert {r["config_hash"] for r in rows} == {cfg.hash()}
    signs = read_csv(a / "signs.csv")
    assert tuple(signs[0]) == SIGN_COLUMNS and len(signs) == 2 * 2 * 4
    assert {r["config_hash"] for r in signs} == {cfg.hash()}


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "x.txt"
    atomic_write(target, "one\n")
    atomic_write(target, "two\n")
    assert target.read_text() == "two\n"
    assert os.listdir(target.parent) == ["x.txt"]


def test_defaults_validate():
    assert ExperimentConfig().validate().k_cap == (6,)
