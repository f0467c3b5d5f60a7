import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpwave.czd import DyadicInterval, cz_decompose, load_decomposition, save_decomposition, verify_cz
from lpwave.grid import Grid1D, SampledFunction

J = 8
BOX = Grid1D.from_interval(J, -2, 2)


def chi(a, b, grid=BOX):
    return SampledFunction.from_callable(grid, lambda x: ((x >= a) & (x < b)) * 1.0)


def test_dyadic_interval():
    q = DyadicInterval(-1, 1)
    assert q.length == 2.0 and q.left == 2.0
    assert DyadicInterval(2, 3).cells(4) == (12, 16)
    assert DyadicInterval(0, 0).intersects(DyadicInterval(2, 3))
    assert not DyadicInterval(0, 0).intersects(DyadicInterval(0, 1))


def test_indicator_quarter_selects_enclosing_interval():
    dec = cz_decompose(chi(0, 1), 0.25)
    assert dec.selected == (DyadicInterval(-1, 0),)
    assert np.allclose(dec.good.samples[(dec.good.grid1d.midpoints() >= 0) & (dec.good.grid1d.midpoints() < 2)], 0.5)
    assert verify_cz(dec, chi(0, 1)).passed


def test_indicator_above_level_selects_nothing():
    f = chi(0, 1)
    dec = cz_decompose(f, 2.0)
    assert dec.selected == () and dec.bad_parts == ()
    assert dec.good.sup_distance(f) == 0
    assert verify_cz(dec, f).passed


def test_bad_parts_have_mean_zero():
    f = chi(0, 0.25) * 8 + chi(1, 1.5) * 3
    dec = cz_decompose(f, 1.0)
    assert dec.selected
    for h in dec.bad_parts:
        assert abs(h.samples.sum()) * h.grid1d.step <= 1e-12
    assert verify_cz(dec, f).passed


def test_nonpositive_alpha():
    with pytest.raises(ValueError):
        cz_decompose(chi(0, 1), 0.0)


@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=4, max_size=16),
    st.sampled_from([1e-2, 1e-1, 1.0, 10.0]),
)
def test_decomposition_properties(values, alpha):
    f = SampledFunction(BOX, np.repeat(np.array(values), BOX.n // len(values) + 1)[: BOX.n])
    if not np.any(f.samples):
        return
    rep = verify_cz(cz_decompose(f, alpha), f)
    assert rep.passed, rep.as_dict()


def test_tampered_decomposition_fails():
    f = chi(0, 0.25) * 8
    dec = cz_decompose(f, 1.0)
    assert verify_cz(dec, f).passed
    # drop a selected interval: f is no longer bounded off the selection
    broken = dataclasses.replace(dec, selected=dec.selected[1:] if len(dec.selected) > 1 else ())
    rep = verify_cz(broken, f)
    assert not rep["bounded_off_selection"].passed
    shifted = dataclasses.replace(dec, good=dec.good * 3.0)
    assert not verify_cz(shifted, f)["reconstruction"].passed


def test_save_load_roundtrip(tmp_path):
    f = chi(0, 0.25) * 8 + chi(1, 1.5) * 3
    dec = cz_decompose(f, 1.0)
    save_decomposition(dec, tmp_path / "cz.json")
    back = load_decomposition(tmp_path / "cz.json")
    assert back.selected == dec.selected and back.alpha == dec.alpha
    assert back.good.sup_distance(dec.good) == 0
    assert all(a.sup_distance(b) == 0 for a, b in zip(back.bad_parts, dec.bad_parts))
    assert verify_cz(back, f).as_dict() == verify_cz(dec, f).as_dict()
