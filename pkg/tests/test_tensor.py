import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from lpwave.corpus import interior_box
from lpwave.grid import Grid1D, GridError, GridND, ResolutionError, SampledFunction, inner_product, lattice_box
from lpwave.lpverify import XorShift64Star, sign_sum
from lpwave.proj1d import ProjectorContext, project
from lpwave.scaling import daubechies_system, haar_system
from lpwave.tensor import (
    FreeSigns,
    SignPattern,
    TensorContext,
    apply_axis,
    detail_nd,
    iter_detail_arrays,
    partial_sum,
    project_nd,
)

J = 7
HBOX = Grid1D.from_interval(J, 0, 1)
HAAR2 = TensorContext.build([haar_system(J, HBOX)] * 2, [HBOX] * 2)
D2 = daubechies_system(2, J)
D2BOX = interior_box(D2, J, scales=(0, 0))
MIXED = TensorContext.build([haar_system(J), D2], [Grid1D.from_interval(J, -2, 3), D2BOX])


def rand_f(ctx, seed, complex_=False):
    rng = np.random.default_rng(seed)
    shape = ctx.grid.shape
    a = rng.standard_normal(shape)
    if complex_:
        a = a + 1j * rng.standard_normal(shape)
    # keep the data inside [0, 1)^d so every translate fits the boxes
    for j, c in enumerate(ctx.axes):
        x = c.box.midpoints()
        mask = ((x >= 0) & (x < 1)).reshape([-1 if i == j else 1 for i in range(ctx.d)])
        a = a * mask
    return SampledFunction(ctx.grid, a)


def test_project_nd_golden():
    f = SampledFunction.from_callable(
        HAAR2.grid, lambda x, y: ((x < 0.5) & (y < 0.5)) * 1.0
    )
    assert np.allclose(project_nd(HAAR2, f, (0, 0)).samples, 0.25, atol=0, rtol=0)
    px = project_nd(HAAR2, f, (1, 0)).samples
    x = HBOX.midpoints()
    assert np.array_equal(px, np.where(x < 0.5, 0.5, 0.0)[:, None] * np.ones(HBOX.n))


def test_detail_nd_golden():
    f = SampledFunction.from_callable(HAAR2.grid, lambda x, y: ((x < 0.5) & (y < 0.5)) * 1.0)
    x = HBOX.midpoints()
    h = np.where(x < 0.5, 0.25, -0.25)  # detail of chi[0,1/2) at scale 1
    want = np.outer(h, h) * 4
    assert np.max(np.abs(detail_nd(HAAR2, f, (1, 1)).samples - want)) == 0
    assert np.max(np.abs(detail_nd(HAAR2, f, (2, 0)).samples)) == 0


def test_apply_axis_matches_1d_projector_on_lines():
    f = rand_f(MIXED, 1)
    g = apply_axis(MIXED, 1, ("project", 2), f).samples
    for row in (0, 5, 300):
        line = SampledFunction(GridND((MIXED.axes[1].box,)), f.samples[row])
        assert np.allclose(g[row], project(MIXED.axes[1], line, 2).samples, rtol=0, atol=1e-14)
    with pytest.raises(IndexError):
        apply_axis(MIXED, 2, ("project", 0), f)
    with pytest.raises(ValueError):
        apply_axis(MIXED, 0, ("smooth", 0), f)


def test_apply_axis_commutes():
    f = rand_f(MIXED, 2, complex_=True)
    a = apply_axis(MIXED, 1, ("detail", 1), apply_axis(MIXED, 0, ("project", 2), f))
    b = apply_axis(MIXED, 0, ("project", 2), apply_axis(MIXED, 1, ("detail", 1), f))
    assert a.sup_distance(b) <= 1e-12


def test_haar_project_nd_is_block_average():
    f = rand_f(HAAR2, 3)
    got = project_nd(HAAR2, f, (2, 1)).samples
    rows = np.apply_along_axis(oracles.haar_project, 0, f.samples, J, 0, 2)
    want = np.apply_along_axis(oracles.haar_project, 1, rows, J, 0, 1)
    assert np.max(np.abs(got - want)) <= 1e-13


@given(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(0, 500))
def test_inclusion_exclusion_equals_factored(kappa, seed):
    f = rand_f(MIXED, seed)
    a = detail_nd(MIXED, f, kappa)
    b = detail_nd(MIXED, f, kappa, inclusion_exclusion=True)
    assert a.sup_distance(b) <= 1e-10


@pytest.mark.parametrize("ctx", [HAAR2, MIXED], ids=["haar", "haar x db2"])
def test_partial_sum_telescopes(ctx):
    f = rand_f(ctx, 4, complex_=True)
    for k in [(0, 0), (2, 1), (3, 3)]:
        assert partial_sum(ctx, f, k).sup_distance(project_nd(ctx, f, k)) <= 1e-12


def test_iter_detail_arrays_order_and_values():
    f = rand_f(MIXED, 5)
    items = list(iter_detail_arrays(MIXED, f, (2, 1)))
    assert [k for k, _ in items] == list(lattice_box((2, 1)))
    for k, arr in items:
        assert np.max(np.abs(arr - detail_nd(MIXED, f, k).samples)) <= 1e-12


def test_distinct_details_are_orthogonal():
    # haar is orthonormal, so the detail spaces are mutually orthogonal
    f = rand_f(HAAR2, 6)
    dets = {k: SampledFunction(HAAR2.grid, a) for k, a in iter_detail_arrays(HAAR2, f, (3, 3))}
    keys = list(dets)
    scale = inner_product(f, f).real
    for i, a in enumerate(keys):
        for b in keys[i + 1 :]:
            assert abs(inner_product(dets[a], dets[b])) <= 1e-12 * scale


def test_admissibility_and_grid_checks():
    f = rand_f(HAAR2, 0)
    with pytest.raises(ResolutionError):
        project_nd(HAAR2, f, (J - 3, 0))
    other = SampledFunction(GridND.cube(Grid1D.from_interval(J, 0, 2), 2), np.zeros((256, 256)))
    with pytest.raises(GridError):
        project_nd(HAAR2, other, (0, 0))
    with pytest.raises(GridError):
        TensorContext.build([haar_system(6), haar_system(7)], [Grid1D.from_interval(6, 0, 1), HBOX])


def test_sign_patterns():
    p = SignPattern(((1, -1, 1), (-1, 1)))
    assert p.sign((1, 0)) == 1 and p.sign((2, 1)) == 1 and p.sign((1, 1)) == -1
    assert p.covers((2, 1)) and not p.covers((3, 1))
    with pytest.raises(ValueError):
        SignPattern(((1, 0),))
    rng = XorShift64Star(9)
    free = FreeSigns.random(rng, (2, 2))
    assert free.covers((2, 2)) and not free.covers((3, 2))
    assert set(free.signs.values()) <= {-1, 1}
    assert SignPattern.random(XorShift64Star(4), (3, 1)) == SignPattern.random(XorShift64Star(4), (3, 1))


def test_all_ones_sign_sum_is_partial_sum_bitwise():
    f = rand_f(MIXED, 7, complex_=True)
    k = (3, 2)
    assert np.array_equal(sign_sum(MIXED, f, SignPattern.ones(k), k).samples, partial_sum(MIXED, f, k).samples)
