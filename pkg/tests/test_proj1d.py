import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from lpwave.corpus import interior_box
from lpwave.grid import Grid1D, ResolutionError, SampledFunction, inner_product, lp_norm
from lpwave.proj1d import ProjectorContext, coefficients, detail, project
from lpwave.scaling import daubechies_system, haar_system

J = 8
BOX = Grid1D.from_interval(J, -2, 2)
HAAR = ProjectorContext(haar_system(J), BOX)


def chi(a, b, grid=BOX):
    return SampledFunction.from_callable(grid, lambda x: ((x >= a) & (x < b)) * 1.0)


# ---------------------------------------------------------------- goldens


@pytest.mark.parametrize(
    "f, kappa, expect",
    [((0, 1), 0, {0: 1.0}), ((0, 0.5), 0, {0: 0.5}), ((0, 0.5), 1, {0: 1.0})],
)
def test_coefficient_goldens(f, kappa, expect):
    got = {nu: c for nu, c in coefficients(HAAR, chi(*f), kappa).items() if c != 0}
    assert got == expect


def test_project_goldens():
    assert project(HAAR, chi(0, 1), 0).sup_distance(chi(0, 1)) == 0
    assert project(HAAR, chi(0, 0.5), 0).sup_distance(chi(0, 1) * 0.5) == 0
    assert project(HAAR, chi(0, 0.5), 1).sup_distance(chi(0, 0.5)) == 0


def test_detail_goldens():
    f = chi(0, 0.5)
    assert detail(HAAR, f, 0).sup_distance(project(HAAR, f, 0)) == 0
    expect = (chi(0, 0.5) - chi(0.5, 1)) * 0.5
    assert detail(HAAR, f, 1).sup_distance(expect) == 0
    assert lp_norm(detail(HAAR, chi(0, 1), 1), math.inf) <= 1e-12


def test_resolution_error():
    with pytest.raises(ResolutionError):
        project(HAAR, chi(0, 1), J - 3)


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("name", ["haar", "db2", "db4"])
@pytest.mark.parametrize("kappa", [0, 1, 3])
def test_matches_brute_force_quadrature(name, kappa):
    sy = haar_system(J) if name == "haar" else daubechies_system(int(name[2:]), J)
    box = Grid1D.from_interval(J, -3, 4)
    rng = np.random.default_rng(kappa)
    f = SampledFunction(box, rng.standard_normal(box.n) + 1j * rng.standard_normal(box.n))
    got = project(ProjectorContext(sy, box), f, kappa).samples
    want = oracles.project(sy, box, f.samples, kappa)
    assert np.max(np.abs(got - want)) <= 1e-12


@given(st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_haar_is_block_average(kappa, seed):
    rng = np.random.default_rng(seed)
    f = SampledFunction(BOX, rng.standard_normal(BOX.n))
    got = project(HAAR, f, kappa).samples
    assert np.max(np.abs(got - oracles.haar_project(f.samples, J, BOX.support_lo, kappa))) <= 1e-13


def test_nu_range_covers_exactly_the_meeting_translates():
    sy = daubechies_system(3, J)
    ctx = ProjectorContext(sy, BOX)
    for kappa in (0, 2):
        first, count = ctx.nu_range(kappa)
        table, lo = sy.table(kappa, dual=True)
        hit = [
            nu for nu in range(first - 5, first + count + 5)
            if np.any(oracles.translate(table, lo, J, kappa, nu, BOX.support_lo, BOX.n))
        ]
        assert hit[0] >= first and hit[-1] < first + count


# ---------------------------------------------------------------- algebra

DB4 = daubechies_system(4, J)
# data in [0, 1), projected twice: every translate stays inside the box
DB4_CTX = ProjectorContext(DB4, interior_box(DB4, J, scales=(0, 0)))


def rand_f(ctx, seed):
    rng = np.random.default_rng(seed)
    x = ctx.box.midpoints()
    return SampledFunction(ctx.box, rng.standard_normal(x.size) * ((x >= 0) & (x < 1)))


kappas = st.integers(0, J - 4)


@given(st.sampled_from(["haar", "db4"]), kappas, kappas, st.integers(0, 1000))
def test_projector_algebra(name, k1, k2, seed):
    ctx = HAAR if name == "haar" else DB4_CTX
    f, g = rand_f(ctx, seed), rand_f(ctx, seed + 1)
    Pf = project(ctx, f, k1)
    assert project(ctx, Pf, k1).sup_distance(Pf) <= 1e-8
    assert project(ctx, project(ctx, f, k2), k1).sup_distance(project(ctx, f, min(k1, k2))) <= 1e-8
    Df = detail(ctx, detail(ctx, f, k2), k1)
    target = detail(ctx, f, k1) if k1 == k2 else SampledFunction.zeros(ctx.box)
    assert Df.sup_distance(target) <= 1e-8
    assert abs(inner_product(Pf, g) - inner_product(f, project(ctx, g, k1))) <= 1e-8


@pytest.mark.parametrize("ctx", [HAAR, DB4_CTX], ids=["haar", "db4"])
def test_telescoping_and_parseval(ctx):
    f = rand_f(ctx, 5)
    kmax = ctx.kappa_max
    dets = [detail(ctx, f, k) for k in range(kmax + 1)]
    acc = SampledFunction.zeros(ctx.box)
    for d in dets:
        acc = acc + d
    assert acc.sup_distance(project(ctx, f, kmax)) <= 1e-12
    energy = sum(lp_norm(d, 2) ** 2 for d in dets) + lp_norm(f - project(ctx, f, kmax), 2) ** 2
    assert abs(energy - lp_norm(f, 2) ** 2) <= 1e-4 * lp_norm(f, 2) ** 2


def test_uniform_lp_bound():
    # one empirical constant over the corpus; reported, and must stay moderate
    worst = 0.0
    for seed in range(6):
        for ctx in (HAAR, DB4_CTX):
            f = rand_f(ctx, seed)
            for p in (1.25, 2.0, 4.0):
                for k in range(ctx.kappa_max + 1):
                    worst = max(worst, lp_norm(project(ctx, f, k), p) / lp_norm(f, p))
    assert math.isfinite(worst) and worst <= 5.0


def test_real_and_complex_paths_agree():
    rng = np.random.default_rng(3)
    re, im = rng.standard_normal(BOX.n), rng.standard_normal(BOX.n)
    ctx = ProjectorContext(DB4, BOX)
    a = project(ctx, SampledFunction(BOX, re + 1j * im), 2).samples
    b = project(ctx, SampledFunction(BOX, re), 2).samples + 1j * project(ctx, SampledFunction(BOX, im), 2).samples
    assert np.array_equal(a, b)
