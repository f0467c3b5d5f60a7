import numpy as np
import pytest

from lpwave.corpus import KINDS, build_corpus, interior_box, make
from lpwave.grid import Grid1D, GridND
from lpwave.scaling import daubechies_system, haar_system
from lpwave.tensor import TensorContext


@pytest.mark.parametrize(
    "sys, scales, lo, hi",
    [(haar_system(8), (0,), 0, 1), (daubechies_system(2, 8), (0, 0), -4, 5), (daubechies_system(4, 8), (1, 0), -9, 10)],
)
def test_interior_box_goldens(sys, scales, lo, hi):
    assert interior_box(sys, 8, scales=scales) == Grid1D.from_interval(8, lo, hi)


@pytest.mark.parametrize("kind", KINDS)
def test_corpus_lives_in_unit_cube(kind):
    g = Grid1D.from_interval(7, -1, 2)
    sy = haar_system(7, g)
    ctx = TensorContext.build([sy, sy], [g, g])
    f = make(kind, ctx.grid, seed=3, scale=2, ctx=ctx)
    x, y = ctx.grid.midpoints()
    outside = ~((x >= 0) & (x < 1) & (y >= 0) & (y < 1))
    assert not np.any(f.samples[outside]) and np.any(f.samples)


def test_build_corpus_is_seeded():
    g = GridND((Grid1D.from_interval(7, 0, 1),))
    a = build_corpus(("step", "spike"), g, seed=4, scale=2, copies=2)
    b = build_corpus(("step", "spike"), g, seed=4, scale=2, copies=2)
    assert [i.f_id for i in a] == [i.f_id for i in b] and len(a) == 4
    assert all(np.array_equal(x.f.samples, y.f.samples) for x, y in zip(a, b))
