"""Built-in test functions placed in the unit cube [0, 1)^d."""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np

from .grid import Grid1D, GridND, SampledFunction
from .tensor import TensorContext, project_nd

KINDS = ("box", "step", "tensor", "bump", "spike", "bandlimited")


@dataclass(frozen=True, eq=False)
class CorpusItem:
    f_id: str
    f: SampledFunction
    meta: dict = field(default_factory=dict)


def _unit(x):
    return (x >= 0) & (x < 1)


def _step_1d(rng, x, s):
    vals = rng.uniform(-1.0, 1.0, 1 << s)
    cell = np.clip(np.floor(x * (1 << s)).astype(int), 0, (1 << s) - 1)
    return np.where(_unit(x), vals[cell], 0.0)


def _bump_1d(x):
    y = 2.0 * x - 1.0
    inside = np.abs(y) < 1
    out = np.zeros_like(x)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return out


def make(kind: str, grid: GridND, *, seed: int = 0, scale: int = 2, ctx: TensorContext | None = None) -> SampledFunction:
    """Sample one built-in function on ``grid``.

    ``scale`` is the dyadic level of steps and spikes and the band limit
    of ``bandlimited`` (which needs ``ctx``).
    """
    rng = np.random.default_rng(seed)
    xs = grid.midpoints()
    d = grid.d
    if kind == "box":
        vals = np.ones(grid.shape)
        for x in xs:
            vals = vals * _unit(x)
    elif kind == "step":
        vals = np.ones(grid.shape)
        cells = 1 << scale
        table = rng.uniform(-1.0, 1.0, (cells,) * d)
        idx = []
        for x in xs:
            vals = vals * _unit(x)
            idx.append(np.clip(np.floor(x * cells).astype(int), 0, cells - 1))
        vals = vals * table[tuple(np.broadcast_arrays(*idx))]
    elif kind == "tensor":
        vals = np.ones(grid.shape)
        for j, x in enumerate(xs):
            vals = vals * (_step_1d(rng, x, scale) if j % 2 == 0 else _bump_1d(x))
    elif kind == "bump":
        vals = np.ones(grid.shape)
        for x in xs:
            vals = vals * _bump_1d(x)
    elif kind == "spike":
        vals = np.full(grid.shape, 1.0)
        w = 2.0**-scale
        for x in xs:
            vals = vals * np.where((x >= 0) & (x < w), 2.0**scale, 0.0)
    elif kind == "bandlimited":
        if ctx is None:
            raise ValueError("bandlimited functions need a projector context")
        noise = np.ones(grid.shape)
        for x in xs:
            noise = noise * _unit(x)
        noise = noise * rng.standard_normal(grid.shape)
        return project_nd(ctx, SampledFunction.adopt(grid, noise), (scale,) * d)
    else:
        raise ValueError(f"unknown corpus kind {kind!r}; choose from {KINDS}")
    return SampledFunction.adopt(grid, np.broadcast_to(vals, grid.shape).astype(np.complex128))


def build_corpus(kinds, grid: GridND, *, ctx=None, seed=0, scale=2, copies=1) -> list:
    items = []
    for i, kind in enumerate(kinds):
        for c in range(copies):
            s = seed + 1000 * i + c
            f = make(kind, grid, seed=s, scale=scale, ctx=ctx)
            meta = {"kind": kind, "seed": s, "scale": scale}
            items.append(CorpusItem(f"{kind}-{c}" if copies > 1 else kind, f, meta))
    return items


def interior_box(sys, J: int, lo: float = 0.0, hi: float = 1.0, scales=(0,)) -> Grid1D:
    """Smallest box holding every translate that projection at each of ``scales``
    (applied in order) can reach from data supported in ``[lo, hi)``.

    Inside such a box no translate is truncated, so the discrete projectors
    stay exact. Scale 0 has the widest translates; a band-limited input at
    scale s then a projection at scales >= 0 needs ``scales=(s, 0)``.
    """
    samples, tlo = sys.table(0)
    unit = 1 << sys.J
    s0, s1 = math.floor(tlo / unit), math.ceil((tlo + samples.size) / unit)
    a, b = lo, hi
    for kappa in scales:
        w = 2**kappa
        nu_lo = math.floor(w * a - s1) + 1
        nu_hi = math.ceil(w * b - s0) - 1
        a, b = (nu_lo + s0) / w, (nu_hi + s1) / w
    return Grid1D.from_interval(J, min(a, lo), max(b, hi))
