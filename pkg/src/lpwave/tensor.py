"""Anisotropic d-dimensional projectors built axis by axis.

``apply_axis`` runs a 1-D operator over every line parallel to one axis.
Projectors ``E_kappa`` are the ascending-axis composition of the per-axis
projectors; details are either the composition of per-axis details (the
production path) or the signed sum over corners of the unit cube
(``inclusion_exclusion=True``), kept as an independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .grid import GridError, GridND, ResolutionError, SampledFunction, as_multi_index, lattice_box
from .proj1d import ProjectorContext


@dataclass(frozen=True)
class TensorContext:
    axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise ValueError("need at least one axis")
        if len({c.box.J for c in self.axes}) != 1:
            raise GridError("all axes must share the resolution J")

    @classmethod
    def build(cls, systems, boxes) -> "TensorContext":
        return cls(tuple(ProjectorContext(s, b) for s, b in zip(systems, boxes, strict=True)))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def grid(self) -> GridND:
        return GridND(tuple(c.box for c in self.axes))

    @property
    def kappa_max(self) -> tuple:
        return tuple(c.kappa_max for c in self.axes)

    def admissible(self, kappa) -> tuple:
        k = as_multi_index(kappa, self.d)
        for j, (kj, ctx) in enumerate(zip(k, self.axes)):
            if kj > ctx.kappa_max:
                raise ResolutionError(f"kappa_{j}={kj} exceeds kappa_max={ctx.kappa_max}")
        return k


def _along(arr: np.ndarray, axis: int, fn) -> np.ndarray:
    """Apply ``fn`` to every line along ``axis``; all-zero lines are skipped."""
    moved = np.moveaxis(arr, axis, -1)
    shape = moved.shape
    lines = moved.reshape(-1, shape[-1])
    live = np.flatnonzero(np.any(lines != 0, axis=1))
    if live.size == lines.shape[0]:
        res = fn(np.ascontiguousarray(lines))
    else:
        res = None
        sub = fn(np.ascontiguousarray(lines[live]))
        res = np.zeros(lines.shape, dtype=sub.dtype)
        res[live] = sub
    return np.ascontiguousarray(np.moveaxis(res.reshape(shape), -1, axis))


def _along_many(arr: np.ndarray, axis: int, fn) -> list:
    """Like :func:`_along` for an ``fn`` returning a list of line blocks."""
    moved = np.moveaxis(arr, axis, -1)
    shape = moved.shape
    lines = moved.reshape(-1, shape[-1])
    live = np.flatnonzero(np.any(lines != 0, axis=1))
    subs = fn(np.ascontiguousarray(lines[live]))
    out = []
    for sub in subs:
        res = np.zeros(lines.shape, dtype=sub.dtype)
        res[live] = sub
        out.append(np.ascontiguousarray(np.moveaxis(res.reshape(shape), -1, axis)))
    return out


def _axis_op(ctx: TensorContext, arr: np.ndarray, j: int, kind: str, kappa: int) -> np.ndarray:
    pc = ctx.axes[j]
    if kind == "project":
        return _along(arr, j, lambda L: pc.project_lines(L, kappa))
    if kind == "detail":
        return _along(arr, j, lambda L: pc.detail_lines(L, kappa))
    raise ValueError(f"unknown operator {kind!r}")


def _samples(ctx: TensorContext, f: SampledFunction) -> np.ndarray:
    if f.grid != ctx.grid:
        raise GridError("function grid differs from the tensor context grid")
    return f.samples


def apply_axis(ctx: TensorContext, j: int, op, f: SampledFunction) -> SampledFunction:
    """Apply ``op = ("project" | "detail", kappa_j)`` along axis ``j`` (0-based)."""
    if not 0 <= j < ctx.d:
        raise IndexError(f"axis {j} out of range for d={ctx.d}")
    kind, kappa = op
    out = _axis_op(ctx, _samples(ctx, f), j, kind, int(kappa))
    return SampledFunction.adopt(f.grid, out)


def project_nd(ctx: TensorContext, f: SampledFunction, kappa) -> SampledFunction:
    k = ctx.admissible(kappa)
    arr = _samples(ctx, f)
    for j, kj in enumerate(k):
        arr = _axis_op(ctx, arr, j, "project", kj)
    return SampledFunction.adopt(f.grid, arr)


def detail_nd(ctx: TensorContext, f: SampledFunction, kappa, inclusion_exclusion: bool = False) -> SampledFunction:
    k = ctx.admissible(kappa)
    arr = _samples(ctx, f)
    if not inclusion_exclusion:
        for j, kj in enumerate(k):
            arr = _axis_op(ctx, arr, j, "detail", kj)
        return SampledFunction.adopt(f.grid, arr)
    acc = np.zeros_like(arr)
    # corners eps in {0,1}^d with eps_j = 0 wherever kappa_j = 0 (E_-1 = 0)
    for eps in itertools.product(*[(0, 1) if kj > 0 else (0,) for kj in k]):
        term = arr
        for j, (kj, ej) in enumerate(zip(k, eps)):
            term = _axis_op(ctx, term, j, "project", kj - ej)
        acc = acc - term if sum(eps) % 2 else acc + term
    return SampledFunction.adopt(f.grid, acc)


def iter_detail_arrays(ctx: TensorContext, f: SampledFunction, k_cap) -> Iterator:
    """Yield ``(kappa, detail array)`` for kappa in Z_+^d(k_cap), lexicographically.

    Per-axis details of the leading axes are shared between the branches.
    """
    k = ctx.admissible(k_cap)
    arr = _samples(ctx, f)

    def walk(a, j, prefix):
        if j == ctx.d:
            yield prefix, a
            return
        ladder = _along_many(a, j, lambda L: ctx.axes[j].detail_ladder(L, k[j]))
        for kj, det in enumerate(ladder):
            yield from walk(det, j + 1, prefix + (kj,))

    yield from walk(arr, 0, ())


def partial_sum(ctx: TensorContext, f: SampledFunction, k) -> SampledFunction:
    """Sum of detail_nd over Z_+^d(k); telescopes to project_nd(f, k)."""
    acc = np.zeros(f.grid.shape, dtype=np.complex128)
    for _, det in iter_detail_arrays(ctx, f, k):
        acc = acc + det
    return SampledFunction.adopt(f.grid, acc)


# ------------------------------------------------------------------ signs


@dataclass(frozen=True)
class SignPattern:
    """Tensor signs: sigma_kappa = prod_j per_axis[j][kappa_j]."""

    per_axis: tuple

    def __post_init__(self):
        per_axis = tuple(tuple(int(v) for v in row) for row in self.per_axis)
        for row in per_axis:
            if any(v not in (-1, 1) for v in row):
                raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "per_axis", per_axis)

    @classmethod
    def ones(cls, k_cap) -> "SignPattern":
        return cls(tuple((1,) * (kj + 1) for kj in k_cap))

    @classmethod
    def random(cls, rng, k_cap) -> "SignPattern":
        return cls(tuple(tuple(rng.sign() for _ in range(kj + 1)) for kj in k_cap))

    def covers(self, k_cap) -> bool:
        return len(self.per_axis) == len(k_cap) and all(
            len(row) > kj for row, kj in zip(self.per_axis, k_cap)
        )

    def sign(self, kappa) -> int:
        s = 1
        for row, kj in zip(self.per_axis, kappa):
            s *= row[kj]
        return s


@dataclass(frozen=True)
class FreeSigns:
    """Independent sign per multi-index; outside the tensor theorem for d >= 2."""

    signs: dict

    @classmethod
    def random(cls, rng, k_cap) -> "FreeSigns":
        return cls({kappa: rng.sign() for kappa in lattice_box(k_cap)})

    def covers(self, k_cap) -> bool:
        return all(kappa in self.signs for kappa in lattice_box(k_cap))

    def sign(self, kappa) -> int:
        return self.signs[tuple(kappa)]
