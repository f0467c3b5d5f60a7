"""Sampled functions on uniform dyadic grids.

A grid of resolution ``J`` splits the line into cells ``[m, m + 1) * 2**-J``;
a :class:`Grid1D` keeps the cells ``support_lo <= m < support_hi``. Samples
are cell-midpoint values and functions vanish outside the support. All
integrals use the midpoint rule, which is exact for integrands that are
constant on the cells.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .kernels import synthesis

J_ACC = 4
"""At scale kappa at least ``2**J_ACC`` samples per translate must survive."""

MAX_J = 52


class GridError(ValueError):
    """Two grids that must agree do not, or a grid is malformed."""


class ResolutionError(ValueError):
    """A scale is too fine for the grid resolution."""


@dataclass(frozen=True)
class Grid1D:
    J: int
    support_lo: int
    support_hi: int

    def __post_init__(self):
        if not 0 <= self.J <= MAX_J:
            raise GridError(f"resolution J={self.J} outside [0, {MAX_J}]")
        if self.support_hi <= self.support_lo:
            raise GridError("support_hi must exceed support_lo")

    @classmethod
    def from_interval(cls, J: int, lo: float, hi: float) -> "Grid1D":
        """Grid covering ``[lo, hi)``; both ends must be multiples of ``2**-J``."""
        a, b = lo * 2**J, hi * 2**J
        if a != math.floor(a) or b != math.floor(b):
            raise GridError(f"[{lo}, {hi}) is not aligned to resolution {J}")
        return cls(J, int(a), int(b))

    @property
    def step(self) -> float:
        return 2.0**-self.J

    @property
    def n(self) -> int:
        return self.support_hi - self.support_lo

    @property
    def lo(self) -> float:
        return self.support_lo * self.step

    @property
    def hi(self) -> float:
        return self.support_hi * self.step

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.support_lo, self.support_hi) + 0.5) * self.step

    def contains(self, other: "Grid1D") -> bool:
        return (
            self.J == other.J
            and self.support_lo <= other.support_lo
            and other.support_hi <= self.support_hi
        )

    def hull(self, other: "Grid1D") -> "Grid1D":
        if self.J != other.J:
            raise GridError("hull of grids with different resolution")
        return Grid1D(
            self.J,
            min(self.support_lo, other.support_lo),
            max(self.support_hi, other.support_hi),
        )


@dataclass(frozen=True)
class GridND:
    axes: tuple

    def __post_init__(self):
        if not self.axes:
            raise GridError("a grid needs at least one axis")
        object.__setattr__(self, "axes", tuple(self.axes))
        if len({a.J for a in self.axes}) != 1:
            raise GridError("all axes must share one resolution")

    @classmethod
    def cube(cls, grid: Grid1D, d: int) -> "GridND":
        return cls((grid,) * d)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def J(self) -> int:
        return self.axes[0].J

    @property
    def shape(self) -> tuple:
        return tuple(a.n for a in self.axes)

    @property
    def cell_volume(self) -> float:
        return 2.0 ** (-self.J * self.d)

    def midpoints(self) -> list:
        """Per-axis midpoint arrays, broadcastable against each other."""
        out = []
        for j, a in enumerate(self.axes):
            shape = [1] * self.d
            shape[j] = a.n
            out.append(a.midpoints().reshape(shape))
        return out


GridLike = Union[Grid1D, GridND]


def as_grid_nd(grid: GridLike) -> GridND:
    return grid if isinstance(grid, GridND) else GridND((grid,))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex midpoint samples of a function on a (product) dyadic grid."""

    grid: GridND
    samples: np.ndarray

    def __post_init__(self):
        grid = as_grid_nd(self.grid)
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != grid.shape:
            raise GridError(f"sample shape {samples.shape} != grid shape {grid.shape}")
        if samples.flags.writeable or not samples.flags.c_contiguous:
            samples = np.array(samples, order="C")
        samples.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def adopt(cls, grid: GridLike, samples: np.ndarray) -> "SampledFunction":
        """Wrap a freshly computed array without copying it (it becomes read-only)."""
        samples = np.ascontiguousarray(samples, dtype=np.complex128)
        samples.flags.writeable = False
        return cls(grid, samples)

    @property
    def dim(self) -> int:
        return self.grid.d

    @property
    def grid1d(self) -> Grid1D:
        if self.grid.d != 1:
            raise GridError(f"expected a 1-D function, got d={self.grid.d}")
        return self.grid.axes[0]

    @classmethod
    def from_callable(cls, grid: GridLike, func) -> "SampledFunction":
        g = as_grid_nd(grid)
        vals = func(*g.midpoints())
        return cls(g, np.broadcast_to(np.asarray(vals, dtype=np.complex128), g.shape))

    @classmethod
    def zeros(cls, grid: GridLike) -> "SampledFunction":
        g = as_grid_nd(grid)
        return cls(g, np.zeros(g.shape, dtype=np.complex128))

    def with_samples(self, samples) -> "SampledFunction":
        return SampledFunction(self.grid, samples)

    def _check(self, other):
        if self.grid != other.grid:
            raise GridError("operands live on different grids")

    def __add__(self, other):
        self._check(other)
        return SampledFunction.adopt(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return SampledFunction.adopt(self.grid, self.samples - other.samples)

    def __mul__(self, scalar):
        return SampledFunction.adopt(self.grid, self.samples * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction.adopt(self.grid, -self.samples)

    def sup_distance(self, other) -> float:
        self._check(other)
        return float(np.max(np.abs(self.samples - other.samples), initial=0.0))

    def __repr__(self):
        return f"SampledFunction(grid={self.grid}, dim={self.dim})"


def embed(f: SampledFunction, grid: GridLike) -> SampledFunction:
    """Zero-extend ``f`` onto a larger grid."""
    g = as_grid_nd(grid)
    if g.d != f.dim:
        raise GridError("dimension mismatch")
    out = np.zeros(g.shape, dtype=np.complex128)
    sl = []
    for big, small in zip(g.axes, f.grid.axes):
        if not big.contains(small):
            raise GridError("target grid does not contain the source grid")
        a = small.support_lo - big.support_lo
        sl.append(slice(a, a + small.n))
    out[tuple(sl)] = f.samples
    return SampledFunction.adopt(g, out)


def restrict(f: SampledFunction, grid: GridLike) -> SampledFunction:
    """Samples of ``f`` on ``grid``, zero where ``grid`` leaves ``f``'s support."""
    g = as_grid_nd(grid)
    if g.d != f.dim or g.J != f.grid.J:
        raise GridError("restrict needs equal dimension and resolution")
    out = np.zeros(g.shape, dtype=np.complex128)
    src, dst = [], []
    for a_out, a_in in zip(g.axes, f.grid.axes):
        lo = max(a_out.support_lo, a_in.support_lo)
        hi = min(a_out.support_hi, a_in.support_hi)
        if hi <= lo:
            return SampledFunction.adopt(g, out)
        src.append(slice(lo - a_in.support_lo, hi - a_in.support_lo))
        dst.append(slice(lo - a_out.support_lo, hi - a_out.support_lo))
    out[tuple(dst)] = f.samples[tuple(src)]
    return SampledFunction.adopt(g, out)


# ------------------------------------------------------------------ multi-indices

MultiIndex = tuple


def as_multi_index(value, d: int | None = None) -> MultiIndex:
    """Validate ``value`` as an element of Z_+^d and return it as a tuple."""
    if isinstance(value, (int, np.integer)):
        value = (int(value),) * (d or 1)
    k = tuple(int(v) for v in value)
    if any(v < 0 for v in k):
        raise ValueError(f"multi-index {k} has a negative component")
    if d is not None and len(k) != d:
        raise ValueError(f"multi-index {k} has length {len(k)}, expected {d}")
    return k


def parse_multi_index(text: str, d: int | None = None) -> MultiIndex:
    """Parse ``"2,1"`` into ``(2, 1)``."""
    try:
        parts = [int(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise ValueError(f"cannot parse multi-index {text!r}") from None
    if not parts:
        raise ValueError("empty multi-index")
    if d is not None and len(parts) == 1 and d > 1:
        parts = parts * d
    return as_multi_index(parts, d)


def lattice_box(k: Sequence[int]) -> Iterator[MultiIndex]:
    """All kappa in Z_+^d(k), in lexicographic order."""
    return itertools.product(*(range(kj + 1) for kj in k))


# ------------------------------------------------------------------ operations


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Midpoint-rule value of the integral of ``f * conj(g)``."""
    if f.grid != g.grid:
        raise GridError("inner_product needs identical grids")
    return complex(np.vdot(g.samples, f.samples) * f.grid.cell_volume)


def lp_norm(f: SampledFunction, p: float) -> float:
    """Midpoint-rule L_p norm; ``p = math.inf`` gives the sample maximum."""
    if p == math.inf:
        return float(np.max(np.abs(f.samples), initial=0.0))
    if not p >= 1:
        raise ValueError(f"L_p norm needs p >= 1, got {p}")
    a = np.abs(f.samples)
    if p == 1:
        return float(np.sum(a) * f.grid.cell_volume)
    if p == 2:
        return math.sqrt(float(np.sum(a * a)) * f.grid.cell_volume)
    # scale first so large p does not overflow
    top = float(np.max(a, initial=0.0))
    if top == 0.0:
        return 0.0
    return top * float(np.sum((a / top) ** p) * f.grid.cell_volume) ** (1.0 / p)


def check_scale(kappa: int, J: int) -> None:
    if kappa < 0:
        raise ResolutionError(f"scale {kappa} is negative")
    if kappa > J - J_ACC:
        raise ResolutionError(
            f"scale {kappa} exceeds J - {J_ACC} = {J - J_ACC}; quadrature unreliable"
        )


def dilate_translate(phi: SampledFunction, kappa: int, nu: int, target: Grid1D) -> SampledFunction:
    """Samples of ``x -> phi(2**kappa * x - nu)`` on ``target``.

    Output cell ``m`` reads the phi cell ``2**kappa * m - nu * 2**J``.
    """
    src = phi.grid1d
    if src.J != target.J:
        raise GridError("phi and target must share the resolution")
    check_scale(kappa, target.J)
    coeff = np.ones((1, 1), dtype=np.complex128)
    vals = synthesis(
        coeff, phi.samples, src.support_lo, kappa, target.J, target.support_lo, nu, target.n
    )
    return SampledFunction.adopt(GridND((target,)), vals[0])


# ------------------------------------------------------------------ serialization


def _format_header(grid: GridND) -> str:
    if all(a == grid.axes[0] for a in grid.axes):
        a = grid.axes[0]
        return f"{grid.J} {a.support_lo} {a.support_hi} {grid.d}"
    bounds = " ".join(f"{a.support_lo} {a.support_hi}" for a in grid.axes)
    return f"{grid.J} {bounds} {grid.d}"


def _parse_header(line: str, where: str) -> GridND:
    try:
        tok = [int(t) for t in line.split()]
    except ValueError:
        raise GridError(f"{where}: malformed header {line!r}") from None
    if len(tok) < 4:
        raise GridError(f"{where}: header needs 'J lo hi d'")
    J, d = tok[0], tok[-1]
    if d < 1:
        raise GridError(f"{where}: dimension must be >= 1")
    if len(tok) == 4:
        return GridND.cube(Grid1D(J, tok[1], tok[2]), d)
    if len(tok) == 2 + 2 * d:
        return GridND(tuple(Grid1D(J, tok[1 + 2 * j], tok[2 + 2 * j]) for j in range(d)))
    raise GridError(f"{where}: header has {len(tok)} fields")


def format_function(f: SampledFunction) -> str:
    lines = [_format_header(f.grid)]
    flat = f.samples.ravel()
    # tolist() gives Python floats, whose repr round-trips exactly
    for re, im in zip(flat.real.tolist(), flat.imag.tolist()):
        lines.append(f"{re!r} {im!r}")
    return "\n".join(lines) + "\n"


def parse_functions(text: str, count: int | None = None, source: str = "<string>") -> list:
    """Parse consecutive serialized blocks (header + samples)."""
    rows = [ln.strip() for ln in text.splitlines()]
    out, pos = [], 0
    while pos < len(rows):
        if not rows[pos] or rows[pos].startswith("#"):
            pos += 1
            continue
        grid = _parse_header(rows[pos], f"{source}:{pos + 1}")
        size = math.prod(grid.shape)
        body = rows[pos + 1 : pos + 1 + size]
        if len(body) < size:
            raise GridError(f"{source}: expected {size} samples, found {len(body)}")
        vals = np.empty(size, dtype=np.complex128)
        for i, row in enumerate(body):
            parts = row.split()
            try:
                re = float(parts[0])
                im = float(parts[1]) if len(parts) > 1 else 0.0
            except (ValueError, IndexError):
                raise GridError(f"{source}:{pos + 2 + i}: bad sample {row!r}") from None
            vals[i] = complex(re, im)
        out.append(SampledFunction(grid, vals.reshape(grid.shape)))
        pos += 1 + size
        if count is not None and len(out) == count:
            break
    if count is not None and len(out) != count:
        raise GridError(f"{source}: expected {count} function blocks, found {len(out)}")
    return out


def save_function(f: SampledFunction, path) -> None:
    Path(path).write_text(format_function(f))


def load_function(path) -> SampledFunction:
    return parse_functions(Path(path).read_text(), count=1, source=str(path))[0]


def save_functions(fs: Iterable[SampledFunction], path) -> None:
    Path(path).write_text("".join(format_function(f) for f in fs))
