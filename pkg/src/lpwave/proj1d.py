"""Scale projectors on the line and their detail differences.

``project`` evaluates the quadrature form directly: coefficients
``c_nu = 2**kappa * <f, dual(2**kappa . - nu)>`` against the translates
``phi(2**kappa . - nu)``. No filter-bank shortcut is taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import (
    J_ACC,
    Grid1D,
    GridError,
    GridND,
    ResolutionError,
    SampledFunction,
    check_scale,
)
from .scaling import ScalingSystem


@dataclass(frozen=True)
class ProjectorContext:
    sys: ScalingSystem
    box: Grid1D

    def __post_init__(self):
        if self.sys.J != self.box.J:
            raise GridError("scaling system and box resolutions differ")
        if self.kappa_max < 0:
            raise ResolutionError(f"J={self.box.J} leaves no admissible scale (need J >= {J_ACC})")

    @property
    def kappa_max(self) -> int:
        return self.box.J - J_ACC

    def nu_range(self, kappa: int, dual: bool = True):
        """First nu and count of translates whose table support meets the box."""
        table, lo = self.sys.table(kappa, dual=dual)
        J, s = self.box.J, 1 << kappa
        T = table.size
        first = -(-(s * self.box.support_lo - lo - T + 1) // (1 << J))
        last = (s * (self.box.support_hi - 1) - lo) // (1 << J)
        return first, max(last - first + 1, 0)

    # array-level operators on C-contiguous (lines, n) blocks --------------
    # Blocks may be float64 or complex128; complex data over real tables are
    # split into real and imaginary lines so the kernels stay real.

    def _run(self, lines: np.ndarray, fn) -> np.ndarray:
        real_tables = not (
            np.iscomplexobj(self.sys.table(0)[0]) or np.iscomplexobj(self.sys.table(0, dual=True)[0])
        )
        if not real_tables:
            return fn(np.ascontiguousarray(lines, dtype=np.complex128))
        if not np.iscomplexobj(lines):
            return fn(np.ascontiguousarray(lines))
        if not np.any(lines.imag):
            # real data stay real (float64) from here on
            return fn(np.ascontiguousarray(lines.real))
        L = lines.shape[0]
        both = fn(np.ascontiguousarray(np.concatenate([lines.real, lines.imag])))
        return both[:L] + 1j * both[L:]

    def _coeffs(self, lines, kappa):
        check_scale(kappa, self.box.J)
        table, lo = self.sys.table(kappa, dual=True)
        nu_lo, n_nu = self.nu_range(kappa, dual=True)
        raw = kernels.analysis(lines, table, lo, kappa, self.box.J, self.box.support_lo, nu_lo, n_nu)
        # 2**kappa * cell length is a power of two: exact scaling
        return nu_lo, raw * 2.0 ** (kappa - self.box.J)

    def _project(self, lines, kappa):
        nu_lo, c = self._coeffs(lines, kappa)
        table, lo = self.sys.table(kappa, dual=False)
        return kernels.synthesis(
            np.ascontiguousarray(c, dtype=lines.dtype), table, lo, kappa, self.box.J,
            self.box.support_lo, nu_lo, self.box.n,
        )

    def coefficient_lines(self, lines: np.ndarray, kappa: int):
        check_scale(kappa, self.box.J)
        out = {}

        def fn(block):
            nu_lo, c = self._coeffs(block, kappa)
            out["nu_lo"] = nu_lo
            return c

        c = self._run(lines, fn)
        return out["nu_lo"], c

    def project_lines(self, lines: np.ndarray, kappa: int) -> np.ndarray:
        check_scale(kappa, self.box.J)
        return self._run(lines, lambda block: self._project(block, kappa))

    def detail_lines(self, lines: np.ndarray, kappa: int) -> np.ndarray:
        if kappa == 0:
            return self.project_lines(lines, 0)
        return self.project_lines(lines, kappa) - self.project_lines(lines, kappa - 1)

    def detail_ladder(self, lines: np.ndarray, kmax: int) -> list:
        """Details 0..kmax from one projection per scale."""
        check_scale(kmax, self.box.J)
        proj = [self.project_lines(lines, k) for k in range(kmax + 1)]
        return [proj[0]] + [proj[k] - proj[k - 1] for k in range(1, kmax + 1)]


def _lines(ctx: ProjectorContext, f: SampledFunction) -> np.ndarray:
    if f.grid != GridND((ctx.box,)):
        raise GridError("function grid differs from the projector box")
    return f.samples.reshape(1, -1)


def coefficients(ctx: ProjectorContext, f: SampledFunction, kappa: int) -> dict:
    """Map nu -> c_nu for every translate meeting the box."""
    nu_lo, c = ctx.coefficient_lines(_lines(ctx, f), kappa)
    return {nu_lo + k: complex(v) for k, v in enumerate(c[0])}


def project(ctx: ProjectorContext, f: SampledFunction, kappa: int) -> SampledFunction:
    out = ctx.project_lines(_lines(ctx, f), kappa)
    return SampledFunction.adopt(f.grid, out[0].astype(np.complex128))


def detail(ctx: ProjectorContext, f: SampledFunction, kappa: int) -> SampledFunction:
    """E_kappa f - E_(kappa-1) f, with E_(-1) = 0."""
    out = ctx.detail_lines(_lines(ctx, f), kappa)
    return SampledFunction.adopt(f.grid, out[0].astype(np.complex128))
