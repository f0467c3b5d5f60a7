"""One-dimensional scaling systems (phi, dual phi) and their hypothesis checks.

Daubechies functions come from the cascade iteration on the refinement
filter. The iterate of depth ``i`` is piecewise constant on cells of length
``2**-i``, refines exactly into the iterate of depth ``i + 1`` and has
exactly orthonormal integer translates. A system of resolution ``J`` keeps,
for every scale ``kappa``, the iterate of depth ``cascade_iters - kappa``
laid out on the resolution-``J`` grid. Reading that table with the exact
stride lookup of :func:`lpwave.grid.dilate_translate` then gives a discrete
multiresolution ladder whose projectors are nested and idempotent up to
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import (
    J_ACC,
    Grid1D,
    GridError,
    GridND,
    SampledFunction,
    format_function,
    parse_functions,
)

DAUBECHIES_FILTERS = {
    1: (
        0.707106781186548, 0.707106781186548,
    ),
    2: (
        0.482962913144534, 0.836516303737808, 0.224143868042013,
        -0.12940952255126,
    ),
    3: (
        0.332670552950083, 0.806891509311093, 0.459877502118492,
        -0.135011020010255, -0.0854412738820267, 0.0352262918857095,
    ),
    4: (
        0.230377813308897, 0.714846570552916, 0.630880767929859,
        -0.0279837694168599, -0.187034811719093, 0.0308413818355608,
        0.0328830116668852, -0.010597401785069,
    ),
    5: (
        0.160102397974193, 0.60382926979719, 0.724308528437773,
        0.138428145901321, -0.242294887066382, -0.0322448695846384,
        0.0775714938400457, -0.00624149021279827, -0.012580751999082,
        0.00333572528547377,
    ),
    6: (
        0.111540743350109, 0.494623890398453, 0.751133908021095,
        0.315250351709198, -0.22626469396544, -0.129766867567262,
        0.097501605587323, 0.0275228655303057, -0.031582039317486,
        0.000553842201161496, 0.00477725751094551, -0.00107730108530848,
    ),
    7: (
        0.0778520540850092, 0.396539319481917, 0.729132090846235,
        0.469782287405193, -0.143906003928565, -0.224036184993875,
        0.0713092192668303, 0.0806126091510831, -0.0380299369350144,
        -0.0165745416306669, 0.0125509985560998, 0.000429577972921367,
        -0.00180164070404749, 0.00035371379997452,
    ),
    8: (
        0.054415842243104, 0.3128715909143, 0.67563073629729,
        0.585354683654207, -0.0158291052563493, -0.284015542961547,
        0.000472484573913283, 0.128747426620478, -0.0173693010018075,
        -0.0440882539307948, 0.0139810279173983, 0.00874609404740578,
        -0.00487035299345157, -0.000391740373376947, 0.000675449406450569,
        -0.00011747678412477,
    ),
    9: (
        0.0380779473638783, 0.24383467461259, 0.604823123690111,
        0.657288078051301, 0.133197385825008, -0.293273783279175,
        -0.0968407832229765, 0.148540749338106, 0.0307256814793334,
        -0.06763282906133, 0.000250947114831452, 0.0223616621236791,
        -0.0047232047577514, -0.00428150368246343, 0.00184764688305623,
        0.000230385763523196, -0.00025196318894271, 3.93473203162716e-05,
    ),
    10: (
        0.0266700579005556, 0.188176800077691, 0.527201188931726,
        0.688459039453604, 0.281172343660577, -0.249846424327315,
        -0.195946274377377, 0.127369340335793, 0.0930573646035723,
        -0.0713941471663971, -0.0294575368218758, 0.033212674059341,
        0.00360655356695617, -0.0107331754833306, 0.0013953517470529,
        0.00199240529518506, -0.000685856694959712, -0.000116466855129285,
        9.35886703200696e-05, -1.32642028945212e-05,
    ),
}
"""Orthonormal Daubechies lowpass filters, ``sum(h) = sqrt(2)``, by order N (2N taps)."""

FLAT_TOL = 1e-12


class UnsupportedOrderError(ValueError):
    pass


@dataclass(frozen=True)
class ConditionReport:
    """Numerical probe of the decay hypotheses on the truncation box.

    Every integral is taken over the box only, so finite values confirm
    consistency with the hypotheses rather than the hypotheses themselves.
    """

    majorant_ok: bool
    majorant_residual: float
    tail_moment_phi: float
    derivative_majorant_ok: bool
    tail_moment_dual_deriv: float
    dual_majorant_ok: bool
    dual_tail_ok: bool
    mu_log_moment: float
    decays_in_box: bool
    caveat: str = (
        "integrals truncated to the sampling box; finiteness is necessary, not sufficient"
    )

    @property
    def valid(self) -> bool:
        return (
            self.majorant_ok
            and self.derivative_majorant_ok
            and self.dual_majorant_ok
            and self.dual_tail_ok
            and self.decays_in_box
            and math.isfinite(self.tail_moment_phi)
            and math.isfinite(self.tail_moment_dual_deriv)
            and math.isfinite(self.mu_log_moment)
        )

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["valid"] = self.valid
        return out


def _trim(samples: np.ndarray, lo: int):
    nz = np.flatnonzero(samples)
    if nz.size == 0:
        return samples[:1].copy(), lo
    a, b = int(nz[0]), int(nz[-1]) + 1
    return np.ascontiguousarray(samples[a:b]), lo + a


@dataclass(frozen=True, eq=False)
class ScalingSystem:
    phi: SampledFunction
    phi_dual: SampledFunction
    orthonormal: bool
    condition_report: ConditionReport
    name: str = "custom"
    # per-scale (samples, lo) tables; empty means "stride-read phi itself"
    phi_levels: tuple = field(default=(), repr=False)
    dual_levels: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.phi.grid != self.phi_dual.grid:
            raise GridError("phi and its dual must share one grid")
        if self.phi.dim != 1:
            raise GridError("scaling functions are one-dimensional")

    @property
    def J(self) -> int:
        return self.phi.grid.J

    @property
    def grid(self) -> Grid1D:
        return self.phi.grid1d

    def table(self, kappa: int, dual: bool = False):
        """Trimmed ``(samples, lo)`` table read by the projector at scale ``kappa``.

        Tables with zero imaginary part come back as float64.
        """
        cache = self.__dict__.setdefault("_tables", {})
        key = (kappa, dual)
        if key not in cache:
            levels = self.dual_levels if dual else self.phi_levels
            if kappa < len(levels):
                samples, lo = levels[kappa]
            else:
                f = self.phi_dual if dual else self.phi
                samples, lo = _trim(f.samples, self.grid.support_lo)
            if not np.any(samples.imag):
                samples = np.ascontiguousarray(samples.real)
            cache[key] = (samples, lo)
        return cache[key]


def _cascade_cells(h: np.ndarray, depth: int) -> np.ndarray:
    """Cell values of the depth-``depth`` cascade iterate on ``[0, len(h) - 1)``."""
    span = len(h) - 1
    v = np.zeros(span, dtype=np.float64)
    v[0] = 1.0
    root2 = math.sqrt(2.0)
    for i in range(depth):
        step = 1 << i
        out = np.zeros(span << (i + 1), dtype=np.float64)
        for k, hk in enumerate(h):
            lo = k * step
            hi = min(lo + v.size, out.size)
            out[lo:hi] += (root2 * hk) * v[: hi - lo]
        v = out
    return v


def _scale_table(h: np.ndarray, J: int, depth: int, kappa: int) -> np.ndarray:
    """Depth-``depth`` iterate read at the centres of ``2**kappa``-cell blocks."""
    span = len(h) - 1
    cells = _cascade_cells(h, depth)
    n = np.arange(span << J, dtype=np.int64)
    block = (n >> kappa) << kappa
    # point (block + 2**(kappa-1)) * 2**-J in units of 2**-depth, kept integral
    idx = ((2 * block + (1 << kappa)) << depth) >> (J + 1)
    return cells[np.minimum(idx, cells.size - 1)]


def haar_system(J: int, box: Grid1D | None = None) -> ScalingSystem:
    """phi = dual phi = indicator of [0, 1) sampled on ``box`` (default [-1, 2))."""
    if box is None:
        box = Grid1D(J, -(1 << J), 2 << J)
    if box.J != J:
        raise GridError("box resolution differs from J")
    if box.support_lo > 0 or box.support_hi < (1 << J):
        raise GridError("Haar box must contain [0, 1)")
    vals = np.zeros(box.n, dtype=np.complex128)
    vals[-box.support_lo : -box.support_lo + (1 << J)] = 1.0
    phi = SampledFunction(GridND((box,)), vals)
    return ScalingSystem(phi, phi, True, validate_conditions_pair(phi, phi), name="haar")


def daubechies_system(N: int, J: int, cascade_iters: int | None = None) -> ScalingSystem:
    """Orthonormal Daubechies system of order ``N`` (support [0, 2N - 1])."""
    if N not in DAUBECHIES_FILTERS:
        raise UnsupportedOrderError(f"Daubechies order {N} not in table 1..10")
    depth = J if cascade_iters is None else int(cascade_iters)
    if depth < J:
        raise ValueError(f"cascade_iters={depth} must be >= J={J}")
    if N == 1:
        return haar_system(J)
    h = np.array(DAUBECHIES_FILTERS[N])
    span = 2 * N - 1
    levels = []
    for kappa in range(max(J - J_ACC, 0) + 1):
        levels.append(_trim(_scale_table(h, J, depth - kappa, kappa).astype(np.complex128), 0))
    levels = tuple(levels)
    # one zero unit on each side so the envelope visibly reaches zero in the box
    grid = Grid1D(J, -(1 << J), (span + 1) << J)
    vals = np.zeros(grid.n, dtype=np.complex128)
    base = levels[0]
    vals[base[1] + (1 << J) : base[1] + (1 << J) + base[0].size] = base[0]
    phi = SampledFunction(GridND((grid,)), vals)
    return ScalingSystem(
        phi,
        phi,
        True,
        validate_conditions_pair(phi, phi),
        name=f"db{N}",
        phi_levels=levels,
        dual_levels=levels,
    )


def system_from_functions(phi: SampledFunction, phi_dual: SampledFunction, name="file") -> ScalingSystem:
    """Accept a user-supplied pair; the dual is never computed here."""
    ortho = bool(np.array_equal(phi.samples, phi_dual.samples))
    return ScalingSystem(phi, phi_dual, ortho, validate_conditions_pair(phi, phi_dual), name=name)


def biorthogonality_defect(sys: ScalingSystem, shift_range: int) -> float:
    """max over |nu|, |mu| <= shift_range of |<phi(.-nu), dual(.-mu)> - delta|.

    Shifted copies are zero-extended (compact-support convention), so no
    shift can leave the box.
    """
    if shift_range < 1:
        raise ValueError("shift_range must be >= 1")
    a = sys.phi.samples
    b = sys.phi_dual.samples
    n, unit, h = a.size, 1 << sys.J, sys.grid.step
    worst = 0.0
    for lag in range(-2 * shift_range, 2 * shift_range + 1):
        # <phi, dual(. + lag)>: pair a[i] with b[i + lag * unit]
        off = lag * unit
        lo, hi = max(0, -off), min(n, n - off)
        val = complex(np.vdot(b[lo + off : hi + off], a[lo:hi]) * h) if hi > lo else 0j
        worst = max(worst, abs(val - (1.0 if lag == 0 else 0.0)))
    return worst


# ------------------------------------------------------------------ conditions


class _Envelope:
    """E(r) = max |f(y)| over samples with |y| >= r (radially non-increasing)."""

    def __init__(self, x: np.ndarray, mag: np.ndarray):
        order = np.argsort(np.abs(x), kind="stable")
        self.r = np.abs(x)[order]
        self.suffix = np.maximum.accumulate(mag[order][::-1])[::-1]

    def __call__(self, r):
        k = np.searchsorted(self.r, r, side="left")
        out = np.zeros(np.shape(r))
        inside = k < self.r.size
        out[inside] = self.suffix[k[inside]]
        return out


def _majorant_residual(x, mag, J):
    """Check |f(x_i)| <= avg over [x_i - 1/2, x_i + 1/2] of Phi, Phi(x) = E(|x| - 1/2)."""
    env = _Envelope(x, mag)
    h = 2.0**-J
    half = 1 << (J - 1) if J > 0 else 0
    xs = x[0] + h * np.arange(-half, x.size + half)
    Phi = env(np.maximum(np.abs(xs) - 0.5, 0.0))
    if J == 0:
        avg = Phi[: x.size]
    else:
        # trapezoid over 2**J + 1 midpoints spaced h; end weights 1/2
        c = np.concatenate(([0.0], np.cumsum(Phi)))
        w = 2 * half + 1
        s = c[w : w + x.size] - c[: x.size]
        avg = (s - 0.5 * Phi[: x.size] - 0.5 * Phi[w - 1 : w - 1 + x.size]) * h
    resid = float(np.max(mag - avg, initial=0.0))
    return max(resid, 0.0), env


def _tail_integrals(env: _Envelope, J: int, rmax: float):
    """Return (tau-weighted tail moment, integral of the tail over (1, inf), T on grid)."""
    h = 2.0**-J
    K = int(math.ceil((rmax + 1.0) / h)) + 1
    mids = (np.arange(K) + 0.5) * h
    Phi = env(np.maximum(mids - 0.5, 0.0))
    # T(r_k) = 2 * integral_{r_k}^inf Phi, r_k = k h
    T = np.zeros(K + 1)
    T[:K] = 2.0 * h * np.cumsum(Phi[::-1])[::-1]
    Tm = 0.5 * (T[:-1] + T[1:])
    moment = float(np.sum(mids * Tm) * h)
    beyond1 = mids > 1.0
    tail_l1 = float(np.sum(Tm[beyond1]) * h)
    return moment, tail_l1


def _log_moment(env: _Envelope, J: int, rmax: float) -> float:
    h = 2.0**-J
    K = int(math.ceil((rmax + 1.0) / h)) + 1
    mids = (np.arange(K) + 0.5) * h
    mu = env(np.maximum(mids - 0.5, 0.0))
    return float(np.sum(mu * np.log1p(mids)) * h)


def validate_conditions_pair(phi: SampledFunction, dual: SampledFunction) -> ConditionReport:
    grid = phi.grid1d
    J = grid.J
    x = grid.midpoints()
    rmax = float(np.max(np.abs(x)))
    mag = np.abs(phi.samples)
    dmag = np.abs(dual.samples)

    resid, env = _majorant_residual(x, mag, J)
    scale = max(1.0, float(mag.max(initial=0.0)))
    tail_phi, _ = _tail_integrals(env, J, rmax)

    padded = np.concatenate(([0.0], dual.samples, [0.0]))
    deriv = np.abs(padded[2:] - padded[:-2]) / (2.0 * grid.step)
    dresid, denv = _majorant_residual(x, deriv, J)
    tail_dd, _ = _tail_integrals(denv, J, rmax)

    tresid, tenv = _majorant_residual(x, dmag, J)
    _, dual_tail = _tail_integrals(tenv, J, rmax)

    mu_env = _Envelope(x, np.maximum(mag, dmag))
    mu_log = _log_moment(mu_env, J, rmax)

    def flat(v):
        top = float(np.max(np.abs(v), initial=0.0))
        return top == 0.0 or max(abs(v[0]), abs(v[-1])) <= FLAT_TOL * top

    decays = bool(flat(phi.samples) and flat(dual.samples))
    dscale = max(1.0, float(deriv.max(initial=0.0)))
    tscale = max(1.0, float(dmag.max(initial=0.0)))
    return ConditionReport(
        majorant_ok=bool(resid <= FLAT_TOL * scale),
        majorant_residual=resid,
        tail_moment_phi=tail_phi,
        derivative_majorant_ok=bool(dresid <= FLAT_TOL * dscale and math.isfinite(tail_dd)),
        tail_moment_dual_deriv=tail_dd,
        dual_majorant_ok=bool(tresid <= FLAT_TOL * tscale),
        dual_tail_ok=bool(math.isfinite(dual_tail) and decays),
        mu_log_moment=mu_log,
        decays_in_box=decays,
    )


def validate_conditions(sys: ScalingSystem) -> ConditionReport:
    """Recompute the condition report of ``sys`` (pure; no caching)."""
    return validate_conditions_pair(sys.phi, sys.phi_dual)


# ------------------------------------------------------------------ files & specs


def save_system(sys: ScalingSystem, path) -> None:
    Path(path).write_text(format_function(sys.phi) + format_function(sys.phi_dual))


def load_system(path) -> ScalingSystem:
    phi, dual = parse_functions(Path(path).read_text(), count=2, source=str(path))
    return system_from_functions(phi, dual, name=f"file:{path}")


def scaling_from_spec(spec: str, J: int) -> ScalingSystem:
    """Build a system from ``haar``, ``dbN`` or ``file:PATH``."""
    spec = spec.strip()
    if spec == "haar":
        return haar_system(J)
    if spec.startswith("db"):
        try:
            N = int(spec[2:])
        except ValueError:
            raise UnsupportedOrderError(f"bad Daubechies spec {spec!r}") from None
        return daubechies_system(N, J)
    if spec.startswith("file:"):
        sys = load_system(spec[5:])
        if sys.J != J:
            raise GridError(f"{spec}: resolution {sys.J} != {J}")
        return sys
    raise ValueError(f"unknown scaling spec {spec!r} (haar | dbN | file:PATH)")
