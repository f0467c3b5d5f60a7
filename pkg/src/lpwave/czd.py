"""Dyadic Calderon-Zygmund decomposition of a sampled function on the line."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid1D, GridND, SampledFunction, embed, load_function, lp_norm, restrict, save_function

REL_TOL = 1e-12


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """Q_{kappa, nu} = 2**-kappa * (nu + [0, 1)); kappa may be negative."""

    kappa: int
    nu: int

    @property
    def length(self) -> float:
        return 2.0**-self.kappa

    @property
    def left(self) -> float:
        return self.nu * self.length

    def cells(self, J: int) -> tuple:
        """Absolute cell range ``[a, b)`` at resolution ``J`` (needs kappa <= J)."""
        w = 1 << (J - self.kappa)
        return self.nu * w, (self.nu + 1) * w

    def grid(self, J: int) -> Grid1D:
        return Grid1D(J, *self.cells(J))

    def intersects(self, other: "DyadicInterval") -> bool:
        J = max(self.kappa, other.kappa)
        a0, a1 = self.cells(J)
        b0, b1 = other.cells(J)
        return a0 < b1 and b0 < a1


@dataclass(frozen=True, eq=False)
class CZDecomposition:
    alpha: float
    selected: tuple
    good: SampledFunction
    bad_parts: tuple


class _Sums:
    """Prefix sums over absolute cell ranges, zero outside the box."""

    def __init__(self, values: np.ndarray, lo: int):
        self.lo = lo
        self.n = values.size
        self.c = np.concatenate(([0], np.cumsum(values)))

    def __call__(self, a, b):
        a = np.clip(np.asarray(a) - self.lo, 0, self.n)
        b = np.clip(np.asarray(b) - self.lo, 0, self.n)
        return self.c[b] - self.c[a]


def cz_decompose(f: SampledFunction, alpha: float) -> CZDecomposition:
    """Stopping-time selection of the maximal dyadic intervals with mean |f| > alpha."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    grid = f.grid1d
    J, lo, hi = grid.J, grid.support_lo, grid.support_hi
    mag = np.abs(f.samples)
    mass = _Sums(mag, lo)
    hot = _Sums((mag > alpha).astype(np.int64), lo)

    def mean(kappa, nu):
        w = 1 << (J - kappa)
        return mass(nu * w, (nu + 1) * w) / w

    def roots(kappa):
        w = 1 << (J - kappa)
        return np.arange(lo // w, (hi - 1) // w + 1, dtype=np.int64)

    # coarsen until every root interval meeting the box has mean <= alpha;
    # then every ancestor of a root has mean <= alpha as well
    kappa0 = J
    while np.max(mean(kappa0, roots(kappa0))) > alpha:
        kappa0 -= 1

    selected = []
    stack = [(kappa0, int(nu)) for nu in roots(kappa0)[::-1]]
    while stack:
        kappa, nu = stack.pop()
        if mean(kappa, nu) > alpha:
            selected.append(DyadicInterval(kappa, nu))
            continue
        w = 1 << (J - kappa)
        if kappa < J and hot(nu * w, (nu + 1) * w) > 0:
            stack.append((kappa + 1, 2 * nu + 1))
            stack.append((kappa + 1, 2 * nu))
    selected.sort(key=lambda q: (q.cells(J)[0], q.kappa))

    hull = grid
    for q in selected:
        hull = hull.hull(q.grid(J))
    big = embed(f, hull)
    good = np.array(big.samples)
    bad = []
    for q in selected:
        a, b = q.cells(J)
        sl = slice(a - hull.support_lo, b - hull.support_lo)
        piece = big.samples[sl]
        avg = piece.sum() / piece.size
        good[sl] = avg
        bad.append(SampledFunction.adopt(GridND((q.grid(J),)), piece - avg))
    return CZDecomposition(
        float(alpha), tuple(selected), SampledFunction.adopt(GridND((hull,)), good), tuple(bad)
    )


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    slack: float


@dataclass(frozen=True)
class CZReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {c.name: {"passed": c.passed, "slack": c.slack} for c in self.checks}


def verify_cz(dec: CZDecomposition, f: SampledFunction) -> CZReport:
    """Measure every decomposition property; never raises on failure."""
    grid = f.grid1d
    J, alpha = grid.J, dec.alpha
    tol = REL_TOL * alpha
    mag = np.abs(f.samples)
    covered = np.zeros(mag.size, dtype=bool)
    for q in dec.selected:
        a, b = q.cells(J)
        covered[max(a - grid.support_lo, 0) : max(b - grid.support_lo, 0)] = True
    checks = []

    off = float(np.max(mag[~covered], initial=0.0))
    checks.append(Check("bounded_off_selection", off <= alpha, alpha - off))

    l1 = lp_norm(f, 1)
    total = sum(q.length for q in dec.selected)
    checks.append(Check("measure_bound", total <= l1 / alpha * (1 + REL_TOL), l1 / alpha - total))

    slack = np.inf
    ok = True
    for q in dec.selected:
        avg = float(np.sum(np.abs(restrict(f, q.grid(J)).samples))) / (1 << (J - q.kappa))
        ok &= alpha - tol < avg <= 2 * alpha + tol
        slack = min(slack, avg - alpha, 2 * alpha - avg)
    checks.append(Check("stopping_bounds", bool(ok), float(slack if dec.selected else alpha)))

    worst = 0.0
    ok = True
    for h in dec.bad_parts:
        integral = abs(complex(np.sum(h.samples))) * h.grid1d.step
        scale = max(1.0, float(np.sum(np.abs(h.samples))) * h.grid1d.step)
        ok &= integral <= REL_TOL * scale
        worst = max(worst, integral)
    checks.append(Check("bad_parts_mean_zero", bool(ok), -worst))

    gmax = float(np.max(np.abs(dec.good.samples), initial=0.0))
    checks.append(Check("good_part_bound", gmax <= 2 * alpha + tol, 2 * alpha - gmax))

    disjoint = all(
        not p.intersects(q) for i, p in enumerate(dec.selected) for q in dec.selected[i + 1 :]
    )
    checks.append(Check("disjoint", disjoint, 0.0))

    hull = dec.good.grid1d
    recon = np.array(dec.good.samples)
    for h in dec.bad_parts:
        g = h.grid1d
        a = g.support_lo - hull.support_lo
        recon[a : a + g.n] += h.samples
    err = float(np.max(np.abs(recon - embed(f, hull).samples), initial=0.0))
    scale = max(1.0, float(mag.max(initial=0.0)))
    checks.append(Check("reconstruction", err <= REL_TOL * scale, -err))
    return CZReport(tuple(checks))


# ------------------------------------------------------------------ JSON


def save_decomposition(dec: CZDecomposition, path) -> None:
    """Write ``path`` (JSON) plus sibling ``.fn`` files for g and every h_r."""
    path = Path(path)
    stem = path.with_suffix("")
    good_name = f"{stem.name}_good.fn"
    save_function(dec.good, path.parent / good_name)
    bad_names = []
    for r, h in enumerate(dec.bad_parts, 1):
        name = f"{stem.name}_h{r:04d}.fn"
        save_function(h, path.parent / name)
        bad_names.append(name)
    doc = {
        "alpha": dec.alpha,
        "resolution": dec.good.grid.J,
        "selected": [[q.kappa, q.nu] for q in dec.selected],
        "good": good_name,
        "bad_parts": bad_names,
    }
    path.write_text(json.dumps(doc, indent=1) + "\n")


def load_decomposition(path) -> CZDecomposition:
    path = Path(path)
    doc = json.loads(path.read_text())
    return CZDecomposition(
        float(doc["alpha"]),
        tuple(DyadicInterval(int(k), int(n)) for k, n in doc["selected"]),
        load_function(path.parent / doc["good"]),
        tuple(load_function(path.parent / name) for name in doc["bad_parts"]),
    )
