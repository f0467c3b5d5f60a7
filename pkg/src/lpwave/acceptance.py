"""The acceptance battery: ten property checks with fixed tolerances and time budgets.

Each ``criterion_N`` returns a :class:`CriterionResult`. A criterion passes
when its property holds and its timed section finishes within budget.
``run_all`` runs them in order; the CLI ``suite`` command and the test
suite both go through it.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import KINDS, interior_box, make
from .czd import DyadicInterval, cz_decompose, verify_cz
from .grid import Grid1D, GridND, SampledFunction, inner_product, lp_norm
from .lpverify import (
    XorShift64Star,
    khintchine_check,
    lp_ratios,
    rademacher,
    sign_sweep,
    summarize_trials,
    weak11_check,
    weak11_sup,
)
from .proj1d import ProjectorContext
from .scaling import daubechies_system, haar_system
from .tensor import (
    SignPattern,
    TensorContext,
    detail_nd,
    iter_detail_arrays,
    partial_sum,
    project_nd,
)

P_SET = (1.25, 1.5, 2.0, 3.0, 4.0)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    measured: dict = field(default_factory=dict)
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.note})" if self.note else ""
        return f"[{status}] {self.number:2d}. {self.name}: {self.seconds:.2f}s / {self.budget:.0f}s{extra}"


def _system(name: str, J: int):
    return haar_system(J) if name == "haar" else daubechies_system(int(name[2:]), J)


def _ctx(name: str, J: int, d: int, scales=(0,)) -> TensorContext:
    sy = _system(name, J)
    box = Grid1D.from_interval(J, 0, 1) if name == "haar" else interior_box(sy, J, scales=scales)
    return TensorContext.build([sy] * d, [box] * d)


def _noise(grid: GridND, rng) -> SampledFunction:
    """Gaussian noise on the unit cube part of ``grid``."""
    vals = rng.standard_normal(grid.shape)
    for j, x in enumerate(grid.midpoints()):
        vals = vals * ((x >= 0) & (x < 1))
    return SampledFunction.adopt(grid, vals.astype(np.complex128))


# ---------------------------------------------------------------- 1


def criterion_1(seeds: int = 3) -> CriterionResult:
    """p = 2 ratio of band-limited interior functions equals one."""
    configs = [("haar", 1, 10, 6), ("db4", 1, 10, 6), ("haar", 2, 10, 6), ("db4", 2, 7, 3)]
    ratios, timed, ok = {}, 0.0, True
    for name, d, J, k in configs:
        t0 = time.perf_counter()
        ctx = _ctx(name, J, d, scales=(k - 2, 0))
        vals = []
        for s in range(seeds if (name, d) != ("db4", 2) else 2):
            f = make("bandlimited", ctx.grid, seed=100 + s, scale=k - 2, ctx=ctx)
            vals.append(lp_ratios(ctx, f, [2.0], (k,) * d)[0].ratio)
        if (name, d, J, k) == ("haar", 2, 10, 6):
            timed = time.perf_counter() - t0
        ratios[f"{name}-d{d}-J{J}"] = vals
        ok &= all(0.999 <= r <= 1.001 for r in vals)
    worst = max(abs(r - 1) for v in ratios.values() for r in v)
    return CriterionResult(
        1, "Parseval ratio at p=2", ok and timed <= 30, timed, 30,
        {"ratios": ratios, "max_abs_dev": worst},
        f"max |ratio-1| = {worst:.2e}; timing is the haar J=10 d=2 k_cap=(6,6) run",
    )


# ---------------------------------------------------------------- 2


def _algebra(ctx: TensorContext, f, g, kappas) -> dict:
    E = lambda h, k: project_nd(ctx, h, k)  # noqa: E731
    D = lambda h, k: detail_nd(ctx, h, k)  # noqa: E731
    dev = {"idempotency": 0.0, "nesting": 0.0, "annihilation": 0.0, "self_adjoint": 0.0}
    proj = {k: E(f, k) for k in kappas}
    det = {k: D(f, k) for k in kappas}
    for k in kappas:
        dev["idempotency"] = max(dev["idempotency"], E(proj[k], k).sup_distance(proj[k]))
        sa = abs(inner_product(proj[k], g) - inner_product(f, E(g, k)))
        sa_d = abs(inner_product(det[k], g) - inner_product(f, D(g, k)))
        dev["self_adjoint"] = max(dev["self_adjoint"], sa, sa_d)
        for k2 in kappas:
            lo = tuple(min(a, b) for a, b in zip(k, k2))
            dev["nesting"] = max(dev["nesting"], E(proj[k2], k).sup_distance(E(f, lo)))
            target = det[k] if k == k2 else SampledFunction.zeros(f.grid)
            dev["annihilation"] = max(dev["annihilation"], D(det[k2], k).sup_distance(target))
    return dev


def criterion_2() -> CriterionResult:
    """Idempotency, nesting, detail annihilation, self-adjointness on 50 functions."""
    t0 = time.perf_counter()
    plan = [
        ("db4", 1, 8, 15, [(0,), (1,), (2,), (4,)]),
        ("haar", 1, 8, 10, [(0,), (1,), (3,), (4,)]),
        ("haar", 2, 6, 15, [(0, 0), (1, 2), (2, 1), (2, 2)]),
        ("db2", 2, 6, 10, [(0, 0), (1, 2), (2, 2)]),
    ]
    rng = np.random.default_rng(2024)
    dev = {"idempotency": 0.0, "nesting": 0.0, "annihilation": 0.0, "self_adjoint": 0.0}
    count = 0
    for name, d, J, n, kappas in plan:
        ctx = _ctx(name, J, d, scales=(0, 0))
        for i in range(n):
            kind = KINDS[i % len(KINDS)]
            f = make(kind, ctx.grid, seed=int(rng.integers(1 << 31)), scale=2, ctx=ctx)
            g = _noise(ctx.grid, rng)
            for key, v in _algebra(ctx, f, g, kappas).items():
                dev[key] = max(dev[key], v)
            count += 1
    secs = time.perf_counter() - t0
    ok = all(v <= 1e-8 for v in dev.values())
    return CriterionResult(
        2, "projector algebra", ok and secs <= 60, secs, 60, {"functions": count, **dev},
        ", ".join(f"{k} {v:.1e}" for k, v in dev.items()),
    )


# ---------------------------------------------------------------- 3


def criterion_3() -> CriterionResult:
    """Partial sums of details telescope to E_k f for every k <= k_cap."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    # d = 1: every partial_sum compared directly
    for name in ("haar", "db4"):
        ctx = _ctx(name, 10, 1)
        f = _noise(ctx.grid, rng)
        for k in range(7):
            worst = max(worst, partial_sum(ctx, f, (k,)).sup_distance(project_nd(ctx, f, (k,))))
    # d = 2: running sums over the lexicographic detail stream give all 49 partial sums
    ctx = _ctx("haar", 10, 2)
    f = _noise(ctx.grid, rng)
    rows = {}
    for (k1, k2), det in iter_detail_arrays(ctx, f, (6, 6)):
        rows[(k1, k2)] = det if k2 == 0 else rows[(k1, k2 - 1)] + det
    cum = {}
    for k1 in range(7):
        for k2 in range(7):
            cum[(k1, k2)] = rows[(k1, k2)] if k1 == 0 else cum[(k1 - 1, k2)] + rows[(k1, k2)]
        for k2 in range(7):
            rows.pop((k1, k2))
    for k, arr in cum.items():
        worst = max(worst, float(np.max(np.abs(arr - project_nd(ctx, f, k).samples))))
    full = partial_sum(ctx, f, (6, 6))
    worst = max(worst, full.sup_distance(project_nd(ctx, f, (6, 6))))
    secs = time.perf_counter() - t0
    return CriterionResult(
        3, "telescoping", worst <= 1e-12 and secs <= 10, secs, 10, {"max_dev": worst}, f"max dev {worst:.1e}"
    )


# ---------------------------------------------------------------- 4


def criterion_4() -> CriterionResult:
    """Factored and inclusion-exclusion detail_nd agree on Z_+^2((3,3))."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    for i in range(20):
        name = ("db4", "db2")[i % 2]
        sy = _system(name, 7)
        box = Grid1D.from_interval(7, 0, 1)
        ctx = TensorContext.build([sy, sy], [box, box])
        f = SampledFunction.adopt(ctx.grid, rng.standard_normal(ctx.grid.shape) + 0j)
        for k1 in range(4):
            for k2 in range(4):
                a = detail_nd(ctx, f, (k1, k2))
                b = detail_nd(ctx, f, (k1, k2), inclusion_exclusion=True)
                worst = max(worst, a.sup_distance(b))
    secs = time.perf_counter() - t0
    return CriterionResult(
        4, "factored vs inclusion-exclusion", worst <= 1e-10 and secs <= 20, secs, 20,
        {"max_dev": worst}, f"max dev {worst:.1e}",
    )


# ---------------------------------------------------------------- 5


def criterion_5() -> CriterionResult:
    """All corpus ratios in [0.05, 20]; per-(system, d, p) spread <= 25."""
    t0 = time.perf_counter()
    configs = [("haar", 1, 10, 6), ("db4", 1, 10, 6), ("haar", 2, 8, 4), ("db4", 2, 7, 3)]
    ps = (1.25, 1.5, 3.0, 4.0)
    table, ok = {}, True
    for name, d, J, k in configs:
        ctx = _ctx(name, J, d, scales=(k - 2, 0))
        per_p = {p: [] for p in ps}
        for kind in KINDS:
            f = make(kind, ctx.grid, seed=5, scale=k - 2, ctx=ctx)
            for rec in lp_ratios(ctx, f, ps, (k,) * d, f_id=kind):
                per_p[rec.p].append(rec.ratio)
        for p, vals in per_p.items():
            c2, c3 = min(vals), max(vals)
            table[f"{name}-d{d}-p{p}"] = {"c2": c2, "c3": c3, "spread": c3 / c2}
            ok &= c2 >= 0.05 and c3 <= 20 and c3 / c2 <= 25
    secs = time.perf_counter() - t0
    spread = max(v["spread"] for v in table.values())
    lo = min(v["c2"] for v in table.values())
    hi = max(v["c3"] for v in table.values())
    return CriterionResult(
        5, "Littlewood-Paley stability bracket", ok and secs <= 120, secs, 120, table,
        f"ratios in [{lo:.3f}, {hi:.3f}], max spread {spread:.3f}",
    )


# ---------------------------------------------------------------- 6


def criterion_6(trials: int = 200) -> CriterionResult:
    """Tensor sign sums: p = 2 ratio is one, p != 2 max/median <= 10."""
    t0 = time.perf_counter()
    configs = [("haar", 1, 10, 6), ("db4", 1, 10, 6), ("haar", 2, 8, 4)]
    p2_dev, worst_spread, ok = 0.0, 0.0, True
    summary = {}
    for name, d, J, k in configs:
        ctx = _ctx(name, J, d, scales=(k - 2, 0))
        for kind in ("bandlimited", "step", "bump", "spike"):
            f = make(kind, ctx.grid, seed=9, scale=k - 2, ctx=ctx)
            for p in (1.25, 2.0, 4.0):
                if p == 2.0 and kind != "bandlimited":
                    continue  # ratio one needs f inside V_{k_cap}
                recs = sign_sweep(ctx, f, p, (k,) * d, trials, seed=31)
                s = summarize_trials(recs)
                summary[f"{name}-d{d}-{kind}-p{p}"] = s
                if p == 2.0:
                    p2_dev = max(p2_dev, max(abs(r.ratio - 1) for r in recs))
                else:
                    worst_spread = max(worst_spread, s["max_over_median"])
    ok = p2_dev <= 1e-6 and worst_spread <= 10
    secs = time.perf_counter() - t0
    return CriterionResult(
        6, "sign-sum invariance and boundedness", ok and secs <= 120, secs, 120,
        {"p2_max_dev": p2_dev, "max_over_median": worst_spread, "runs": summary},
        f"p=2 dev {p2_dev:.1e}, worst max/median {worst_spread:.3f}",
    )


# ---------------------------------------------------------------- 7


def _random_piecewise(rng, J=8) -> SampledFunction:
    grid = Grid1D.from_interval(J, -2, 2)
    kappa = int(rng.integers(0, 7))
    cells = 4 << kappa
    amp = np.exp(rng.uniform(-4, 4, cells)) * rng.choice([-1.0, 1.0], cells)
    amp[rng.random(cells) < 0.6] = 0.0
    vals = np.repeat(amp, grid.n // cells)
    return SampledFunction.adopt(GridND((grid,)), vals.astype(np.complex128))


def criterion_7() -> CriterionResult:
    """verify_cz on random piecewise-constant data and the chi_[0,1) golden."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    failures = []
    for i in range(100):
        f = _random_piecewise(rng)
        for alpha in (1e-2, 1e-1, 1.0, 1e1, 1e2):
            rep = verify_cz(cz_decompose(f, alpha), f)
            if not rep.passed:
                failures.append((i, alpha, [c.name for c in rep.checks if not c.passed]))
    g = SampledFunction.from_callable(Grid1D.from_interval(8, -2, 2), lambda x: ((x >= 0) & (x < 1)) * 1.0)
    golden = list(cz_decompose(g, 0.25).selected)
    golden_ok = golden == [DyadicInterval(-1, 0)]
    secs = time.perf_counter() - t0
    ok = not failures and golden_ok
    return CriterionResult(
        7, "CZ suite", ok and secs <= 10, secs, 10,
        {"failures": failures, "golden": [(q.kappa, q.nu) for q in golden]},
        f"{500 - len(failures)}/500 decompositions verified, golden {'ok' if golden_ok else 'WRONG'}",
    )


# ---------------------------------------------------------------- 8


def khintchine_oracle(a, p) -> float:
    """Direct enumeration: Rademacher functions evaluated at each atom midpoint."""
    n = len(a)
    acc = 0.0
    for i in range(1 << n):
        t = (i + 0.5) / (1 << n)
        s = 0.0
        for k in range(n):
            s = s + float(a[k]) * rademacher(k, t)
        acc = acc + abs(s) ** p
    return acc / (1 << n)


def criterion_8(vectors: int = 40) -> CriterionResult:
    """Exhaustive Khintchine moments against the enumeration oracle."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    p2_dev, mismatches, bracket_fail = 0.0, 0, 0
    for i in range(vectors):
        a = rng.standard_normal(1 + i % 10) * np.exp(rng.uniform(-2, 2))
        for p in (1.25, 2.0, 4.0):
            res = khintchine_check(a, p)
            mismatches += res.moment != khintchine_oracle(a, p)
            bracket_fail += not (res.lower_ratio <= 1 + 1e-12 and res.upper_ratio >= 1 - 1e-12)
            if p == 2.0:
                p2_dev = max(p2_dev, abs(res.ratio - 1))
    secs = time.perf_counter() - t0
    ok = p2_dev <= 1e-12 and mismatches == 0 and bracket_fail == 0
    return CriterionResult(
        8, "Khintchine", ok and secs <= 5, secs, 5,
        {"p2_dev": p2_dev, "moment_mismatches": mismatches, "bracket_failures": bracket_fail},
        f"p=2 dev {p2_dev:.1e}, {mismatches} moment mismatches, {bracket_fail} bracket failures",
    )


# ---------------------------------------------------------------- 9


def weak11_family(name: str, signs, J: int = 12, k_cap: int = 8, m_max: int = 8) -> list:
    sy = _system(name, J)
    box = Grid1D.from_interval(J, 0, 1) if name == "haar" else interior_box(sy, J)
    ctx = ProjectorContext(sy, box)
    out = []
    for m in range(m_max + 1):
        f = SampledFunction.from_callable(box, lambda x: np.where((x >= 0) & (x < 2.0**-m), 2.0**m, 0.0))
        exact = weak11_sup(ctx, f, signs, k_cap)
        grid_max = max(v for _, v in weak11_check(ctx, f, signs, k_cap, [2.0**e for e in range(-4, 9)]))
        out.append((m, exact, grid_max))
    return out


def criterion_9() -> CriterionResult:
    """Spike family weak-(1,1) constant stays within a factor 2 across m."""
    t0 = time.perf_counter()
    rng = XorShift64Star(17)
    patterns = {
        "ones": (1,) * 9,
        "alternating": tuple((-1) ** i for i in range(9)),
        "random": tuple(rng.sign() for _ in range(9)),
    }
    runs, ok = {}, True
    for name in ("haar", "db4"):
        for label, signs in patterns.items():
            fam = weak11_family(name, signs)
            sups = [e for _, e, _ in fam]
            spread = max(sups) / min(sups)
            consistent = all(g <= e * (1 + 1e-12) for _, e, g in fam)
            runs[f"{name}-{label}"] = {"sup_by_m": sups, "spread": spread}
            ok &= math.isfinite(max(sups)) and spread <= 2 and consistent
    secs = time.perf_counter() - t0
    worst = max(runs, key=lambda k: runs[k]["spread"])
    return CriterionResult(
        9, "weak-(1,1) spike family", ok and secs <= 30, secs, 30, runs,
        f"worst spread {runs[worst]['spread']:.3f} ({worst})",
    )


# ---------------------------------------------------------------- 10


def _decay_curves(ctx, f, k) -> dict:
    """For each p, the relative errors ||f - E_j f||_p / ||f||_p over Z_+^d(k)."""
    vol = f.grid.cell_volume

    def norms(samples):
        a2 = samples.real**2 + samples.imag**2
        out = {}
        for p in P_SET:
            if p == 2.0:
                s = a2
            elif p == 4.0:
                s = a2 * a2
            elif p == 3.0:
                s = a2 * np.sqrt(a2)
            else:
                s = a2 ** (p / 2)
            out[p] = float(np.sum(s) * vol) ** (1.0 / p)
        return out

    nf = norms(f.samples)
    out = {p: {} for p in P_SET}
    for j in itertools.product(range(k + 1), repeat=ctx.d):
        ne = norms(f.samples - project_nd(ctx, f, j).samples)
        for p in P_SET:
            out[p][j] = ne[p] / nf[p]
    return out


def _max_rise(errs: dict) -> float:
    """Largest increase of the error when one component of k grows by one."""
    rise = 0.0
    for j, e in errs.items():
        for axis in range(len(j)):
            nxt = j[:axis] + (j[axis] + 1,) + j[axis + 1 :]
            if nxt in errs:
                rise = max(rise, errs[nxt] - e)
    return rise


def criterion_10() -> CriterionResult:
    """Reconstruction error decays monotonically on smooth scale-limited data
    and is tiny at k_cap for band-limited data."""
    t0 = time.perf_counter()
    configs = [("haar", 1, 10, 6), ("db4", 1, 10, 6), ("haar", 2, 9, 5), ("db4", 2, 7, 3)]
    worst_end, worst_rise, noise_rise, ok = 0.0, 0.0, 0.0, True
    curves = {}
    for name, d, J, k in configs:
        ctx = _ctx(name, J, d, scales=(k - 2, 0))
        smooth = project_nd(ctx, make("bump", ctx.grid), (k - 2,) * d)
        noise = make("bandlimited", ctx.grid, seed=41, scale=k - 2, ctx=ctx)
        for label, f in (("smooth", smooth), ("bandlimited", noise)):
            for p, errs in _decay_curves(ctx, f, k).items():
                end = errs[(k,) * d]
                rise = _max_rise(errs)
                curves[f"{name}-d{d}-{label}-p{p}"] = [errs[(j,) * d] for j in range(k + 1)]
                worst_end = max(worst_end, end)
                ok &= end <= 1e-3
                if label == "smooth":
                    # rounding slack: errors at or above the band limit are ~1e-16
                    worst_rise = max(worst_rise, rise)
                    ok &= rise <= 1e-12
                else:
                    noise_rise = max(noise_rise, rise)
    secs = time.perf_counter() - t0
    return CriterionResult(
        10, "reconstruction decay", ok and secs <= 30, secs, 30,
        {"curves": curves, "max_rel_error_at_cap": worst_end, "max_rise_smooth": worst_rise,
         "max_rise_noise": noise_rise},
        f"max error at k_cap {worst_end:.1e}, max rise {worst_rise:.1e} (noise, not asserted: {noise_rise:.1e})",
    )


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_all(only=None, echo=None) -> list:
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
