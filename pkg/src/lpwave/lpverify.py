"""Measurements behind the Littlewood-Paley equivalence.

Square function, L_p ratios, tensor sign sums, Rademacher moments and the
weak-(1,1) level-set check. The theoretical constants are existential, so
everything here *measures*; pass/fail decisions live in the callers.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .grid import SampledFunction, lattice_box, lp_norm
from .proj1d import ProjectorContext
from .tensor import FreeSigns, SignPattern, TensorContext, iter_detail_arrays

MASK64 = (1 << 64) - 1


class XorShift64Star:
    """Marsaglia xorshift with Vigna's multiplicative scrambler.

    State recurrence ``x ^= x >> 12; x ^= x << 25; x ^= x >> 27`` (mod 2**64),
    output ``x * 0x2545F4914F6CDD1D`` (mod 2**64). The seed is mixed with the
    golden-ratio constant so that seed 0 is valid.
    """

    MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.state = (self.seed ^ 0x9E3779B97F4A7C15) & MASK64 or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULT) & MASK64

    def sign(self) -> int:
        return 1 if self.next_u64() >> 63 else -1

    def below(self, n: int) -> int:
        return self.next_u64() % n


# ------------------------------------------------------------------ square function


def _as_tensor(ctx) -> TensorContext:
    return TensorContext((ctx,)) if isinstance(ctx, ProjectorContext) else ctx


def square_function(ctx, f: SampledFunction, k_cap) -> SampledFunction:
    """Pointwise sqrt of the sum of |detail_nd(f, kappa)|**2 over Z_+^d(k_cap)."""
    ctx = _as_tensor(ctx)
    acc = np.zeros(f.grid.shape)
    for _, det in iter_detail_arrays(ctx, f, k_cap):
        acc += det.real**2 + det.imag**2 if np.iscomplexobj(det) else det * det
    return SampledFunction.adopt(f.grid, np.sqrt(acc))


@dataclass(frozen=True)
class RatioRecord:
    p: float
    f_id: str
    norm_f: float
    norm_Sf: float
    ratio: float
    kappa_cap: tuple


def _check_p(p):
    if not (1 < p < math.inf):
        raise ValueError(f"p={p} outside the theorem range 1 < p < inf")


def lp_ratio(ctx, f: SampledFunction, p: float, k_cap, f_id: str = "f") -> RatioRecord:
    return lp_ratios(ctx, f, [p], k_cap, f_id)[0]


def lp_ratios(ctx, f: SampledFunction, ps, k_cap, f_id: str = "f") -> list:
    """One :class:`RatioRecord` per p, sharing a single square function."""
    for p in ps:
        _check_p(p)
    sf = square_function(ctx, f, k_cap)
    out = []
    for p in ps:
        nf, ns = lp_norm(f, p), lp_norm(sf, p)
        out.append(RatioRecord(float(p), f_id, nf, ns, ns / nf if nf > 0 else math.nan, tuple(k_cap)))
    return out


# ------------------------------------------------------------------ Rademacher


def rademacher(kappa: int, t: float) -> int:
    """sign sin(2**(kappa+1) * pi * t) from the parity of floor(2**(kappa+1) * t)."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    u = math.ldexp(t, kappa + 1)  # exact: scaling by a power of two
    k = math.floor(u)
    if k == u:
        return 0
    return 1 if k % 2 == 0 else -1


def khintchine_constants(p: float) -> tuple:
    """Best constants (A_p, B_p) with A_p |a|_2 <= |sum a_k w_k|_p <= B_p |a|_2."""
    if p == 2:
        return 1.0, 1.0
    gauss = math.sqrt(2.0) * (math.gamma((p + 1) / 2) / math.sqrt(math.pi)) ** (1.0 / p)
    if p < 2:
        return min(2.0 ** (0.5 - 1.0 / p), gauss), 1.0
    return 1.0, gauss


class KhintchineResult(NamedTuple):
    lower_ratio: float
    upper_ratio: float
    ratio: float
    moment: float
    exhaustive: bool


def khintchine_check(
    a: Sequence[float], p: float, exhaustive_limit: int = 12, samples: int = 200_000, seed: int = 1
) -> KhintchineResult:
    """Compare ||sum a_k w_k||_{L_p(0,1)} with ||a||_2.

    ``ratio`` is the plain quotient; ``lower_ratio`` and ``upper_ratio`` divide
    it by the best upper and lower Khintchine constants, so the inequality
    reads ``lower_ratio <= 1 <= upper_ratio``.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return KhintchineResult(0.0, 0.0, 0.0, 0.0, True)
    if not p >= 1:
        raise ValueError("p must be >= 1")
    exhaustive = a.size <= exhaustive_limit
    if exhaustive:
        moment = float(kernels.rademacher_moment(a, float(p)))
    else:
        rng = XorShift64Star(seed)
        acc = 0.0
        for _ in range(samples):
            s = 0.0
            for ak in a:
                s += ak * rng.sign()
            acc += abs(s) ** p
        moment = acc / samples
    l2 = math.sqrt(float(np.dot(a, a)))
    if l2 == 0:  # zero vector, or squares below the subnormal range
        return KhintchineResult(0.0, 0.0, 0.0, moment, exhaustive)
    ratio = moment ** (1.0 / p) / l2
    A, B = khintchine_constants(p)
    return KhintchineResult(ratio / B, ratio / A, ratio, moment, exhaustive)


# ------------------------------------------------------------------ sign sums


def _signed_sum(items, pattern, shape) -> np.ndarray:
    acc = np.zeros(shape, dtype=np.complex128)
    for kappa, det in items:
        acc = acc + pattern.sign(kappa) * det
    return acc


def sign_sum(ctx, f: SampledFunction, pattern, k_cap) -> SampledFunction:
    """Sum over Z_+^d(k_cap) of sigma_kappa * detail_nd(f, kappa)."""
    ctx = _as_tensor(ctx)
    if not pattern.covers(k_cap):
        raise ValueError("sign pattern does not cover k_cap")
    return SampledFunction.adopt(
        f.grid, _signed_sum(iter_detail_arrays(ctx, f, k_cap), pattern, f.grid.shape)
    )


@dataclass(frozen=True)
class SignTrialRecord:
    seed: int
    trial: int
    p: float
    norm: float
    ratio: float


def sign_sweep(
    ctx, f: SampledFunction, p: float, k_cap, trials: int, seed: int, free_signs: bool = False
) -> list:
    """Ratios ||sum sigma_kappa E_kappa f||_p / ||f||_p for seeded random patterns.

    ``free_signs`` draws one sign per multi-index instead of tensor signs;
    for d >= 2 that is exploratory and not covered by the tensor theorem.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ctx = _as_tensor(ctx)
    details = list(iter_detail_arrays(ctx, f, k_cap))
    nf = lp_norm(f, p)
    rng = XorShift64Star(seed)
    out = []
    for t in range(trials):
        pattern = FreeSigns.random(rng, k_cap) if free_signs else SignPattern.random(rng, k_cap)
        g = SampledFunction.adopt(f.grid, _signed_sum(details, pattern, f.grid.shape))
        norm = lp_norm(g, p)
        out.append(SignTrialRecord(seed, t, float(p), norm, norm / nf))
    return out


def summarize_trials(records: Sequence[SignTrialRecord]) -> dict:
    ratios = [r.ratio for r in records]
    med = statistics.median(ratios)
    return {
        "trials": len(ratios),
        "min": min(ratios),
        "max": max(ratios),
        "median": med,
        "max_over_median": max(ratios) / med if med > 0 else math.inf,
    }


# ------------------------------------------------------------------ weak (1,1)


def _pattern_1d(signs, k_cap):
    if isinstance(signs, (SignPattern, FreeSigns)):
        return signs
    return SignPattern((tuple(signs),))


def weak11_check(ctx_1d, f: SampledFunction, signs, k_cap, alphas) -> list:
    """Pairs (alpha, alpha * mes{|T f| > alpha} / ||f||_1) with T f the 1-D sign sum."""
    k = (k_cap,) if isinstance(k_cap, (int, np.integer)) else tuple(k_cap)
    tf = np.abs(sign_sum(ctx_1d, f, _pattern_1d(signs, k), k).samples)
    l1 = lp_norm(f, 1)
    if not l1 > 0:
        raise ValueError("f must have positive L1 norm")
    h = f.grid.cell_volume
    return [(float(al), float(al) * np.count_nonzero(tf > al) * h / l1) for al in alphas]


def weak11_sup(ctx_1d, f: SampledFunction, signs, k_cap) -> float:
    """Exact sup over alpha > 0 of alpha * mes{|T f| > alpha} / ||f||_1.

    For alpha just below a sample value v the level set holds every sample
    >= v, so the sup is max_i v_(i) * #{j : v_j >= v_(i)} * h.
    """
    k = (k_cap,) if isinstance(k_cap, (int, np.integer)) else tuple(k_cap)
    tf = np.sort(np.abs(sign_sum(ctx_1d, f, _pattern_1d(signs, k), k).samples))[::-1]
    counts = np.arange(1, tf.size + 1)
    return float(np.max(tf * counts, initial=0.0) * f.grid.cell_volume / lp_norm(f, 1))
