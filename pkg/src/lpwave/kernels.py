"""Hot loops: quadrature analysis/synthesis along grid lines, Rademacher moments.

Every kernel exists twice, a numba ``@njit`` loop version and a vectorised
numpy version. The public names (``analysis``, ``synthesis``,
``rademacher_moment``) are bound to one of them at import time according to
:mod:`lpwave._backend`. Both variants are importable for tests and benchmarks.

Kernels are dtype-generic: lines and tables are either both float64 or
both complex128 (the caller splits complex data over real tables).

Index conventions shared by all kernels. A line holds ``n`` cells with
absolute indices ``m = box_lo + i``. A scale table holds ``T`` samples with
absolute indices ``tab_lo + t``. The translate ``nu`` at scale ``kappa``
reads table index ``t = 2**kappa * m - nu * 2**J - tab_lo`` (exact stride
lookup, no interpolation).
"""

import math

import numpy as np

from ._backend import USE_NUMBA, HAVE_NUMBA

__all__ = [
    "analysis",
    "synthesis",
    "rademacher_moment",
    "analysis_numpy",
    "synthesis_numpy",
    "rademacher_moment_numpy",
]


def _window(n_nu, nu_lo, kappa, J, box_lo, n, tab_lo, T):
    s = 1 << kappa
    base = (nu_lo + np.arange(n_nu, dtype=np.int64)) * (1 << J) + tab_lo
    first = -((-base) // s) - box_lo
    stop = -((-(base + T)) // s) - box_lo
    return base, first, np.maximum(first, 0), np.minimum(stop, n)


# ---------------------------------------------------------------- numpy path


def analysis_numpy(lines, table, tab_lo, kappa, J, box_lo, nu_lo, n_nu):
    """Raw sums ``sum_i lines[l, i] * conj(table[t(i, nu)])`` for each line and nu."""
    L, n = lines.shape
    T = table.shape[0]
    s = 1 << kappa
    out = np.zeros((L, n_nu), dtype=np.result_type(lines, table))
    if n_nu == 0 or n == 0:
        return out
    base, first, i0, i1 = _window(n_nu, nu_lo, kappa, J, box_lo, n, tab_lo, T)
    width = int(np.max(i1 - first)) if n_nu else 0
    ctab = np.conj(table)
    if width <= n_nu:
        for w in range(width):
            idx = first + w
            t = s * (box_lo + idx) - base
            ok = (idx >= 0) & (idx < n) & (t < T)
            if not ok.any():
                continue
            out[:, ok] += lines[:, idx[ok]] * ctab[t[ok]]
    else:
        for k in range(n_nu):
            a, b = int(i0[k]), int(i1[k])
            if b <= a:
                continue
            t0 = s * (box_lo + a) - int(base[k])
            out[:, k] = lines[:, a:b] @ ctab[t0 : t0 + s * (b - a) : s]
    return out


def synthesis_numpy(coeffs, table, tab_lo, kappa, J, box_lo, nu_lo, n):
    """Sum of ``coeffs[l, k] * table[t(i, nu_lo + k)]`` into ``n`` cells per line."""
    L, n_nu = coeffs.shape
    T = table.shape[0]
    s = 1 << kappa
    out = np.zeros((L, n), dtype=np.result_type(coeffs, table))
    if n_nu == 0 or n == 0:
        return out
    base, first, i0, i1 = _window(n_nu, nu_lo, kappa, J, box_lo, n, tab_lo, T)
    width = int(np.max(i1 - first))
    if width <= n_nu:
        for w in range(width):
            idx = first + w
            t = s * (box_lo + idx) - base
            ok = (idx >= 0) & (idx < n) & (t < T)
            if not ok.any():
                continue
            # indices first[k] + w are strictly increasing in k, so no collisions
            out[:, idx[ok]] += coeffs[:, ok] * table[t[ok]]
    else:
        for k in range(n_nu):
            a, b = int(i0[k]), int(i1[k])
            if b <= a:
                continue
            t0 = s * (box_lo + a) - int(base[k])
            out[:, a:b] += np.outer(coeffs[:, k], table[t0 : t0 + s * (b - a) : s])
    return out


def rademacher_moment_numpy(a, p):
    """Mean of ``|sum_k a_k w_k|**p`` over all 2**len(a) Rademacher sign atoms."""
    n = a.shape[0]
    atoms = np.arange(1 << n, dtype=np.int64)
    s = np.zeros(1 << n, dtype=np.float64)
    for k in range(n):
        w = 1.0 - 2.0 * ((atoms >> (n - 1 - k)) & 1)
        s = s + a[k] * w
    # libm pow per atom: numpy's vectorised power may differ in the last bit
    vals = np.fromiter((math.pow(v, p) for v in np.abs(s).tolist()), np.float64, s.size)
    # sequential accumulation keeps the atom order fixed
    return float(np.add.accumulate(vals)[-1]) / (1 << n)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _ceil_div(a, b):
        return -((-a) // b)

    @njit(cache=True)
    def analysis_numba(lines, table, tab_lo, kappa, J, box_lo, nu_lo, n_nu):
        L, n = lines.shape
        T = table.shape[0]
        s = 1 << kappa
        step = 1 << J
        out = np.zeros((L, n_nu), dtype=lines.dtype)
        ctab = np.conj(table)
        for l in range(L):
            for k in range(n_nu):
                base = (nu_lo + k) * step + tab_lo
                i0 = max(_ceil_div(base, s) - box_lo, 0)
                i1 = min(_ceil_div(base + T, s) - box_lo, n)
                acc = out[l, k]
                t = s * (box_lo + i0) - base
                for i in range(i0, i1):
                    acc += lines[l, i] * ctab[t]
                    t += s
                out[l, k] = acc
        return out

    @njit(cache=True)
    def synthesis_numba(coeffs, table, tab_lo, kappa, J, box_lo, nu_lo, n):
        L, n_nu = coeffs.shape
        T = table.shape[0]
        s = 1 << kappa
        step = 1 << J
        out = np.zeros((L, n), dtype=coeffs.dtype)
        for l in range(L):
            for k in range(n_nu):
                c = coeffs[l, k]
                if c == 0:
                    continue
                base = (nu_lo + k) * step + tab_lo
                i0 = max(_ceil_div(base, s) - box_lo, 0)
                i1 = min(_ceil_div(base + T, s) - box_lo, n)
                t = s * (box_lo + i0) - base
                for i in range(i0, i1):
                    out[l, i] += c * table[t]
                    t += s
        return out

    @njit(cache=True)
    def rademacher_moment_numba(a, p):
        n = a.shape[0]
        pf = p * 1.0  # integer p would compile to repeated multiplication, not pow
        acc = 0.0
        for i in range(1 << n):
            s = 0.0
            for k in range(n):
                w = 1.0 - 2.0 * ((i >> (n - 1 - k)) & 1)
                s = s + a[k] * w
            acc = acc + abs(s) ** pf
        return acc / (1 << n)

else:  # pragma: no cover
    analysis_numba = synthesis_numba = rademacher_moment_numba = None


if USE_NUMBA:
    analysis = analysis_numba
    synthesis = synthesis_numba
    rademacher_moment = rademacher_moment_numba
else:
    analysis = analysis_numpy
    synthesis = synthesis_numpy
    rademacher_moment = rademacher_moment_numpy
