"""Reference computations that share no code with the package kernels."""

import math

import numpy as np


def translate(table, tab_lo, J, kappa, nu, box_lo, n):
    """phi(2**kappa x - nu) on cells box_lo .. box_lo + n by explicit index arithmetic."""
    out = np.zeros(n, dtype=table.dtype)
    for i in range(n):
        t = (2**kappa) * (box_lo + i) - nu * 2**J - tab_lo
        if 0 <= t < table.size:
            out[i] = table[t]
    return out


def project(sys, box, samples, kappa):
    """E_kappa by brute force: every nu in a generous range, one translate at a time."""
    phi, plo = sys.table(kappa)
    dual, dlo = sys.table(kappa, dual=True)
    J, h = box.J, 2.0**-box.J
    reach = (max(phi.size, dual.size) + abs(plo) + abs(dlo)) // 2**J + 2
    lo = (box.support_lo * 2**kappa) // 2**J - reach
    hi = (box.support_hi * 2**kappa) // 2**J + reach
    out = np.zeros(box.n, dtype=np.complex128)
    for nu in range(lo, hi + 1):
        d = translate(dual, dlo, J, kappa, nu, box.support_lo, box.n)
        c = 2**kappa * np.sum(samples * np.conj(d)) * h
        if c != 0:
            out += c * translate(phi, plo, J, kappa, nu, box.support_lo, box.n)
    return out


def haar_project(samples, J, box_lo, kappa):
    """Haar E_kappa = average over aligned dyadic blocks of 2**(J - kappa) cells."""
    w = 2 ** (J - kappa)
    assert box_lo % w == 0 and samples.size % w == 0
    blocks = samples.reshape(-1, w)
    return np.repeat(blocks.mean(axis=1), w)


def daubechies_at_dyadics(h, level):
    """phi at x = i / 2**level on [0, len(h) - 1] via the refinement equation.

    Integer values come from the eigenvector of the refinement matrix for
    eigenvalue 1, normalized to sum 1; finer points are filled level by level.
    """
    h = np.asarray(h, dtype=float)
    L = len(h) - 1
    M = np.zeros((L + 1, L + 1))
    for n in range(L + 1):
        for k in range(L + 1):
            j = 2 * n - k
            if 0 <= j <= L:
                M[n, j] += math.sqrt(2.0) * h[k]
    w, V = np.linalg.eig(M)
    v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
    v = v / v.sum()
    vals = {(0, n): v[n] for n in range(L + 1)}

    def get(j, m):
        # phi(m / 2**j), reduced to lowest level
        while j > 0 and m % 2 == 0:
            j, m = j - 1, m // 2
        if m < 0 or m > L * 2**j:
            return 0.0
        if (j, m) not in vals:
            vals[(j, m)] = sum(math.sqrt(2.0) * hk * get(j - 1, m - k * 2 ** (j - 1)) for k, hk in enumerate(h))
        return vals[(j, m)]

    return np.array([get(level, m) for m in range(L * 2**level + 1)])


def khintchine_moment(a, p):
    """Mean of |sum a_k r_k(t)|**p with the Rademacher functions evaluated at atom midpoints."""
    n = len(a)
    acc = 0.0
    for i in range(2**n):
        t = (i + 0.5) / 2**n
        s = 0.0
        for k in range(n):
            # sign of sin(2**(k+1) pi t), straight from the floating sine (safe away from zeros)
            r = 1 if math.sin(2 ** (k + 1) * math.pi * t) > 0 else -1
            s = s + float(a[k]) * r
        acc = acc + abs(s) ** p
    return acc / 2**n
