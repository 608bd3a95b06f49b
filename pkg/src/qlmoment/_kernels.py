"""Compiled inner loops (numba, nogil) for the AFE sums over n."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def jacobi_odd(a, n):
    # (a/n) for odd n > 0, a >= 0
    a = a % n
    t = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n % 8
            if r == 3 or r == 5:
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a = a % n
    if n == 1:
        return t
    return 0


@njit(cache=True, nogil=True)
def _interp(vals, u0, du, u):
    pos = (u - u0) / du
    i = int(np.floor(pos))
    if i < 1:
        i = 1
    if i > vals.size - 3:
        i = vals.size - 3
    f = pos - i
    return (
        -f * (f - 1) * (f - 2) / 6 * vals[i - 1]
        + (f + 1) * (f - 1) * (f - 2) / 2 * vals[i]
        - (f + 1) * f * (f - 2) / 2 * vals[i + 1]
        + (f + 1) * f * (f - 1) / 6 * vals[i + 2]
    )


@njit(cache=True, nogil=True)
def afe_sums(ds, logn, pa, pb, va, vb, u0, du, cut_a, cut_b, out_a, out_b):
    """For each d: out_a = sum_n chi(n) pa[n] V_a(n/sqrt d), out_b likewise with pb, V_b.

    Terms with n/sqrt(d) beyond the decay cut are dropped; chi is (8d/n) on
    odd n. Each d is summed in ascending n.
    """
    nmax = logn.size - 1
    for j in range(ds.size):
        d = ds[j]
        half = 0.5 * np.log(d)
        sq = np.sqrt(d)
        na = min(nmax, int(cut_a * sq))
        nb = min(nmax, int(cut_b * sq))
        top = max(na, nb)
        sa = 0.0 + 0.0j
        sb = 0.0 + 0.0j
        m = 8 * d
        for n in range(1, top + 1, 2):
            c = jacobi_odd(m % n, n)
            if c == 0:
                continue
            u = logn[n] - half
            if n <= na:
                sa += c * pa[n] * _interp(va, u0, du, u)
            if n <= nb:
                sb += c * pb[n] * _interp(vb, u0, du, u)
        out_a[j] = sa
        out_b[j] = sb


@njit(cache=True, nogil=True)
def chi8d_row(d, n_hi):
    out = np.zeros(n_hi + 1, dtype=np.int64)
    m = 8 * d
    for n in range(1, n_hi + 1, 2):
        out[n] = jacobi_odd(m % n, n)
    return out
