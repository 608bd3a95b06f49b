"""Central values L(1/2 + alpha, chi_{8d}) via the smoothed approximate functional equation.

The AFE reads

    L(1/2+alpha) = sum_n chi(n) n^{-1/2-alpha} V_alpha(n/sqrt d)
                   + X_alpha(d) sum_n chi(n) n^{-1/2+alpha} V_{-alpha}(n/sqrt d),

and ``l_oracle`` evaluates the same value independently as a finite
combination of Hurwitz zeta values.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .arith import check_odd_squarefree, jacobi_table
from .specfun import GSpec, hurwitz, x_alpha_factor
from .weights import ContourSpec, VCache, build_v_cache

# the V tables start here, so d may go up to XMIN**-2
V_XMIN = 1e-4
MAX_D = int(V_XMIN**-2)
ORACLE_MAX_MODULUS = 100_000


@dataclass(frozen=True)
class AfeParams:
    """AFE configuration.

    Attributes:
        gspec: the weight G; ``unit`` (G = 1) gives the fastest decaying V.
        contour: V quadrature line; None picks a default per G.
        tail_tol: V is treated as 0 beyond the first x with |V| < tail_tol
            for good; this fixes the truncation length x_cut * sqrt(d).
        truncation_multiplier: optional cap, terms n <= mult*sqrt(d)*log(2+d).
    """

    gspec: GSpec = field(default_factory=GSpec)
    contour: ContourSpec | None = None
    tail_tol: float = 1e-13
    truncation_multiplier: float | None = None

    def __post_init__(self):
        if self.truncation_multiplier is not None and self.truncation_multiplier <= 0:
            raise ValueError("truncation_multiplier must be positive")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QLMOMENT_WORKERS", "1")))
    except ValueError:
        return 1


@lru_cache(maxsize=32)
def _cached_v(alpha: complex, gspec: GSpec, contour: ContourSpec | None, tail_tol: float) -> VCache:
    xmax = 64.0
    while True:
        cache = build_v_cache(alpha, gspec, xmax, xmin=V_XMIN, tail_tol=tail_tol, contour=contour)
        if cache.x_cut < xmax / 2:
            return cache
        if xmax > 1e9:
            raise RuntimeError("V does not decay below tail_tol before 1e9")
        xmax *= 16


def v_cache_for(alpha: complex, params: AfeParams) -> VCache:
    return _cached_v(complex(alpha), params.gspec, params.contour, float(params.tail_tol))


class AfeEngine:
    """Vectorized AFE evaluation for many d at a fixed shift alpha."""

    def __init__(self, alpha: complex, params: AfeParams = AfeParams()):
        alpha = complex(alpha)
        if abs(alpha) > 0.25:
            raise ValueError(f"|alpha| must be <= 0.25, got {alpha}")
        self.alpha = alpha
        self.params = params
        self.va = v_cache_for(alpha, params)
        self.vb = self.va if alpha == 0 else v_cache_for(-alpha, params)
        if self.va.u0 != self.vb.u0 or self.va.du != self.vb.du:
            raise RuntimeError("V tables for +-alpha must share a grid")
        self._nmax = 0
        self._grow(1024)

    def _grow(self, nmax: int):
        if nmax <= self._nmax:
            return
        n = np.arange(nmax + 1, dtype=float)
        n[0] = 1.0
        self.logn = np.log(n)
        self.pa = np.exp((-0.5 - self.alpha) * self.logn)
        self.pb = np.exp((-0.5 + self.alpha) * self.logn)
        self._nmax = nmax

    def cuts(self, d_max: int) -> tuple[float, float]:
        ca, cb = self.va.x_cut, self.vb.x_cut
        mult = self.params.truncation_multiplier
        if mult is not None:
            cap = mult * math.log(2 + d_max)
            ca, cb = min(ca, cap), min(cb, cap)
        return ca, cb

    def sums(self, ds: np.ndarray, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
        ds = np.ascontiguousarray(ds, dtype=np.int64)
        if ds.size == 0:
            return np.zeros(0, complex), np.zeros(0, complex)
        dmax = int(ds.max())
        if dmax > MAX_D:
            raise ValueError(f"d={dmax} exceeds the V table range (d <= {MAX_D})")
        ca, cb = self.cuts(dmax)
        self._grow(int(max(ca, cb) * math.sqrt(dmax)) + 2)
        out_a = np.zeros(ds.size, dtype=complex)
        out_b = np.zeros(ds.size, dtype=complex)
        args = (self.logn, self.pa, self.pb, self.va.values, self.vb.values, self.va.u0, self.va.du, ca, cb)
        if workers <= 1 or ds.size < 64:
            _kernels.afe_sums(ds, *args, out_a, out_b)
        else:
            # slices are disjoint, so the result does not depend on scheduling
            bounds = np.linspace(0, ds.size, 4 * workers + 1).astype(int)

            def job(k):
                lo, hi = bounds[k], bounds[k + 1]
                _kernels.afe_sums(ds[lo:hi], *args, out_a[lo:hi], out_b[lo:hi])

            with ThreadPoolExecutor(workers) as pool:
                list(pool.map(job, range(len(bounds) - 1)))
        return out_a, out_b

    def values(self, ds, workers: int = 1) -> np.ndarray:
        ds = np.asarray(ds, dtype=np.int64)
        sa, sb = self.sums(ds, workers)
        if self.alpha == 0:
            return sa + sb
        return sa + x_alpha_factor(1, self.alpha) * ds.astype(float) ** (-self.alpha) * sb


def l_afe(d: int, alpha: complex, params: AfeParams = AfeParams()) -> complex:
    """L(1/2 + alpha, chi_{8d}) from the approximate functional equation."""
    d = check_odd_squarefree(d)
    return complex(AfeEngine(alpha, params).values(np.array([d]))[0])


def l_oracle(d: int, s: complex) -> complex:
    """L(s, chi_{8d}) = (8d)^{-s} sum_{a mod 8d} chi(a) zeta(s, a/8d)."""
    d = check_odd_squarefree(d)
    s = complex(s)
    q = 8 * d
    if q > ORACLE_MAX_MODULUS:
        raise ValueError(f"modulus 8d={q} exceeds oracle limit {ORACLE_MAX_MODULUS}")
    if s.real < 0.4 or s == 1:
        raise ValueError("oracle needs Re s >= 0.4 and s != 1")
    chi = character_table(d)
    a = np.nonzero(chi)[0]
    terms = hurwitz(s, a / q) * chi[a]
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag)) * q ** (-s)


def character_table(d: int) -> np.ndarray:
    """chi_{8d}(a) for a = 0..8d-1."""
    q = 8 * d
    a = np.arange(q)
    # (8d/a) = (2/a)(d/a) for odd a, and (d/a) = (a/d) * (-1)^{(a-1)(d-1)/4}
    two = np.where((a % 8 == 1) | (a % 8 == 7), 1, -1)
    recip = np.where(((a - 1) // 2 * ((d - 1) // 2)) % 2 == 0, 1, -1)
    out = two * recip * jacobi_table(d)[a % d]
    out[a % 2 == 0] = 0
    return out.astype(float)
