"""Gauss-type sums G_k(n) and the Poisson summation formula over odd moduli.

    G_k(n) = ((1-i)/2 + (-1/n)(1+i)/2) * sum_{a mod n} (a/n) e(ak/n)

is real, multiplicative in n, and has a closed form on prime powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .arith import euler_phi, factorize, jacobi, jacobi_table, kronecker
from .weights import DEFAULT_WEIGHT

BRUTE_MAX_N = 100_000


@dataclass(frozen=True)
class GaussSumValue:
    k: int
    n: int
    value: complex
    method: str


def _check_n(n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"G_k(n) needs odd positive n, got {n}")
    return int(n)


def _prefactor(n: int) -> complex:
    # (1-i)/2 + (-1/n)(1+i)/2 is 1 for n = 1 mod 4 and -i for n = 3 mod 4
    return 1.0 if n % 4 == 1 else -1j


def gauss_brute(k: int, n: int) -> complex:
    """Direct O(n) evaluation of the defining sum."""
    n = _check_n(n)
    if n > BRUTE_MAX_N:
        raise ValueError(f"n={n} too large for brute force (max {BRUTE_MAX_N})")
    chi = jacobi_table(n).astype(float)
    a = np.arange(n)
    phase = np.exp(2j * np.pi * ((a * (k % n)) % n) / n)
    return complex(_prefactor(n) * np.dot(chi, phase))


def gauss_brute_all(n: int) -> np.ndarray:
    """G_k(n) for k = 0..n-1 via one discrete Fourier transform of (a/n)."""
    n = _check_n(n)
    chi = jacobi_table(n).astype(float)
    # sum_a chi(a) e(ak/n) = n * ifft(chi)[k]
    return _prefactor(n) * n * np.fft.ifft(chi)


def _vp(k: int, p: int) -> float:
    if k == 0:
        return math.inf
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def gauss_prime_power(k: int, p: int, beta: int) -> float:
    """Closed form of G_k(p^beta), alpha = v_p(k) (infinite when k = 0)."""
    if beta == 0:
        return 1.0
    a = _vp(k, p)
    if beta <= a:
        return 0.0 if beta % 2 else float(euler_phi(p**beta))
    if beta == a + 1:
        a = int(a)
        if beta % 2 == 0:
            return -float(p**a)
        return kronecker(k // p**a, p) * float(p**a) * math.sqrt(p)
    return 0.0


def gauss_closed(k: int, n: int) -> float:
    """Product of the prime-power closed forms over p^beta || n."""
    n = _check_n(n)
    out = 1.0
    for p, beta in factorize(n).items():
        out *= gauss_prime_power(k, p, beta)
        if out == 0.0:
            break
    return out


@lru_cache(maxsize=4096)
def _prime_power_period(p: int, beta: int) -> np.ndarray:
    # G_k(p^beta) depends only on k mod p^beta
    q = p**beta
    vals = np.array([gauss_prime_power(k, p, beta) for k in range(q)])
    vals.setflags(write=False)
    return vals


def gauss_closed_vec(ks, n: int) -> np.ndarray:
    """gauss_closed over an integer array ``ks`` for fixed n."""
    n = _check_n(n)
    ks = np.asarray(ks, dtype=np.int64)
    out = np.ones(ks.shape)
    if n == 1:
        return out
    for p, beta in factorize(n).items():
        out *= _prime_power_period(p, beta)[ks % (p**beta)]
    return out


def gauss_sweep(nmax: int, kmax: int) -> tuple[float, tuple[int, int]]:
    """Worst |closed - brute|/n over odd n <= nmax, |k| <= kmax."""
    worst, where = 0.0, (0, 1)
    ks = np.arange(-kmax, kmax + 1)
    for n in range(1, nmax + 1, 2):
        brute = gauss_brute_all(n)[ks % n]
        err = np.abs(gauss_closed_vec(ks, n) - brute) / n
        i = int(np.argmax(err))
        if err[i] > worst:
            worst, where = float(err[i]), (int(ks[i]), n)
    return worst, where


def fhat(F: Callable[[float], float], y: float, support: tuple[float, float] = (1.0, 2.0)) -> float:
    """int (cos 2 pi x y + sin 2 pi x y) F(x) dx over the support of F."""
    lo, hi = support
    if y == 0:
        val, _ = integrate.quad(F, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val
    omega = 2 * math.pi * y
    c, _ = integrate.quad(F, lo, hi, weight="cos", wvar=omega, epsabs=1e-13, limit=400)
    s, _ = integrate.quad(F, lo, hi, weight="sin", wvar=omega, epsabs=1e-13, limit=400)
    return c + s


class TailNotConverged(RuntimeError):
    pass


def poisson_check(n: int, Z: float, F=DEFAULT_WEIGHT, kmax: int = 64, *, tail_tol: float = 1e-8) -> tuple[float, float]:
    """Both sides of sum_{d odd} (d/n) F(d/Z) = (Z/2n)(2/n) sum_k (-1)^k G_k(n) Fhat(kZ/2n).

    ``F`` is a weight object with ``evaluate`` and ``support``.
    """
    n = _check_n(n)
    lo, hi = F.support
    d = np.arange(int(math.floor(lo * Z)) | 1, int(math.ceil(hi * Z)) + 1, 2)
    chi = np.array([jacobi(int(x), n) for x in d], dtype=float)
    lhs = math.fsum(chi * F.evaluate(d / Z))

    def f(x):
        return float(F.evaluate(x))

    scale = Z / (2 * n)
    g = gauss_closed_vec(np.arange(-kmax, kmax + 1), n)
    edge = max(abs(fhat(f, kmax * scale, F.support)), abs(fhat(f, -kmax * scale, F.support)))
    if scale * n * edge * 2 > tail_tol:
        raise TailNotConverged(f"fhat tail {edge:.2e} at kmax={kmax} too large")
    terms = []
    for k in range(-kmax, kmax + 1):
        gk = g[k + kmax]
        if gk != 0:
            terms.append((-1) ** (k % 2) * gk * fhat(f, k * scale, F.support))
    rhs = scale * kronecker(2, n) * math.fsum(terms)
    return lhs, rhs
