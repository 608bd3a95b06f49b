"""Integer kernels: Kronecker/Jacobi symbols, sieves, squarefree enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# dense int64 tables above this size are refused
SIEVE_LIMIT_CAP = 50_000_000


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n, binary algorithm."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            t = -t
    if n == 1:
        return t
    return t * jacobi(a, n)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n)) if abs(n) > 1 else []


def euler_phi(n: int) -> int:
    out = n
    for p in prime_divisors(n):
        out -= out // p
    return out


def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def check_odd_squarefree(d: int, name: str = "d") -> int:
    """Validate a positive odd squarefree integer at an API boundary."""
    if int(d) != d:
        raise ValueError(f"{name} must be an integer, got {d!r}")
    d = int(d)
    if d <= 0 or d % 2 == 0 or not is_squarefree(d):
        raise ValueError(f"{name} must be odd, squarefree and positive, got {d}")
    return d


def chi8d(d: int, n: int) -> int:
    """The primitive even character chi_{8d}(n) = (8d/n), d odd squarefree."""
    check_odd_squarefree(d)
    if n % 2 == 0:
        return 0
    return kronecker(8 * d, n)


def jacobi_table(n: int) -> np.ndarray:
    """Array of (a/n) for a = 0..n-1 (n odd positive) via Legendre tables."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"n must be odd and positive, got {n}")
    a = np.arange(n)
    out = np.ones(n, dtype=np.int64)
    for p, e in factorize(n).items():
        leg = np.full(p, -1, dtype=np.int64)
        leg[0] = 0
        leg[(np.arange(1, p) ** 2) % p] = 1
        out *= leg[a % p] ** e
    return out


@lru_cache(maxsize=8)
def primes_upto(n: int) -> np.ndarray:
    """Primes <= n (Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.nonzero(is_p)[0].astype(np.int64)


@dataclass(frozen=True)
class SieveTables:
    """Dense multiplicative-function tables on 0..limit (index 0 unused).

    Attributes:
        limit: largest tabulated integer.
        moebius: int8 array, moebius[n] = mu(n).
        totient: int64 array, totient[n] = phi(n).
        spf: int64 array of smallest prime factors (spf[1] = 1).
        odd_squarefree: ascending odd squarefree integers <= limit.
    """

    limit: int
    moebius: np.ndarray
    totient: np.ndarray
    spf: np.ndarray
    odd_squarefree: np.ndarray

    def __post_init__(self):
        for arr in (self.moebius, self.totient, self.spf, self.odd_squarefree):
            arr.setflags(write=False)


def build_sieves(limit: int) -> SieveTables:
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if limit > SIEVE_LIMIT_CAP:
        raise MemoryError(f"sieve limit {limit} exceeds cap {SIEVE_LIMIT_CAP}")
    n = limit
    mu = np.ones(n + 1, dtype=np.int8)
    phi = np.arange(n + 1, dtype=np.int64)
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p :: p * p] = 0
        phi[p::p] -= phi[p::p] // p
        sl = spf[p::p]
        sl[sl == 0] = p
    mu[0] = 0
    spf[1] = 1
    idx = np.arange(n + 1)
    osf = idx[(mu != 0) & (idx % 2 == 1)].astype(np.int64)
    return SieveTables(limit=n, moebius=mu, totient=phi, spf=spf, odd_squarefree=osf)


def squarefree_coprime(upto: int, modulus: int, start: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Squarefree a in [start, upto] with gcd(a, modulus) = 1, and mu(a)."""
    if upto < start:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    t = build_sieves(max(int(upto), 1))
    a = np.arange(start, int(upto) + 1)
    mu = t.moebius[start:].astype(np.int64)
    keep = (mu != 0) & (np.gcd(a, int(modulus)) == 1)
    return a[keep], mu[keep]
