"""Dirichlet series and Euler products of the moment computation, closed forms and brute oracles.

Closed forms live next to independent truncated-sum oracles. Brute sums are
evaluated only where they converge absolutely; both sides are analytic, so
agreement on an open set checks the identity.

Euler products over all primes are accelerated by dividing out the leading
local behaviour, which is then restored through zeta values; the remaining
product converges like sum_p p^{-4} and is cut at EULER_PRIME_CUT.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .arith import (
    build_sieves,
    check_odd_squarefree,
    euler_phi,
    factorize,
    is_squarefree,
    kronecker,
    prime_divisors,
    primes_upto,
)
from .gauss import gauss_closed, gauss_closed_vec
from .specfun import real_char_l, zeta_excl

EULER_PRIME_CUT = 20_000


def _as_c(x):
    return np.asarray(x, dtype=complex)


def _out(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def _odd_primes(excluded=()) -> np.ndarray:
    p = primes_upto(EULER_PRIME_CUT)
    keep = p != 2
    for q in excluded:
        keep &= p != q
    return p[keep].astype(float)


def _euler_prod(local, excluded=(), z=None):
    """prod_{p odd, p not in excluded, p <= cut} local(p, z), vectorized over z."""
    p = _odd_primes(excluded)
    if z is None:
        return np.prod(local(p, None))
    z = _as_c(z)
    flat = z.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for i in range(0, flat.size, 256):
        zi = flat[i : i + 256, None]
        # sum of logs keeps the product stable; factors stay near 1
        out[i : i + 256] = np.exp(np.sum(np.log(local(p[None, :], zi)), axis=1))
    return out.reshape(z.shape)


def _zl(s, primes):
    """zeta(s) with Euler factors at ``primes`` (and only those) removed."""
    return zeta_excl(s, sorted(set(int(p) for p in primes)))


# ----------------------------------------------------------------------------
# B_alpha(l)


def _b_local_euler2(p, a):
    x = p ** (-2 - 2 * a)
    # divided by (1 - p^{-2-2a})(1 + p^{-3-2a})
    return (1 - x / (1 + 1 / p)) / ((1 - x) * (1 + x / p))


def _b_local_euler3(p, a):
    x = p ** (-2 - 2 * a)
    f = 1 - p**-2 - x + x / p
    return f / ((1 - p**-2) * (1 - x) * (1 + x / p))


def b_alpha(l: int, alpha, mode: Literal["series", "euler2", "euler3"] = "euler2", *, n_max: int = 2_000_000):
    """B_alpha(l) (alpha may be an array for the Euler modes).

    euler2: prod_{p|l} (1+1/p)^{-1} prod_{p not | 2l} (1 - p^{-2-2 alpha}/(1+1/p)).
    euler3: zeta_2(2) (phi(l)/l) prod_{p not | 2l} (1 - p^-2 - p^{-2-2 alpha} + p^{-3-2 alpha}).
    series: the defining sum over odd n divided by zeta_2(1+2 alpha); Re alpha >= 0.1.
    """
    l = check_odd_squarefree(l, "l")
    pl = prime_divisors(l)
    ex = [2] + pl
    a = _as_c(alpha)
    if mode == "euler2":
        head = np.prod([1 / (1 + 1 / p) for p in pl]) if pl else 1.0
        # the divided-out factors: prod (1-p^{-2-2a})(1+p^{-3-2a}) = zeta(3+2a)/(zeta(2+2a) zeta(6+4a))
        ratio = _zl(3 + 2 * a, ex) / (_zl(2 + 2 * a, ex) * _zl(6 + 4 * a, ex))
        return _out(head * ratio * _euler_prod(lambda p, z: _b_local_euler2(p, z), ex, a))
    if mode == "euler3":
        z2_2 = np.pi**2 / 8
        ratio = _zl(3 + 2 * a, ex) / (_zl(2, ex) * _zl(2 + 2 * a, ex) * _zl(6 + 4 * a, ex))
        return _out(z2_2 * euler_phi(l) / l * ratio * _euler_prod(lambda p, z: _b_local_euler3(p, z), ex, a))
    if mode == "series":
        if np.ndim(a) or a.real < 0.1:
            raise ValueError("series mode needs a scalar alpha with Re alpha >= 0.1")
        return _b_series(l, complex(a), n_max)
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=8)
def _b_coeffs(l: int, n_max: int) -> np.ndarray:
    """a(n) = prod_{p | nl} (1+1/p)^{-1} on odd n <= n_max (0 on even n)."""
    t = build_sieves(n_max)
    coef = np.ones(n_max + 1)
    coef[0::2] = 0.0
    for p in primes_upto(n_max):
        p = int(p)
        if p == 2 or l % p == 0:
            continue
        coef[p::p] /= 1 + 1 / p
    for p in prime_divisors(l):
        coef /= 1 + 1 / p
    coef[0] = 0.0
    del t
    coef.setflags(write=False)
    return coef


def b_density(l: int) -> float:
    """Mean value of a(n) over all n: (1/2) prod_{p|l}(1+1/p)^{-1} prod_{p not | 2l}(1 - 1/(p(p+1)))."""
    p = primes_upto(2_000_000).astype(float)
    p = p[(p != 2) & (l % p != 0)]
    out = 0.5 * np.exp(np.sum(np.log1p(-1 / (p * (p + 1)))))
    for q in prime_divisors(l):
        out /= 1 + 1 / q
    # primes above the table: prod (1 - 1/p^2) ~ exp(-1/(P log P))
    P = 2_000_000
    return out * math.exp(-1 / (P * math.log(P)))


def _b_series(l: int, alpha: complex, n_max: int) -> complex:
    coef = _b_coeffs(l, n_max)
    s = 1 + 2 * alpha
    n = np.arange(1, n_max + 1, 2)
    terms = coef[1::2] * np.exp(-s * np.log(n))
    total = math.fsum(terms.real) + 1j * math.fsum(terms.imag)
    # tail: -A(N) N^{-s} + c s N^{1-s}/(s-1), with A the summatory function
    A = float(np.sum(coef))
    c = b_density(l)
    N = float(n_max)
    total += -A * N ** (-s) + c * s * N ** (1 - s) / (s - 1)
    return complex(total / zeta_excl(s, [2]))


# ----------------------------------------------------------------------------
# C(w, alpha+s)


def _sqfree_coprime(lo: int, hi: int, modulus: int):
    if hi < lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    t = _sieve(hi)
    a = np.arange(lo, hi + 1)
    mu = t.moebius[lo : hi + 1].astype(np.int64)
    keep = (mu != 0) & (np.gcd(a, modulus) == 1)
    return a[keep], mu[keep]


@lru_cache(maxsize=4)
def _sieve_cached(limit: int):
    return build_sieves(limit)


def _sieve(n: int):
    limit = 1 << max(10, int(math.ceil(math.log2(max(n, 2)))))
    return _sieve_cached(limit)


def _prime_factor_lists(values) -> list[list[int]]:
    return [prime_divisors(int(v)) for v in values]


def a_head(kind: Literal["plus", "minus"], z, l: int, upto: float):
    """sum_{a <= upto, (a,2l)=1} mu(a) a^{-2} times the per-a Euler data.

    plus:  prod_{p|a} (1 - p^{-1-2z})/(1 - p^{-2-2z})
    minus: a^{2z} prod_{p|a} (1+1/p)^{-1}       (z on the left line)
    """
    z = _as_c(z)
    a, mu = _sqfree_coprime(1, int(math.floor(upto)), 2 * l)
    out = np.zeros(z.shape, dtype=complex)
    for ai, mi, ps in zip(a, mu, _prime_factor_lists(a)):
        term = np.full(z.shape, mi / float(ai) ** 2, dtype=complex)
        for p in ps:
            if kind == "plus":
                term = term * (1 - float(p) ** (-1 - 2 * z)) / (1 - float(p) ** (-2 - 2 * z))
            else:
                term = term / (1 + 1 / p)
        if kind == "minus":
            term = term * float(ai) ** (2 * z)
        out += term
    return out


def a_full(kind: Literal["plus", "minus"], z, l: int):
    """The complete a-sums of ``a_head`` as Euler products.

    plus:  prod_{p not | 2l} (1 - p^-2 (1 - p^{-1-2z})/(1 - p^{-2-2z}))
    minus: prod_{p not | 2l} (1 - p^{-2+2z} (1+1/p)^{-1})
    """
    z = _as_c(z)
    ex = [2] + prime_divisors(l)
    if kind == "plus":

        def loc(p, zz):
            x = p ** (-2 - 2 * zz)
            f = 1 - p**-2 * (1 - p * x) / (1 - x)
            return f / ((1 - p**-2) * (1 + x / p))

        return _out(_euler_prod(loc, ex, z) * _zl(3 + 2 * z, ex) / (_zl(2, ex) * _zl(6 + 4 * z, ex)))

    def loc(p, zz):
        x = p ** (-2 + 2 * zz)
        return (1 - x / (1 + 1 / p)) / ((1 - x) * (1 + x / p))

    return _out(_euler_prod(loc, ex, z) * _zl(3 - 2 * z, ex) / (_zl(2 - 2 * z, ex) * _zl(6 - 4 * z, ex)))


def c_series(
    w_choice: Literal["+", "-"],
    alpha_plus_s,
    l: int,
    Y: float,
    mode: Literal["closed", "brute"] = "closed",
    *,
    w=None,
    a_max: int | None = None,
    c_max: int = 60_000,
):
    """C(w, z) with z = alpha + s and w = +z or -z, over squarefree a > Y (and a <= a_max if given).

    Passing ``w`` overrides +-z: closed mode then uses the general product
    form and brute mode the defining triple sum over (c, r, n), which needs
    Re w >= 1.2.
    """
    l = check_odd_squarefree(l, "l")
    z = complex(alpha_plus_s)
    if w is None:
        w_val = z if w_choice == "+" else -z
    else:
        w_val = complex(w)
    if mode == "brute":
        if w_val.real < 1.2:
            raise ValueError("brute C(w, z) needs Re w >= 1.2 (pass a shifted w)")
        if a_max is None:
            raise ValueError("brute C(w, z) needs a finite a-window a_max")
        return _c_brute(w_val, z, l, Y, a_max, c_max)
    if mode != "closed":
        raise ValueError(f"unknown mode {mode!r}")
    if w is not None:
        return _c_general(w_val, z, l, Y, a_max)
    return _c_special(w_choice, z, l, Y, a_max)


def _c_special(w_choice, z: complex, l: int, Y: float, a_max):
    pl = prime_divisors(l)
    if w_choice == "+":
        pref = (np.pi**2 / 8) * euler_phi(l) / l
        if a_max is None:
            tail = a_full("plus", z, l) - a_head("plus", z, l, Y)
        else:
            tail = a_head("plus", z, l, a_max) - a_head("plus", z, l, min(Y, a_max))
        zeta_fac = zeta_excl(1 + 2 * z, [2]) / _zl(2 + 2 * z, [2] + pl)
        return complex(pref * zeta_fac * tail)
    # minus: zeta_2(1-2z) prod_{p|l}(1+1/p)^{-1} sum mu(a) a^{-2+2z} prod_{p|a}(1+1/p)^{-1}
    pref = zeta_excl(1 - 2 * z, [2]) * np.prod([1 / (1 + 1 / p) for p in pl])
    if a_max is None:
        tail = a_full("minus", z, l) - a_head("minus", z, l, Y)
    else:
        tail = a_head("minus", z, l, a_max) - a_head("minus", z, l, min(Y, a_max))
    return complex(pref * tail)


def _c_general(w: complex, z: complex, l: int, Y: float, a_max):
    """General-w closed form.

    The local factor of the product over p not | 2l is
    1 - p^{-1-2w} + p^{-1-2w}(1+1/p)^{-1} - p^{-1-z-w} ((a,p)/p)^{2+w-z} (1+1/p)^{-1};
    for p not | a it equals 1 - p^{-2-2w}, so the product is
    zeta_{2l}(2+2w)^{-1} times a finite correction over p | a.
    """
    if a_max is None:
        raise ValueError("general closed form is evaluated on a finite a-window")
    pl = prime_divisors(l)
    ex = [2] + pl
    e = 2 + w - z
    pref = _zl(e, ex) * zeta_excl(1 + 2 * w, [2]) / _zl(2 + 2 * w, ex)
    pref *= np.prod([1 / (1 + 1 / p) for p in pl]) if pl else 1.0
    a, mu = _sqfree_coprime(int(math.floor(Y)) + 1, int(a_max), 2 * l)
    total = 0j
    for ai, mi, ps in zip(a, mu, _prime_factor_lists(a)):
        term = mi * float(ai) ** (-e)
        for p in ps:
            fa = 1 - p ** (-1 - 2 * w) + p ** (-1 - 2 * w) / (1 + 1 / p) - p ** (-1 - z - w) / (1 + 1 / p)
            term *= fa / (1 - p ** (-2 - 2 * w))
        total += term
    return complex(pref * total)


def _b_nseries_lr(w: complex, l: int, rs: np.ndarray, n_max: int) -> np.ndarray:
    """sum_{n odd <= n_max} n^{-1-2w} prod_{p | l r n} (1+1/p)^{-1} for each r, plus a density tail."""
    n = np.arange(1, n_max + 1, 2)
    # g(n) = prod_{p|n} (1+1/p)^{-1}
    g = np.ones(n.size)
    for p in primes_upto(n_max):
        p = int(p)
        if p != 2:
            g[(p - 1) // 2 :: p] /= 1 + 1 / p
    pw = np.exp(-(1 + 2 * w) * np.log(n))
    out = np.empty(rs.size, dtype=complex)
    for i, r in enumerate(rs):
        lr = l * int(r)
        ps = prime_divisors(lr)
        # primes of lr count once, whether or not they also divide n
        fix = np.ones(n.size)
        for p in ps:
            fix[n % p == 0] *= 1 + 1 / p
        hl = np.prod([1 / (1 + 1 / p) for p in ps]) if ps else 1.0
        out[i] = hl * np.sum(g * fix * pw)
    # tail ~ density * N^{-2w}/(2w), the same for every r up to O(N^{-1-2w})
    return out


def _c_brute(w: complex, z: complex, l: int, Y: float, a_max: int, c_max: int) -> complex:
    """sum_{(c,2l)=1, c<=c_max} c^{-(2+w-z)} sum_{a|c, Y<a<=a_max} mu(a) sum_{r|c} mu(r) r^{-(1+z+w)} zeta_2(1+2w)B_w(lr).

    zeta_2(1+2w)B_w(lr) is the truncated defining n-series. The c-sum is
    organised by L = lcm(a, r): c = L m with (m, 2l) = 1.
    """
    e = 2 + w - z
    a_s, mu_a = _sqfree_coprime(int(math.floor(Y)) + 1, int(a_max), 2 * l)
    if a_s.size == 0:
        return 0j
    r_s, mu_r = _sqfree_coprime(1, c_max, 2 * l)
    # r^{-(1+z+w)} lcm^{-e} <= r^{-(3 + 2 Re w)}; r beyond 400 is negligible
    r_keep = r_s <= 400
    r_s, mu_r = r_s[r_keep], mu_r[r_keep]
    bser = _b_nseries_lr(w, l, r_s, 4001)
    m = np.arange(1, c_max + 1)
    m = m[np.gcd(m, 2 * l) == 1]
    mpow = np.exp(-e * np.log(m.astype(float)))
    cum = np.concatenate([[0], np.cumsum(mpow)])
    total = 0j
    for ai, ma in zip(a_s, mu_a):
        for ri, mr, bv in zip(r_s, mu_r, bser):
            L = int(ai) * int(ri) // math.gcd(int(ai), int(ri))
            if L > c_max:
                continue
            k = int(np.searchsorted(m, c_max // L, side="right"))
            total += ma * mr * float(ri) ** (-(1 + z + w)) * bv * float(L) ** (-e) * cum[k]
    return complex(total)


# ----------------------------------------------------------------------------
# J_p, H, H_{-1}, A


def _leg(k1: int, p: int) -> int:
    return kronecker(k1, p)


def j_p(k1: int, p: int, v, w, *, form: Literal["closed", "hp"] = "closed"):
    """J_p(k1; v, w), as the single fraction or as p^w(-(1-p^{-v})^{-1} + H_p)."""
    if p == 2 or not _is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    v, w = _as_c(v), _as_c(w)
    if np.any(1 - float(p) ** (-v) == 0):
        raise ZeroDivisionError("1 - p^{-v} vanishes")
    c = _leg(k1, p)
    P = float(p)
    if form == "hp":
        return _out(P**w * (-1 / (1 - P ** (-v)) + h_p_local(k1, p, v, w)))
    num = -(1 - P ** (-v - 2 * w)) * (1 - c * P ** (-0.5 - w)) + (1 - P ** (-1 - 2 * w)) * (1 - c * P ** (-0.5 - v - w))
    den = (1 - P ** (-v)) * (1 - P ** (-v - 2 * w)) * (1 - c * P ** (-0.5 - w))
    return _out(P**w * num / den)


def h_p_local(k1: int, p: int, v, w):
    """The local factor H_p(k1; v, w) (valid whether or not p | k1)."""
    c = _leg(k1, p)
    P = float(p)
    v, w = _as_c(v), _as_c(w)
    return _out(
        (1 - P ** (-1 - 2 * w))
        * (1 - c * P ** (-0.5 - v - w))
        / ((1 - P ** (-v)) * (1 - P ** (-v - 2 * w)) * (1 - c * P ** (-0.5 - w)))
    )


def j_p_brute(k1: int, p: int, v: complex, w: complex, *, jmax: int = 60, rmax: int = 60) -> complex:
    """sum_{j,r >= 0} G_{k1 p^{2j}}(p^{r+1})/p^{r+1} p^{-jv-rw}, truncated."""
    total = 0j
    for j in range(jmax):
        for r in range(rmax):
            g = gauss_closed(k1 * p ** (2 * j), p ** (r + 1))
            if g:
                total += g / p ** (r + 1) * complex(p) ** (-j * v - r * w)
    return total


def _is_prime(p: int) -> bool:
    return p >= 2 and factorize(p) == {p: 1}


def _l_excl(s, k1: int, excluded):
    if k1 == 1:
        return zeta_excl(s, sorted(set(excluded)))
    return real_char_l(s, k1, sorted(set(excluded)))


def h_closed(k1: int, l: int, a: int, v, w) -> complex:
    """zeta_l(v) zeta_{2al}(v+2w) L_{2al}(1/2+w, chi_{k1}) / (zeta_{2al}(1+2w) L_{2al}(1/2+v+w, chi_{k1})) prod_{p|l} J_p."""
    v, w = complex(v), complex(w)
    pl = prime_divisors(l)
    ex = sorted(set([2] + prime_divisors(a) + pl))
    out = zeta_excl(v, pl) * zeta_excl(v + 2 * w, ex) / zeta_excl(1 + 2 * w, ex)
    out *= _l_excl(0.5 + w, k1, ex) / _l_excl(0.5 + v + w, k1, ex)
    for p in pl:
        out *= j_p(k1, p, v, w)
    return complex(out)


def _tail_powers(x0: np.ndarray, v: complex) -> np.ndarray:
    """sum_{j >= 0} (x0 + j)^{-v} by Euler-Maclaurin (x0 >= 8)."""
    x = np.asarray(x0, dtype=float)
    xv = x ** (-v)
    out = x * xv / (v - 1) + 0.5 * xv
    # B2/2!, B4/4!, B6/6!, B8/8!
    coef = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600)
    term = v * xv / x
    for j, c in enumerate(coef, start=1):
        out = out + c * term
        term = term * (v + 2 * j - 1) * (v + 2 * j) / (x * x)
    return out


_POW_CACHE: dict[complex, np.ndarray] = {}


def _powers(v: complex, K: int) -> np.ndarray:
    """k^{-v} for k = 1..K, cached for the most recent exponents."""
    arr = _POW_CACHE.get(v)
    if arr is None or arr.size < K:
        size = max(K, 2 * (arr.size if arr is not None else 0))
        if len(_POW_CACHE) > 8:
            _POW_CACHE.clear()
        arr = np.exp(-v * np.log(np.arange(1, size + 1, dtype=float)))
        _POW_CACHE[v] = arr
    return arr[:K]


def periodic_dirichlet(g: np.ndarray, v: complex, *, reps: int = 8, min_terms: int = 256) -> complex:
    """sum_{k >= 1} g(k) k^{-v} for g periodic with period q = len(g) (g[i] = g(i+1)).

    Direct sum over whole periods up to K = J q, then the remaining periods
    via Euler-Maclaurin in j for each residue.
    """
    q = g.size
    J = max(reps, -(-min_terms // q))
    head = np.dot(g, _powers(v, J * q).reshape(J, q).sum(axis=0))
    r = np.arange(1, q + 1, dtype=float)
    tail = float(q) ** (-v) * np.dot(g, _tail_powers(J + r / q, v))
    return complex(head + tail)


def _n_sum_with_tail(n: np.ndarray, terms: np.ndarray, sigma: complex) -> complex:
    """sum_n terms(n) plus the tail for terms ~ b(n) n^{-sigma}, b of constant mean."""
    total = complex(np.sum(terms))
    N = float(n[-1]) + 1
    b = terms * np.exp(sigma * np.log(n))
    Bn = complex(np.sum(b))
    # -B(N) N^{-sigma} + sigma (B(N)/N) N^{1-sigma}/(sigma-1)
    return total + Bn * N ** (-sigma) / (sigma - 1)


def _default_n_max(sigma: float, l: int) -> int:
    n = int(min(2000, max(100, 1e-10 ** (-1 / max(sigma, 1.0)))))
    return max(100, n // max(1, int(math.sqrt(l))))


N_MAX_CAP = 6_400
N_REL_TOL = 1e-8


def _adaptive_n_sum(term, a: int, sigma: complex, n0: int, n_max: int | None) -> complex:
    """sum_{n odd, (n,a)=1} term(n) with the density tail, doubling N until stable.

    With ``n_max`` given the sum is taken once at that length.
    """
    vals: list[complex] = []
    ns: list[int] = []
    done = 0

    def extend(N):
        nonlocal done
        for n in range(done + 1, N + 1):
            if n % 2 == 1 and math.gcd(n, a) == 1:
                ns.append(n)
                vals.append(term(n))
        done = N

    def total():
        return _n_sum_with_tail(np.array(ns, dtype=float), np.array(vals, dtype=complex), sigma)

    if n_max is not None:
        extend(n_max)
        return total()
    N = n0
    extend(N)
    prev = total()
    while N < N_MAX_CAP:
        N *= 2
        extend(N)
        cur = total()
        if abs(cur - prev) <= N_REL_TOL * abs(cur):
            return cur
        prev = cur
    return prev


def h_brute(k1: int, l: int, a: int, v, w, *, signed: bool = False, parity: str | None = None, n_max: int | None = None) -> complex:
    """sum_{k2 >= 1} sum_{(n,2a)=1} G_{k1 k2^2}(ln)/(ln) k2^{-v} n^{-w}.

    signed: weight (-1)^{k2}. parity "even"/"odd": restrict k2.
    """
    v, w = complex(v), complex(w)
    sigma = 0.5 + w

    def term(n):
        m = l * n
        q = 2 * m if (signed or parity) else m
        k2 = np.arange(1, q + 1)
        g = gauss_closed_vec(k1 * k2 * k2, m) / m
        if signed:
            g = g * np.where(k2 % 2 == 0, 1.0, -1.0)
        if parity == "even":
            g = g * (k2 % 2 == 0)
        elif parity == "odd":
            g = g * (k2 % 2 == 1)
        if not g.any():
            return 0j
        return periodic_dirichlet(g, v) * float(n) ** (-w)

    return _adaptive_n_sum(term, a, sigma, _default_n_max(sigma.real, l), n_max)


def _check_a(a: int, l: int):
    if a <= 0 or a % 2 == 0 or math.gcd(a, l) != 1:
        raise ValueError(f"a must be odd, positive and coprime to l, got a={a}, l={l}")


def h_series(k1: int, l: int, a: int, v, w, mode: Literal["closed", "brute"] = "closed", **kw) -> complex:
    if k1 == 0 or not is_squarefree(k1):
        raise ValueError("k1 must be squarefree and nonzero")
    l = check_odd_squarefree(l, "l")
    _check_a(a, l)
    if mode == "closed":
        if complex(w).real + 0.5 < 1.2:
            raise ValueError("closed H needs Re(1/2 + w) >= 1.2 for the L-values")
        return h_closed(k1, l, a, v, w)
    if complex(v).real < 2 or complex(w).real < 1.2:
        raise ValueError("brute H needs Re v >= 2, Re w >= 1.2")
    return h_brute(k1, l, a, v, w, **kw)


def h_minus1(k1: int, l: int, a: int, v, w, mode: Literal["closed", "brute"] = "closed", **kw) -> complex:
    """sum with (-1)^{k2}: equals (2^{1-v} - 1) H(k1, l; v, w)."""
    if mode == "closed":
        return complex((2 ** (1 - complex(v)) - 1) * h_series(k1, l, a, v, w, "closed"))
    if complex(w).real < 1.2:
        raise ValueError("brute H_{-1} needs Re w >= 1.2")
    return h_brute(k1, l, a, v, w, signed=True, **kw)


def a_brute(eps: int, l: int, a: int, u, w, *, n_max: int | None = None) -> complex:
    """sum_{(n,2a)=1} sum_{k >= 1} (-1)^k G_{eps k}(ln)/(ln) k^{-u} n^{-w}."""
    u, w = complex(u), complex(w)
    sigma = 0.5 + w

    def term(n):
        m = l * n
        k = np.arange(1, 2 * m + 1)
        g = gauss_closed_vec(eps * k, m) / m * np.where(k % 2 == 0, 1.0, -1.0)
        return periodic_dirichlet(g, u) * float(n) ** (-w)

    return _adaptive_n_sum(term, a, sigma, _default_n_max(sigma.real, l), n_max)


_L_EXACT_K1 = 48


def _l_ratio_batch(k1s: np.ndarray, s1: complex, s2: complex, excluded) -> np.ndarray:
    """L(s1, chi_k)/L(s2, chi_k) with Euler factors at ``excluded`` removed, for many k.

    Small |k| use the exact Hurwitz evaluation; the rest a truncated Euler
    product (these terms carry weights below |k|^{-Re u}).
    """
    out = np.empty(k1s.size, dtype=complex)
    small = np.abs(k1s) <= _L_EXACT_K1
    for i in np.nonzero(small)[0]:
        k = int(k1s[i])
        out[i] = _l_excl(s1, k, excluded) / _l_excl(s2, k, excluded)
    big = np.nonzero(~small)[0]
    if big.size:
        ps = [int(p) for p in primes_upto(3000) if int(p) not in excluded]
        logr = np.zeros(big.size, dtype=complex)
        kb = k1s[big]
        for p in ps:
            chi = _kron_vec(kb, p)
            logr += np.log1p(-chi * float(p) ** (-s2)) - np.log1p(-chi * float(p) ** (-s1))
        out[big] = np.exp(logr)
    return out


def _kron_vec(k: np.ndarray, p: int) -> np.ndarray:
    """(k/p) for an odd prime p, vectorized over k."""
    sq = np.zeros(p, dtype=float)
    sq[(np.arange(1, p) ** 2) % p] = 1.0
    r = k % p
    return np.where(r == 0, 0.0, np.where(sq[r] == 1.0, 1.0, -1.0))


def a_closed_terms(eps: int, l: int, a: int, u, w, k1s) -> np.ndarray:
    """Per-k1 terms of the closed A-series (squarefree k1 > 0), prefactor included."""
    u, w = complex(u), complex(w)
    k1 = np.asarray(k1s, dtype=np.int64)
    pl = prime_divisors(l)
    ex = sorted(set([2] + prime_divisors(a) + pl))
    pref = zeta_excl(2 * u, pl) * zeta_excl(2 * u + 2 * w, ex) / zeta_excl(1 + 2 * w, ex)
    c = np.where(k1 % 2 == 1, 2 ** (1 - 2 * u) - 1, 1.0)
    signed = eps * k1
    ratio = _l_ratio_batch(signed, 0.5 + w, 0.5 + 2 * u + w, ex)
    jp = np.ones(k1.size, dtype=complex)
    for p in pl:
        jp *= np.array([j_p(int(k), p, 2 * u, w) for k in signed])
    return pref * c * np.exp(-u * np.log(k1.astype(float))) * ratio * jp


def a_closed(eps: int, l: int, a: int, u, w, *, k1_max: int = 20_000) -> complex:
    """[zeta_l(2u) zeta_{2al}(2u+2w)/zeta_{2al}(1+2w)] sum*_{k1>0} c(k1) k1^{-u}
    L_{2al}(1/2+w, chi_{eps k1})/L_{2al}(1/2+2u+w, chi_{eps k1}) prod_{p|l} J_p(eps k1; 2u, w),
    c(k1) = 1 for even k1 and 2^{1-2u} - 1 for odd k1.
    """
    u = complex(u)
    k1, _ = _sqfree_coprime(1, k1_max, 1)
    terms = a_closed_terms(eps, l, a, u, w, k1)
    total = complex(np.sum(terms))
    # tail over squarefree k1 > K: mean of k1^u * term over the last half, times sum_{k > K} k^{-u}
    K = float(k1_max)
    upper = k1 > K / 2
    mean = complex(np.sum(terms[upper] * np.exp(u * np.log(k1[upper].astype(float))))) / (K / 2)
    return total + mean * K ** (1 - u) / (u - 1)


def a_series(eps: int, l: int, a: int, u, w, mode: Literal["closed", "brute"] = "closed", **kw) -> complex:
    if eps not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    l = check_odd_squarefree(l, "l")
    _check_a(a, l)
    if mode == "closed":
        return a_closed(eps, l, a, u, w, **kw)
    if complex(u).real < 1.5 or complex(w).real < 1.2:
        raise ValueError("brute A needs Re u >= 1.5, Re w >= 1.2")
    return a_brute(eps, l, a, u, w, **kw)


def a_k1_one_term(l: int, a: int, u, w) -> complex:
    """The k1 = 1, eps = +1 term of the closed A-series (chi_1 trivial, so valid across the pole)."""
    u, w = complex(u), complex(w)
    pl = prime_divisors(l)
    ex = sorted(set([2] + prime_divisors(a) + pl))
    out = zeta_excl(2 * u, pl) * zeta_excl(2 * u + 2 * w, ex) / zeta_excl(1 + 2 * w, ex)
    out *= (2 ** (1 - 2 * u) - 1) * zeta_excl(0.5 + w, ex) / zeta_excl(0.5 + 2 * u + w, ex)
    for p in pl:
        out *= j_p(1, p, 2 * u, w)
    return complex(out)


def a_residue(s, alpha, l: int, a: int, *, radius: float = 1e-3, nodes: int = 64) -> tuple[complex, complex]:
    """Residue in u' of A_{l,1}(s/2 - u', 1/2 + alpha + s/2 + u') at u' = -alpha - s/2.

    Returns (numeric residue from a circle contour, closed expression).
    """
    s, alpha = complex(s), complex(alpha)
    u0 = -alpha - s / 2
    th = 2 * np.pi * np.arange(nodes) / nodes
    pts = u0 + radius * np.exp(1j * th)
    vals = np.array([a_k1_one_term(l, a, s / 2 - up, 0.5 + alpha + s / 2 + up) for up in pts])
    numeric = complex(np.mean(vals * (pts - u0)))
    pl = prime_divisors(l)
    ex = sorted(set([2] + prime_divisors(a) + pl))
    z = s + alpha
    closed = euler_phi(2 * a * l) / (2 * a * l) * zeta_excl(2 * z, pl) / zeta_excl(2, ex) * (2 ** (1 - 2 * z) - 1)
    for p in pl:
        closed *= j_p(1, p, 2 * z, 0.5)
    return numeric, complex(closed)


# ----------------------------------------------------------------------------
# seeded closed-vs-brute sweeps

SWEEP_TOL = 1e-6
SWEEP_TOL_A_L3 = 1e-5


@dataclass(frozen=True)
class SweepResult:
    which: str
    samples: int
    seed: int
    worst: float
    worst_ratio: float
    worst_point: dict
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0


def _rand_c(rng, re, im):
    return complex(rng.uniform(*re), rng.uniform(*im))


def _rand_k1(rng, hi: int = 30) -> int:
    while True:
        k = int(rng.integers(1, hi + 1)) * (1 if rng.random() < 0.5 else -1)
        if is_squarefree(abs(k)):
            return k


def _sweep_point(which: str, rng) -> tuple[complex, complex, float, dict]:
    ls = (1, 3, 5, 15)
    if which == "b":
        l = int(rng.choice((1, 3, 5, 15, 105)))
        alpha = _rand_c(rng, (0.2, 0.5), (-2, 2))
        ref = b_alpha(l, alpha, "series")
        # the worse of the two Euler forms
        e2, e3 = b_alpha(l, alpha, "euler2"), b_alpha(l, alpha, "euler3")
        closed = e2 if abs(e2 - ref) >= abs(e3 - ref) else e3
        return closed, ref, SWEEP_TOL, {"l": l, "alpha": alpha}
    if which == "c":
        l = int(rng.choice(ls))
        z = _rand_c(rng, (0.02, 0.08), (-3, 3))
        w = _rand_c(rng, (1.2, 2.0), (-2, 2))
        Y = int(rng.integers(1, 6))
        ch = "+" if rng.random() < 0.5 else "-"
        kw = dict(w=w, a_max=40)
        return (c_series(ch, z, l, Y, "closed", **kw), c_series(ch, z, l, Y, "brute", **kw), SWEEP_TOL,
                {"l": l, "z": z, "w": w, "Y": Y})
    if which in ("h", "hm1"):
        k1 = _rand_k1(rng)
        l = int(rng.choice(ls))
        a = int(rng.choice([x for x in (1, 3, 5, 7) if math.gcd(x, l) == 1]))
        v = _rand_c(rng, (3, 4), (-2, 2))
        w = _rand_c(rng, (2.5, 3.5), (-2, 2))
        fn = h_series if which == "h" else h_minus1
        return fn(k1, l, a, v, w, "closed"), fn(k1, l, a, v, w, "brute"), SWEEP_TOL, {"k1": k1, "l": l, "a": a, "v": v, "w": w}
    if which == "a":
        eps = 1 if rng.random() < 0.5 else -1
        l = int(rng.choice((1, 3)))
        a = int(rng.choice([x for x in (1, 5, 7) if math.gcd(x, l) == 1]))
        u = _rand_c(rng, (3, 4), (-1, 1))
        w = _rand_c(rng, (2.5, 3.5), (-2, 2))
        tol = SWEEP_TOL_A_L3 if l == 3 else SWEEP_TOL
        return a_series(eps, l, a, u, w, "closed"), a_series(eps, l, a, u, w, "brute"), tol, {"eps": eps, "l": l, "a": a, "u": u, "w": w}
    raise ValueError(f"unknown identity {which!r}; expected b, c, h, hm1 or a")


def identity_sweep(which: str, samples: int = 20, seed: int = 0) -> SweepResult:
    """Closed form vs brute oracle at ``samples`` seeded random points; relative error."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng([seed, ["b", "c", "h", "hm1", "a"].index(which) if which in ("b", "c", "h", "hm1", "a") else 99])
    worst, ratio, where, tol_w = 0.0, 0.0, {}, SWEEP_TOL
    for _ in range(samples):
        closed, brute, tol, pt = _sweep_point(which, rng)
        err = abs(closed - brute) / max(abs(brute), 1e-300)
        if err / tol > ratio:
            worst, ratio, where, tol_w = err, err / tol, pt, tol
    return SweepResult(which, samples, seed, worst, ratio, where, tol_w)
