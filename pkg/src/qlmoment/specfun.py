"""Complex special functions and the gamma-factor combinations of the AFE.

Gamma is delegated to ``scipy.special`` (complex Lanczos/Stirling with
reflection); zeta and Hurwitz zeta are evaluated here by Euler-Maclaurin
summation, vectorized over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np
from scipy import special as sps

from .arith import check_odd_squarefree, is_squarefree, kronecker

_EM_TERMS = 18


@lru_cache(maxsize=1)
def _em_coefficients() -> np.ndarray:
    """B_{2j}/(2j)! for j = 1.._EM_TERMS."""
    b = sps.bernoulli(2 * _EM_TERMS)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)])


def _is_nonpositive_int(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    return (s.imag == 0) & (s.real <= 0) & (np.round(s.real) == s.real)


def gamma(s):
    """Gamma function for complex arguments; raises at the poles."""
    if np.any(_is_nonpositive_int(s)):
        raise ValueError("gamma has a pole at non-positive integers")
    out = sps.gamma(np.asarray(s, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def loggamma(s):
    if np.any(_is_nonpositive_int(s)):
        raise ValueError("loggamma has a pole at non-positive integers")
    out = sps.loggamma(np.asarray(s, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def gamma_ratio(num, den):
    """Gamma(num)/Gamma(den) through log-gamma (no overflow)."""
    out = np.exp(sps.loggamma(np.asarray(num, dtype=complex)) - sps.loggamma(np.asarray(den, dtype=complex)))
    return complex(out) if np.ndim(out) == 0 else out


def hurwitz(s, a):
    """Hurwitz zeta(s, a) by Euler-Maclaurin; s complex (array ok), a > 0 real (array ok).

    The head length grows with |s| so the remainder after _EM_TERMS
    Bernoulli corrections stays below double precision on
    |Im s| <= 100, Re s >= -2.
    """
    s = np.asarray(s, dtype=complex)
    a = np.asarray(a, dtype=float)
    if np.any(s == 1):
        raise ValueError("Hurwitz zeta has a pole at s = 1")
    if np.any(a <= 0):
        raise ValueError("Hurwitz parameter must be positive")
    s, a = np.broadcast_arrays(s, a)
    smax = float(np.max(np.abs(s))) if s.size else 0.0
    n_head = int(max(12, math.ceil(smax / 2 + 10)))
    out = np.zeros(s.shape, dtype=complex)
    for k in range(n_head):
        out += (a + k) ** (-s)
    x = a + n_head
    xs = x ** (-s)
    out += x * xs / (s - 1) + 0.5 * xs
    # rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    term = s * xs / x
    coef = _em_coefficients()
    inv_x2 = 1.0 / (x * x)
    for j in range(1, _EM_TERMS + 1):
        out += coef[j - 1] * term
        term = term * (s + 2 * j - 1) * (s + 2 * j) * inv_x2
    return complex(out) if out.ndim == 0 else out


def zeta(s):
    """Riemann zeta(s) = hurwitz(s, 1)."""
    return hurwitz(s, 1.0)


def zeta_excl(s, excluded: Iterable[int] = ()):
    """zeta(s) with the Euler factors at the given primes removed."""
    excluded = list(excluded)
    if len(set(excluded)) != len(excluded):
        raise ValueError("excluded primes must be distinct")
    s_arr = np.asarray(s, dtype=complex)
    out = np.asarray(zeta(s_arr), dtype=complex)
    for p in excluded:
        out = out * (1 - float(p) ** (-s_arr))
    return complex(out) if out.ndim == 0 else out


def _char_period(k1: int) -> int:
    return 4 * abs(k1)


def real_char_l(s, k1: int, excluded: Iterable[int] = (), *, check_region: bool = True):
    """L(s, chi_{k1}) with chi_{k1}(n) the Kronecker symbol (k1/n), Euler factors at ``excluded`` removed.

    Evaluated exactly as a finite combination of Hurwitz zeta values over
    the odd residues modulo 4|k1| (on odd n the symbol is periodic with that
    period), then the factor at 2 is restored unless 2 is excluded.
    """
    if k1 == 0 or not is_squarefree(k1):
        raise ValueError(f"k1 must be a nonzero squarefree integer, got {k1}")
    s_arr = np.asarray(s, dtype=complex)
    if check_region and np.any(s_arr.real < 1.2):
        raise ValueError("real_char_l is restricted to Re s >= 1.2")
    excluded = list(excluded)
    q = _char_period(k1)
    res = np.array([b for b in range(1, q, 2) if kronecker(k1, b) != 0], dtype=float)
    chi = np.array([kronecker(k1, int(b)) for b in res], dtype=float)
    shp = s_arr.shape
    sf = s_arr.reshape(-1)
    vals = hurwitz(sf[:, None], (res / q)[None, :])
    out = (vals * chi[None, :]).sum(axis=1) * float(q) ** (-sf)
    if 2 not in excluded:
        out = out / (1 - kronecker(k1, 2) * 2.0 ** (-sf))
    for p in excluded:
        if p != 2:
            out = out * (1 - kronecker(k1, p) * float(p) ** (-sf))
    out = out.reshape(shp)
    return complex(out) if out.ndim == 0 else out


def g_alpha(s, alpha):
    """(8/pi)^{s/2} Gamma((1/2+alpha+s)/2) / Gamma((1/2+alpha)/2)."""
    s = np.asarray(s, dtype=complex)
    out = (8 / np.pi) ** (s / 2) * gamma_ratio((0.5 + alpha + s) / 2, (0.5 + alpha) / 2 + 0 * s)
    return complex(out) if np.ndim(out) == 0 else out


def gamma_alpha(alpha):
    """(8/pi)^{-alpha} Gamma((1/2-alpha)/2) / Gamma((1/2+alpha)/2)."""
    alpha = np.asarray(alpha, dtype=complex)
    out = (8 / np.pi) ** (-alpha) * gamma_ratio((0.5 - alpha) / 2, (0.5 + alpha) / 2)
    return complex(out) if np.ndim(out) == 0 else out


def x_alpha_factor(d: int, alpha):
    """X_alpha(d) = (8d/pi)^{-alpha} Gamma((1/2-alpha)/2)/Gamma((1/2+alpha)/2) = gamma_alpha * d^{-alpha}."""
    alpha = np.asarray(alpha, dtype=complex)
    out = (8 * d / np.pi) ** (-alpha) * gamma_ratio((0.5 - alpha) / 2, (0.5 + alpha) / 2)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class GSpec:
    """The even entire weight G(s) of the approximate functional equation.

    kind:
        ``"gaussian"``: G(s) = exp(width * s^2).
        ``"remark-zero"``: exp(s^2) (alpha^2 - s^2)((s-1/2)^2 - alpha^2)((s+1/2)^2 - alpha^2)
        / (alpha^2 (1/4 - alpha^2)^2), so G(+-alpha) = G(1/2 +- alpha) = 0 and G(0) = 1.
        ``"remark-literal"``: the same with (s^2 + alpha^2) as first factor; it
        vanishes at +-i alpha instead of +-alpha and is kept for diagnostics.
        ``"unit"``: G(s) = 1 (fastest decaying V).
    """

    kind: Literal["gaussian", "remark-zero", "remark-literal", "unit"] = "unit"
    alpha: complex | None = None
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "remark-zero", "remark-literal", "unit"):
            raise ValueError(f"unknown G kind {self.kind!r}")
        if self.kind.startswith("remark"):
            if self.alpha is None or self.alpha == 0:
                raise ValueError("remark-zero G needs a nonzero alpha")
            a2 = complex(self.alpha) ** 2
            if a2 == 0.25:
                raise ValueError("remark-zero G is undefined at alpha = +-1/2")
        if self.width <= 0:
            raise ValueError("gaussian width must be positive")

    @property
    def key(self) -> tuple:
        a = None if self.alpha is None else complex(self.alpha)
        return (self.kind, a, float(self.width))


def big_g(s, spec: GSpec):
    s = np.asarray(s, dtype=complex)
    if spec.kind == "unit":
        out = np.ones_like(s)
    elif spec.kind == "gaussian":
        out = np.exp(spec.width * s * s)
    else:
        a2 = complex(spec.alpha) ** 2
        first = (s * s + a2) if spec.kind == "remark-literal" else (a2 - s * s)
        poly = first * ((s - 0.5) ** 2 - a2) * ((s + 0.5) ** 2 - a2)
        out = np.exp(s * s) * poly / (a2 * (0.25 - a2) ** 2)
    return complex(out) if out.ndim == 0 else out


def validate_shift_twist(alpha: complex, l: int) -> tuple[complex, int]:
    """Check the numeric box |Re alpha| <= 0.25, |Im alpha| <= 50 and l odd squarefree."""
    alpha = complex(alpha)
    if abs(alpha.real) > 0.25 or abs(alpha.imag) > 50:
        raise ValueError(f"alpha={alpha} outside |Re| <= 0.25, |Im| <= 50")
    return alpha, check_odd_squarefree(l, "l")



IDENTITY_TOL = 1e-9


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def identity_suite(samples: int = 100, seed: int = 0) -> dict[str, float]:
    """Worst relative discrepancy of each gamma/zeta identity over seeded random points.

    duplication: pi^{-1/2} 2^{1-u} cos(pi u/2) Gamma(u) = Gamma(u/2)/Gamma((1-u)/2), |u| <= 5
    trig:        cos t + sin t = sqrt(2) cos(pi/4 - t), |t| <= 3
    zeta_fe:     pi^{-z} Gamma(z) zeta(2z) = pi^{-1/2+z} Gamma(1/2-z) zeta(1-2z), 0.1 <= Re z <= 0.4
    two_rewrite: (2^{1-z} - 1) zeta(1-z) = 2^{1-z} zeta_2(1-z)
    g_gamma:     g_{-a}(-s) gamma_{-a-s} gamma_a = g_a(s)
    """
    rng = np.random.default_rng(seed)

    def disk(r, n):
        rad = r * np.sqrt(rng.random(n))
        return rad * np.exp(2j * np.pi * rng.random(n))

    out = {}
    u = disk(5.0, samples)
    # keep away from the poles of Gamma(u), Gamma(u/2) and the zeros of 1/Gamma((1-u)/2)
    near = np.abs(u - np.round(u.real)) < 0.05
    u[near] += 0.1j
    lhs = np.pi**-0.5 * 2 ** (1 - u) * np.cos(np.pi * u / 2) * gamma(u)
    rhs = gamma_ratio(u / 2, (1 - u) / 2)
    out["duplication"] = float(np.max(_rel(lhs, rhs)))

    t = disk(3.0, samples)
    out["trig"] = float(np.max(_rel(np.cos(t) + np.sin(t), np.sqrt(2) * np.cos(np.pi / 4 - t))))

    z = 0.1 + 0.3 * rng.random(samples) + 1j * rng.uniform(-10, 10, samples)
    lhs = np.pi ** (-z) * gamma(z) * zeta(2 * z)
    rhs = np.pi ** (-0.5 + z) * gamma(0.5 - z) * zeta(1 - 2 * z)
    out["zeta_fe"] = float(np.max(_rel(lhs, rhs)))

    z = rng.uniform(-2, 2, samples) + 1j * rng.uniform(-10, 10, samples)
    z[np.abs(z) < 0.05] += 0.1
    lhs = (2 ** (1 - z) - 1) * zeta(1 - z)
    rhs = 2 ** (1 - z) * zeta_excl(1 - z, [2])
    out["two_rewrite"] = float(np.max(_rel(lhs, rhs)))

    a = rng.uniform(-0.25, 0.25, samples) + 1j * rng.uniform(-1, 1, samples)
    s = rng.uniform(-0.2, 0.4, samples) + 1j * rng.uniform(-10, 10, samples)
    lhs = g_alpha(-s, -a) * gamma_alpha(-a - s) * gamma_alpha(a)
    out["g_gamma"] = float(np.max(_rel(lhs, g_alpha(s, a))))
    return out
