"""The twisted first moment M(alpha, l), its main term, and the contour pieces of the main-term proof.

    M(alpha, l) = sum*_{d odd} chi_{8d}(l) L(1/2 + alpha, chi_{8d}) Phi(d/X)

with the sum over odd squarefree d. ``brute_moment`` evaluates it term by
term from the AFE; ``main_term`` is the conjectured two-addend expression;
the ``term_*`` functions are the four contour integrals whose sum is the
first addend.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .arith import check_odd_squarefree, euler_phi, prime_divisors, squarefree_coprime
from .lvalue import AfeEngine, AfeParams, V_XMIN, default_workers
from .series import a_full, a_head, b_alpha
from .specfun import GSpec, big_g, g_alpha, gamma_alpha, validate_shift_twist, zeta_excl
from .weights import DEFAULT_WEIGHT, BumpWeight, ContourSpec, vertical_integral

ZETA2_2 = math.pi**2 / 8
EPS_LINE = 0.05
MIN_ALPHA = 1e-4
ALPHA0_DELTA = 1e-3
CSV_HEADER = ["X", "brute_re", "brute_im", "main_re", "main_im", "res_re", "res_im", "err_budget"]
# relative accuracy of one AFE term (V table interpolation plus tail cut)
AFE_TERM_EPS = 1e-11
MAIN_TERM_REL_EPS = 1e-10


@dataclass(frozen=True)
class ShiftTwist:
    """The pair (alpha, l): a complex shift near 0 and an odd squarefree twist."""

    alpha: complex
    l: int = 1

    def __post_init__(self):
        a, l = validate_shift_twist(self.alpha, self.l)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "l", l)


@dataclass(frozen=True)
class MomentRequest:
    X: float
    st: ShiftTwist
    weight: BumpWeight = DEFAULT_WEIGHT
    afe: AfeParams = field(default_factory=AfeParams)

    def __post_init__(self):
        if not self.X >= 16:
            raise ValueError(f"X must be >= 16, got {self.X}")


def _fsum_c(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


def _chi8d_l(ds: np.ndarray, l: int) -> np.ndarray:
    """chi_{8d}(l) for odd l; (8d/l) = (2/l)^3 (d/l) = (2/l)(d/l)."""
    if l == 1:
        return np.ones(ds.size)
    from .arith import jacobi, kronecker

    two = kronecker(2, l)
    return np.array([two * jacobi(int(d) % l, l) for d in ds], dtype=float)


def window_ds(X: float, weight: BumpWeight) -> np.ndarray:
    """Odd squarefree d with d/X inside the open support of the weight."""
    lo, hi = weight.support
    d_lo = int(math.floor(lo * X)) + 1
    d_hi = int(math.ceil(hi * X)) - 1
    if d_hi < max(d_lo, 1):
        return np.zeros(0, dtype=np.int64)
    ds, _ = squarefree_coprime(d_hi, 2, max(d_lo, 1))
    return ds


def brute_moment(req: MomentRequest, workers: int | None = None) -> complex:
    """sum over odd squarefree d of chi_{8d}(l) L(1/2+alpha, chi_{8d}) Phi(d/X), exactly rounded."""
    ds = window_ds(req.X, req.weight)
    if ds.size == 0:
        return 0j
    eng = AfeEngine(req.st.alpha, req.afe)
    vals = eng.values(ds, workers or default_workers())
    w = np.asarray(req.weight.evaluate(ds / req.X))
    return _fsum_c(_chi8d_l(ds, req.st.l) * vals * w)


# ----------------------------------------------------------------------------
# main term


def _addend1(X: float, alpha: complex, l: int, weight: BumpWeight) -> complex:
    z = zeta_excl(1 + 2 * alpha, [2])
    return X * weight.mellin(1.0) / (2 * ZETA2_2) * l ** (-0.5 - alpha) * z * b_alpha(l, alpha)


def _addend2(X: float, alpha: complex, l: int, weight: BumpWeight) -> complex:
    z = zeta_excl(1 - 2 * alpha, [2])
    return (
        X ** (1 - alpha)
        * weight.mellin(1 - alpha)
        * gamma_alpha(alpha)
        / (2 * ZETA2_2)
        * l ** (-0.5 + alpha)
        * z
        * b_alpha(l, -alpha)
    )


def main_term_parts(X: float, st: ShiftTwist, weight: BumpWeight = DEFAULT_WEIGHT) -> tuple[complex, complex]:
    if abs(st.alpha) < MIN_ALPHA:
        raise ValueError(f"|alpha| < {MIN_ALPHA}: the zeta poles are ill-conditioned; use main_term_alpha0")
    return complex(_addend1(X, st.alpha, st.l, weight)), complex(_addend2(X, st.alpha, st.l, weight))


def main_term(X: float, st: ShiftTwist, weight: BumpWeight = DEFAULT_WEIGHT) -> complex:
    """X Phi~(1)/(2 zeta_2(2)) l^{-1/2-a} zeta_2(1+2a) B_a(l)
    + X^{1-a} Phi~(1-a) gamma_a/(2 zeta_2(2)) l^{-1/2+a} zeta_2(1-2a) B_{-a}(l)."""
    a1, a2 = main_term_parts(X, st, weight)
    return a1 + a2


def main_term_alpha0(X: float, l: int = 1, weight: BumpWeight = DEFAULT_WEIGHT, delta: float = ALPHA0_DELTA) -> complex:
    """The main term at alpha = 0 as a limit.

    The symmetric average over +-delta is even in delta, so one Richardson
    step with delta/2 removes the delta^2 error.
    """

    def avg(h):
        return 0.5 * (main_term(X, ShiftTwist(h, l), weight) + main_term(X, ShiftTwist(-h, l), weight))

    return (4 * avg(delta / 2) - avg(delta)) / 3


def main_term_auto(X: float, st: ShiftTwist, weight: BumpWeight = DEFAULT_WEIGHT) -> complex:
    if abs(st.alpha) < MIN_ALPHA:
        if st.alpha != 0:
            raise ValueError(f"0 < |alpha| < {MIN_ALPHA} is not supported")
        return main_term_alpha0(X, st.l, weight)
    return main_term(X, st, weight)


def involution(fn: Callable[..., complex]) -> Callable[..., complex]:
    """Swap alpha -> -alpha, Phi -> x^{-alpha} Phi, then multiply by gamma_alpha X^{-alpha}.

    ``fn`` is called as fn(X, st, weight, *rest).
    """

    def swapped(X, st: ShiftTwist, weight: BumpWeight = DEFAULT_WEIGHT, *rest, **kw):
        st2 = ShiftTwist(-st.alpha, st.l)
        return gamma_alpha(st.alpha) * X ** (-st.alpha) * fn(X, st2, weight.shifted(-st.alpha), *rest, **kw)

    return swapped


# ----------------------------------------------------------------------------
# contour pieces


def default_term_contour(X: float, abscissa: float) -> ContourSpec:
    # nearest singularity is s = 0 at distance |abscissa|; trapezoid error ~ exp(-2 pi |c|/h)
    h = abs(abscissa) / 10
    return ContourSpec(abscissa, max(6.0, 50 * h), h, True, 1e-13 * max(X, 1.0))


def _require_remark_g(st: ShiftTwist, gspec: GSpec | None) -> GSpec:
    if st.alpha == 0:
        raise ValueError("the contour pieces need alpha != 0")
    gspec = gspec or GSpec("remark-zero", st.alpha)
    if gspec.kind.startswith("remark") and complex(gspec.alpha) ** 2 != st.alpha**2:
        raise ValueError("remark G must be built with the same alpha")
    return gspec


def _base(s, X, st: ShiftTwist, weight: BumpWeight, gspec: GSpec):
    """Phi~(1+s/2) G(s)/s g_alpha(s) X^{s/2}."""
    return weight.mellin(1 + s / 2) * big_g(s, gspec) / s * g_alpha(s, st.alpha) * np.exp(s / 2 * math.log(X))


def _plus_integrand(X, st, weight, gspec, a_factor):
    l = st.l

    def f(s):
        z = st.alpha + s
        zeta_fac = zeta_excl(1 + 2 * z, [2]) / zeta_excl(2 + 2 * z, [2] + prime_divisors(l))
        return _base(s, X, st, weight, gspec) * float(l) ** (-s) * zeta_fac * a_factor(z)

    return f


def _plus_prefactor(X, st):
    l = st.l
    return X * euler_phi(l) / l / (2 * l ** (0.5 + st.alpha))


def _minus_prefactor(X, st):
    l = st.l
    return -X / (2 * ZETA2_2 * math.sqrt(l)) * np.prod([1 / (1 + 1 / p) for p in prime_divisors(l)])


def _minus_integrand(X, st, weight, gspec, a_factor):
    l = st.l

    def f(s):
        z = st.alpha + s
        return _base(s, X, st, weight, gspec) * float(l) ** (-z) * zeta_excl(1 + 2 * z, [2]) * a_factor(-z)

    return f


def _integrate(f, contour):
    val, _ = vertical_integral(f, contour)
    return val


def term_MN_k0(X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10, contour: ContourSpec | None = None, gspec=None) -> complex:
    """The k = 0 piece: a <= Y, on Re s = +eps."""
    gspec = _require_remark_g(st, gspec)
    contour = contour or default_term_contour(X, EPS_LINE)
    if Y < 1:
        return 0j
    f = _plus_integrand(X, st, weight, gspec, lambda z: a_head("plus", z, st.l, Y))
    return complex(_plus_prefactor(X, st) * _integrate(f, contour))


def term_MR1(X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10, contour: ContourSpec | None = None, gspec=None) -> complex:
    """The a > Y piece on Re s = +eps; the a-sum is the Euler product minus the head a <= Y."""
    gspec = _require_remark_g(st, gspec)
    contour = contour or default_term_contour(X, EPS_LINE)
    f = _plus_integrand(X, st, weight, gspec, lambda z: a_full("plus", z, st.l) - a_head("plus", z, st.l, Y))
    return complex(_plus_prefactor(X, st) * _integrate(f, contour))


def term_MmN_k1(X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10, contour: ContourSpec | None = None, gspec=None) -> complex:
    """The k1 = 1 piece of the dual sum: a <= Y, on Re s = -eps."""
    gspec = _require_remark_g(st, gspec)
    contour = contour or default_term_contour(X, -EPS_LINE)
    if Y < 1:
        return 0j
    f = _minus_integrand(X, st, weight, gspec, lambda mz: a_head("minus", mz, st.l, Y))
    return complex(_minus_prefactor(X, st) * _integrate(f, contour))


def term_MmR2(
    X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10, contour: ContourSpec | None = None, gspec=None, *, unsimplified: bool = False
) -> complex:
    """The a > Y piece of the dual sum on Re s = -eps.

    ``unsimplified`` uses g_{-alpha}(-s) gamma_{-alpha-s} gamma_alpha in
    place of g_alpha(s) and l^{1/2+alpha}, l^{-s} in place of l^{1/2}, l^{-alpha-s}.
    """
    gspec = _require_remark_g(st, gspec)
    contour = contour or default_term_contour(X, -EPS_LINE)

    def a_factor(mz):
        return a_full("minus", mz, st.l) - a_head("minus", mz, st.l, Y)

    if not unsimplified:
        f = _minus_integrand(X, st, weight, gspec, a_factor)
        return complex(_minus_prefactor(X, st) * _integrate(f, contour))

    l, alpha = st.l, st.alpha

    def f_raw(s):
        z = alpha + s
        gam = g_alpha(-s, -alpha) * gamma_alpha(-alpha - s) * gamma_alpha(alpha)
        return (
            weight.mellin(1 + s / 2)
            * big_g(s, gspec)
            / s
            * gam
            * np.exp(s / 2 * math.log(X))
            * float(l) ** (-s)
            * zeta_excl(1 + 2 * z, [2])
            * a_factor(-z)
        )

    pref = _minus_prefactor(X, st) * math.sqrt(l) / l ** (0.5 + alpha)
    return complex(pref * _integrate(f_raw, contour))


@dataclass(frozen=True)
class CancellationResult:
    lhs: complex
    rhs: complex
    pieces: tuple[complex, complex, complex, complex]

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def cancellation_rhs(X, st: ShiftTwist, weight=DEFAULT_WEIGHT) -> complex:
    """The s = 0 residue of the shared integrand: the first main-term addend."""
    return complex(_addend1(X, st.alpha, st.l, weight))


def check_cancellation(X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10, contour: ContourSpec | None = None, gspec=None) -> CancellationResult:
    """Four contour pieces against the closed residue."""
    plus = contour
    minus = None if contour is None else contour.with_abscissa(-contour.abscissa)
    p = (
        term_MN_k0(X, st, weight, Y, plus, gspec),
        term_MmN_k1(X, st, weight, Y, minus, gspec),
        term_MR1(X, st, weight, Y, plus, gspec),
        term_MmR2(X, st, weight, Y, minus, gspec),
    )
    return CancellationResult(complex(math.fsum(x.real for x in p) + 1j * math.fsum(x.imag for x in p)), cancellation_rhs(X, st, weight), p)


def check_cancellation_mirror(X, st: ShiftTwist, weight=DEFAULT_WEIGHT, Y: float = 10) -> CancellationResult:
    """The involution applied to the four pieces, against the second main-term addend."""
    mirrored = [involution(fn) for fn in (term_MN_k0, term_MmN_k1, term_MR1, term_MmR2)]
    p = tuple(complex(fn(X, st, weight, Y)) for fn in mirrored)
    rhs = complex(_addend2(X, st.alpha, st.l, weight))
    return CancellationResult(complex(sum(p)), rhs, p)


# ----------------------------------------------------------------------------
# residual scan


@dataclass(frozen=True)
class ResidualRow:
    X: float
    brute: complex
    main: complex
    residual: complex
    err_budget: float


@dataclass(frozen=True)
class ResidualTable:
    rows: tuple[ResidualRow, ...]
    alpha: complex
    l: int
    weight_name: str
    seed: int = 0

    def __post_init__(self):
        xs = [r.X for r in self.rows]
        if xs != sorted(xs):
            raise ValueError("rows must be sorted by X")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(
                [repr(float(r.X)), repr(r.brute.real), repr(r.brute.imag), repr(r.main.real), repr(r.main.imag),
                 repr(r.residual.real), repr(r.residual.imag), repr(float(r.err_budget))]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, alpha: complex = 0j, l: int = 1, weight_name: str = "bump12") -> "ResidualTable":
        rd = csv.reader(io.StringIO(text))
        header = next(rd, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in rd:
            if not rec:
                continue
            v = [float(x) for x in rec]
            rows.append(ResidualRow(v[0], complex(v[1], v[2]), complex(v[3], v[4]), complex(v[5], v[6]), v[7]))
        return cls(tuple(rows), alpha, l, weight_name)


def geometric_grid(xmin: float, xmax: float, points: int) -> list[float]:
    if points < 1 or xmin <= 0 or xmax < xmin:
        raise ValueError("need points >= 1 and 0 < xmin <= xmax")
    if points == 1:
        return [float(xmin)]
    r = (xmax / xmin) ** (1 / (points - 1))
    return [float(xmin * r**k) for k in range(points)]


def _afe_budget(ds: np.ndarray, eng: AfeEngine) -> np.ndarray:
    """Per-d absolute error bound: AFE_TERM_EPS times sum_{n <= cut sqrt d} n^{-1/2 + |Re a|} for both sums."""
    ca, cb = eng.cuts(int(ds.max()))
    e = abs(eng.alpha.real)
    n = np.maximum(ca, cb) * np.sqrt(ds.astype(float))
    return AFE_TERM_EPS * 2 * 2 * n ** (0.5 + e) / (1 + 2 * e)


def residual_scan(
    Xs: Sequence[float],
    st: ShiftTwist,
    weight: BumpWeight = DEFAULT_WEIGHT,
    afe: AfeParams = AfeParams(),
    *,
    workers: int | None = None,
    use_cache: bool = True,
    seed: int = 0,
) -> ResidualTable:
    """brute - main over a grid of X; L-values are computed once per d and reused across X."""
    Xs = sorted(float(x) for x in Xs)
    for X in Xs:
        MomentRequest(X, st, weight, afe)
    workers = workers or default_workers()
    rows = []
    if use_cache:
        windows = [window_ds(X, weight) for X in Xs]
        all_ds = np.unique(np.concatenate(windows)) if windows else np.zeros(0, np.int64)
        eng = AfeEngine(st.alpha, afe)
        vals = eng.values(all_ds, workers) * _chi8d_l(all_ds, st.l)
        budget = _afe_budget(all_ds, eng) if all_ds.size else all_ds
    for X in Xs:
        if use_cache:
            lo, hi = weight.support
            sel = (all_ds > lo * X) & (all_ds < hi * X)
            ds = all_ds[sel]
            w = np.asarray(weight.evaluate(ds / X))
            brute = _fsum_c(vals[sel] * w)
            err = math.fsum(budget[sel] * np.abs(w))
        else:
            brute = brute_moment(MomentRequest(X, st, weight, afe), workers)
            ds = window_ds(X, weight)
            err = math.fsum(_afe_budget(ds, AfeEngine(st.alpha, afe)) * np.abs(weight.evaluate(ds / X))) if ds.size else 0.0
        main = main_term_auto(X, st, weight)
        err += MAIN_TERM_REL_EPS * abs(main)
        rows.append(ResidualRow(X, brute, main, brute - main, err))
    return ResidualTable(tuple(rows), st.alpha, st.l, weight.name, seed)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    robust_slope: float
    robust_low: float
    robust_high: float


def fit_exponent(table: ResidualTable | Sequence[tuple[float, complex]]) -> ExponentFit:
    """Least-squares slope of log|residual| against log X, plus the Theil-Sen slope."""
    if isinstance(table, ResidualTable):
        pts = [(r.X, r.residual) for r in table.rows]
    else:
        pts = list(table)
    if len(pts) < 5:
        raise ValueError("fit_exponent needs at least 5 rows")
    x = np.log([float(p[0]) for p in pts])
    r = np.abs([complex(p[1]) for p in pts])
    if np.any(r == 0) or not np.all(np.isfinite(r)):
        raise ValueError("all residuals must be finite and nonzero")
    y = np.log(r)
    lin = stats.linregress(x, y)
    ts = stats.theilslopes(y, x)
    return ExponentFit(float(lin.slope), float(lin.stderr), float(lin.intercept), float(ts.slope), float(ts.low_slope), float(ts.high_slope))


def recursion_schedule(f0, n: int) -> list:
    """[f_0, ..., f_n] with f_{k+1} = (f_k + 1/2)/2; exact for Fraction or dyadic input."""
    if not (Fraction(1, 2) <= Fraction(f0) <= 1):
        raise ValueError(f"f0 must lie in [1/2, 1], got {f0}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = [f0]
    for _ in range(n):
        out.append((out[-1] * 2 + 1) / 4)
    return out
