import cmath
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from qlmoment import moment as M
from qlmoment.series import b_alpha
from qlmoment.weights import DEFAULT_WEIGHT, ContourSpec

X0 = 1000.0


# ---------------------------------------------------------------- brute moment

def test_request_validation():
    with pytest.raises(ValueError):
        M.ShiftTwist(0.1, 9)
    with pytest.raises(ValueError):
        M.MomentRequest(8, M.ShiftTwist(0))


def test_empty_window():
    assert M.window_ds(0.5, DEFAULT_WEIGHT).size == 0


def test_window_contents():
    ds = M.window_ds(20, DEFAULT_WEIGHT)
    assert list(ds) == [21, 23, 29, 31, 33, 35, 37, 39]


def test_chi_twist():
    from qlmoment.arith import chi8d

    ds = M.window_ds(200, DEFAULT_WEIGHT)
    for l in (3, 15):
        assert list(M._chi8d_l(ds, l)) == [chi8d(int(d), l) for d in ds]


def test_brute_moment_workers_identical():
    req = M.MomentRequest(2048, M.ShiftTwist(0.03 + 0.01j, 3))
    base = M.brute_moment(req, 1)
    for w in (4, 8):
        assert abs(M.brute_moment(req, w) - base) <= 1e-12 * abs(base)


# ---------------------------------------------------------------- main term

def test_main_term_frozen():
    # mpmath evaluation with an independent Euler product
    assert abs(M.main_term(X0, M.ShiftTwist(0.1)) - 5.110472183499264) < 1e-8
    assert abs(M.main_term_alpha0(4096) - 28.67770199266491) < 1e-7
    assert abs(M.main_term_alpha0(4096, 3) - 10.52154546666515) < 1e-7


def test_second_addend_scales_like_x_power():
    st = M.ShiftTwist(0.1)
    h = 1e-4
    a2 = lambda X: M.main_term_parts(X, st)[1]
    slope = (cmath.log(a2(X0 * math.exp(h))) - cmath.log(a2(X0 * math.exp(-h)))) / (2 * h)
    assert abs(slope - 0.9) < 1e-8
    a1 = lambda X: M.main_term_parts(X, st)[0]
    slope1 = (cmath.log(a1(X0 * math.exp(h))) - cmath.log(a1(X0 * math.exp(-h)))) / (2 * h)
    assert abs(slope1 - 1) < 1e-8


def test_involution_twice_is_identity():
    st = M.ShiftTwist(0.07, 3)
    twice = M.involution(M.involution(M.main_term))
    assert abs(twice(X0, st) - M.main_term(X0, st)) <= 1e-10 * abs(M.main_term(X0, st))


def test_involution_swaps_addends():
    st = M.ShiftTwist(0.05 + 0.02j, 15)
    first = lambda X, s, w: M.main_term_parts(X, s, w)[0]
    a1, a2 = M.main_term_parts(X0, st)
    assert abs(M.involution(first)(X0, st) - a2) < 1e-12 * abs(a2)


@pytest.mark.parametrize("l", [3, 15])
def test_l_scaling(l):
    a = 0.06 + 0.03j
    r = M.main_term_parts(X0, M.ShiftTwist(a, l))[0] * l ** (0.5 + a) / M.main_term_parts(X0, M.ShiftTwist(a, 1))[0]
    assert abs(r - b_alpha(l, a) / b_alpha(1, a)) < 1e-13


def _theta_gap(X, d):
    v = [M.main_term(X, M.ShiftTwist(d * cmath.exp(1j * t))) for t in (0, math.pi, math.pi / 2, 3 * math.pi / 2)]
    return (v[0] + v[1]) / 2 - (v[2] + v[3]) / 2


def test_holomorphy_at_zero():
    # the two averages differ by f''(0) d^2 / 2 times 2: an exact d^2 law means no pole survives
    X = 4096
    g1, g2 = _theta_gap(X, 1e-3), _theta_gap(X, 5e-4)
    assert abs(g1 / g2 - 4) < 1e-3
    assert abs(g1) / X <= 1e-6


def test_alpha0_linear_in_log_x():
    f = [M.main_term_alpha0(2.0**k).real / 2.0**k for k in (10, 12, 14)]
    assert abs(f[0] - 2 * f[1] + f[2]) < 1e-6


def test_alpha0_delta_robust():
    a = M.main_term_alpha0(4096, delta=1e-3)
    b = M.main_term_alpha0(4096, delta=5e-4)
    assert abs(a - b) <= 1e-8 * abs(a)


def test_main_term_small_alpha_rejected():
    with pytest.raises(ValueError):
        M.main_term(X0, M.ShiftTwist(1e-5))
    assert M.main_term_auto(X0, M.ShiftTwist(0)) == M.main_term_alpha0(X0)


# ---------------------------------------------------------------- contour pieces

ST_A = M.ShiftTwist(0.04 + 0.02j, 1)


def test_pieces_reject_alpha_zero():
    with pytest.raises(ValueError):
        M.term_MN_k0(X0, M.ShiftTwist(0))


def test_empty_head_sums():
    assert M.term_MN_k0(X0, ST_A, Y=0.5) == 0
    assert M.term_MmN_k1(X0, ST_A, Y=0.5) == 0


def test_mn_k0_contour_independence():
    a = M.term_MN_k0(X0, ST_A, Y=10, contour=M.default_term_contour(X0, 0.05))
    b = M.term_MN_k0(X0, ST_A, Y=10, contour=M.default_term_contour(X0, 0.10))
    assert abs(a - b) < 1e-8 * abs(a)


def test_mmn_k1_contour_independence():
    a = M.term_MmN_k1(X0, ST_A, Y=10, contour=M.default_term_contour(X0, -0.05))
    b = M.term_MmN_k1(X0, ST_A, Y=10, contour=M.default_term_contour(X0, -0.025))
    assert abs(a - b) < 1e-8 * abs(a)


def test_mr1_height_doubling():
    c = M.default_term_contour(X0, 0.05)
    a = M.term_MR1(X0, ST_A, Y=10, contour=c)
    b = M.term_MR1(X0, ST_A, Y=10, contour=ContourSpec(c.abscissa, 2 * c.height, c.step, c.auto_extend, c.tail_tol))
    assert abs(a - b) < 1e-8 * max(1, abs(a))


def test_mmr2_height_doubling_and_unsimplified():
    c = M.default_term_contour(X0, -0.05)
    st = M.ShiftTwist(0.04 + 0.02j, 3)
    a = M.term_MmR2(X0, st, Y=10, contour=c)
    b = M.term_MmR2(X0, st, Y=10, contour=ContourSpec(c.abscissa, 2 * c.height, c.step, c.auto_extend, c.tail_tol))
    assert abs(a - b) < 1e-8 * max(1, abs(a))
    u = M.term_MmR2(X0, st, Y=10, contour=c, unsimplified=True)
    assert abs(a - u) < 1e-9 * max(1, abs(a))


def test_mr1_decays_in_y():
    assert abs(M.term_MR1(X0, ST_A, Y=1000)) < 1e-3 * abs(M.term_MR1(X0, ST_A, Y=10))


@pytest.mark.parametrize("st", [M.ShiftTwist(0.04 + 0.02j, 1), M.ShiftTwist(0.05j, 3)])
def test_y_invariance(st):
    plus = [M.term_MN_k0(X0, st, Y=y) + M.term_MR1(X0, st, Y=y) for y in (5, 50)]
    minus = [M.term_MmN_k1(X0, st, Y=y) + M.term_MmR2(X0, st, Y=y) for y in (5, 50)]
    assert abs(plus[0] - plus[1]) <= 1e-7 * abs(plus[0])
    assert abs(minus[0] - minus[1]) <= 1e-7 * abs(minus[0])


def test_mmn_k1_single_term_hand_assembled():
    # Y = 1 keeps only a = 1; assemble the integral with mpmath zeta/gamma and scipy quadrature
    st = M.ShiftTwist(0.04 + 0.02j, 3)
    a, l, c = st.alpha, st.l, -0.05

    def G(s):
        num = (a * a - s * s) * ((s - 0.5) ** 2 - a * a) * ((s + 0.5) ** 2 - a * a)
        return cmath.exp(s * s) * num / (a * a * (0.25 - a * a) ** 2)

    def f(t):
        s = complex(c, t)
        g = (8 / math.pi) ** (s / 2) * complex(mp.gamma((0.5 + a + s) / 2) / mp.gamma((0.5 + a) / 2))
        z2 = complex(mp.zeta(1 + 2 * a + 2 * s) * (1 - mp.mpf(2) ** (-(1 + 2 * a + 2 * s))))
        return DEFAULT_WEIGHT.mellin(1 + s / 2) * X0 ** (s / 2) * l ** (-a - s) * G(s) / s * g * z2

    re, _ = integrate.quad(lambda t: f(t).real, -9, 9, limit=400, epsabs=1e-13)
    im, _ = integrate.quad(lambda t: f(t).imag, -9, 9, limit=400, epsabs=1e-13)
    pref = -X0 / (2 * (math.pi**2 / 8) * math.sqrt(l)) / (1 + 1 / 3)
    ref = pref * complex(re, im) / (2 * math.pi)
    got = M.term_MmN_k1(X0, st, Y=1)
    assert abs(got - ref) <= 1e-9 * abs(ref)


def test_cancellation_l1():
    r = M.check_cancellation(X0, ST_A, Y=10)
    assert r.rel_error <= 1e-6
    assert abs(r.lhs - (13.941274792490933 - 6.0055634843764025j)) < 1e-8


def test_cancellation_mirror():
    r = M.check_cancellation_mirror(X0, M.ShiftTwist(0.04 + 0.02j, 3), Y=10)
    assert r.rel_error <= 1e-6


def test_remark_literal_g_breaks_cancellation():
    from qlmoment.specfun import GSpec

    r = M.check_cancellation(X0, ST_A, Y=10, gspec=GSpec("remark-literal", ST_A.alpha))
    assert r.rel_error > 1e-2


# ---------------------------------------------------------------- residual scan and fit

def test_scan_single_point_and_cache():
    st = M.ShiftTwist(0.02, 3)
    t1 = M.residual_scan([300.0, 600.0], st)
    t2 = M.residual_scan([300.0, 600.0], st, use_cache=False)
    for r1, r2 in zip(t1.rows, t2.rows):
        assert abs(r1.brute - r2.brute) <= 1e-12 * abs(r1.brute)
        assert r1.residual == r1.brute - r1.main
    one = M.residual_scan([300.0], st).rows[0]
    brute = M.brute_moment(M.MomentRequest(300.0, st))
    assert abs(one.residual - (brute - M.main_term(300.0, st))) < 1e-12 * abs(brute)


def test_csv_roundtrip():
    t = M.residual_scan([256.0, 512.0], M.ShiftTwist(0))
    text = t.to_csv()
    assert text.splitlines()[0] == ",".join(M.CSV_HEADER)
    back = M.ResidualTable.from_csv(text)
    assert back.rows == t.rows
    with pytest.raises(ValueError):
        M.ResidualTable.from_csv("a,b\n1,2\n")


def test_geometric_grid():
    assert M.geometric_grid(2**10, 2**17, 8) == [2.0**k for k in range(10, 18)]
    with pytest.raises(ValueError):
        M.geometric_grid(10, 5, 3)


def test_fit_exact_power_law():
    Xs = [2.0**k for k in range(10, 18)]
    fit = M.fit_exponent([(x, 3.7 * x**0.5) for x in Xs])
    assert abs(fit.slope - 0.5) < 1e-9
    assert abs(fit.robust_slope - 0.5) < 1e-9


def test_fit_oscillating_power_law():
    Xs = [2.0**k for k in range(10, 18)]
    fit = M.fit_exponent([(x, 0.2 * x**0.75 * (1 + 0.1 * math.sin(math.log(x)))) for x in Xs])
    assert 0.70 <= fit.slope <= 0.80


def test_fit_degenerate():
    with pytest.raises(ValueError):
        M.fit_exponent([(1.0, 1.0)] * 4)
    with pytest.raises(ValueError):
        M.fit_exponent([(float(k), 0.0 if k == 3 else 1.0) for k in range(1, 7)])


# ---------------------------------------------------------------- recursion

def test_recursion_exact():
    assert M.recursion_schedule(1, 3) == [1, Fraction(3, 4), Fraction(5, 8), Fraction(9, 16)]
    assert M.recursion_schedule(Fraction(1, 2), 4) == [Fraction(1, 2)] * 5


def test_recursion_monotone():
    seq = M.recursion_schedule(Fraction(9, 10), 40)
    assert all(a > b for a, b in zip(seq, seq[1:]))
    assert abs(seq[-1] - Fraction(1, 2)) < Fraction(1, 10**12)
    with pytest.raises(ValueError):
        M.recursion_schedule(Fraction(2), 1)
