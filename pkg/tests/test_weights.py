import math

import mpmath as mp
import numpy as np
import pytest

from qlmoment import weights as W
from qlmoment.specfun import GSpec


def test_bump_support_and_values():
    w = W.DEFAULT_WEIGHT
    assert w.support == (1.0, 2.0)
    assert w.evaluate(1.0) == 0 and w.evaluate(2.0) == 0 and w.evaluate(0.5) == 0
    assert abs(w.evaluate(1.5) - math.exp(-4)) < 1e-16
    with pytest.raises(ValueError):
        W.BumpWeight(2.0, 1.0)


def test_mellin_frozen_values():
    # mpmath quadrature at 30 digits
    assert abs(W.DEFAULT_WEIGHT.mellin(1.0) - 0.0070298584066096562392) < 1e-17
    ref = 0.0046205168618750029881 + 0.0047652886646495042585j
    assert abs(W.DEFAULT_WEIGHT.mellin(0.9 + 2j) - ref) < 1e-17


@pytest.mark.parametrize("s", [1.0, 0.5 + 10j, 1.2 - 40j, 0.95 + 120j])
def test_mellin_grid_vs_adaptive(s):
    assert abs(W.DEFAULT_WEIGHT.mellin(s) - W.mellin_phi(W.DEFAULT_WEIGHT, s)) < 1e-15


def test_shifted_weight_mellin():
    u = -0.07 + 0.02j
    sh = W.DEFAULT_WEIGHT.shifted(u)
    assert abs(sh.mellin(1.0) - W.DEFAULT_WEIGHT.mellin(1.0 + u)) < 1e-18
    assert abs(sh.evaluate(1.3) - 1.3**u * W.DEFAULT_WEIGHT.evaluate(1.3)) < 1e-18


def test_weight_by_name():
    assert W.weight_by_name() is W.DEFAULT_WEIGHT
    assert W.weight_by_name(support=(1, 3)).support == (1.0, 3.0)
    with pytest.raises(ValueError):
        W.weight_by_name("box")


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        W.ContourSpec(1.0, 1.0, 0.05)
    c = W.ContourSpec(1.0, 10.0, 0.1).with_abscissa(-0.5)
    assert c.abscissa == -0.5 and c.height == 10.0


def test_vertical_integral_gaussian():
    # (1/2 pi i) int e^{s^2} ds on Re s = 0 is 1/(2 sqrt(pi))
    val, tail = W.vertical_integral(lambda s: np.exp(s * s), W.ContourSpec(0.0, 8.0, 0.02))
    assert abs(val - 1 / (2 * math.sqrt(math.pi))) < 1e-14
    assert tail < 1e-12


@pytest.mark.parametrize("alpha,x,ref", [
    (0, 1.0, 0.18838027324813001172),
    (0.02, 0.7, 0.30677784704795111146),
    (0.05j, 2.0, 0.030287191582625902321 + 0.0038264362957722476832j),
])
def test_v_unit_matches_incomplete_gamma(alpha, x, ref):
    # G = 1: V_alpha(x) = Gamma(b, pi x^2 / 8)/Gamma(b), b = (1/2 + alpha)/2 (mpmath values)
    assert abs(W.v_alpha(x, alpha) - ref) < 1e-12


def test_v_gaussian_matches_mpmath_quad():
    a, x = 0.02, 1.3

    def f(t):
        s = 1 + 1j * t
        return mp.exp(s * s) / s * (8 / mp.pi) ** (s / 2) * mp.gamma((0.5 + a + s) / 2) / mp.gamma((0.5 + a) / 2) * mp.mpf(x) ** (-s)

    ref = complex(mp.quad(f, [-12, 0, 12])) / (2 * math.pi)
    assert abs(W.v_alpha(x, a, GSpec("gaussian")) - ref) < 1e-13


def test_v_gaussian_slow_decay():
    # e^{s^2} only makes V decay like exp(-(log x)^2/4): V_0(100) is not tiny
    v = W.v_alpha(100.0, 0.02, GSpec("gaussian"))
    assert 3e-4 < abs(v) < 6e-4


def test_v_small_x_limit():
    # 1 - V_0(x) ~ (pi x^2/8)^{1/4} / Gamma(5/4) as x -> 0
    x = 1e-4
    approx = 1 - (math.pi * x * x / 8) ** 0.25 / math.gamma(1.25)
    assert abs(W.v_alpha(x, 0.0) - approx) < 1e-4


def test_v_cache_matches_direct():
    cache = W.build_v_cache(0.02, GSpec(), xmax=64.0)
    xs = np.exp(np.linspace(math.log(1e-3), math.log(8.0), 97))
    assert np.max(np.abs(cache(xs) - W.v_alpha(xs, 0.02))) < 2e-12
    assert cache(cache.x_cut * 1.5) == 0
    with pytest.raises(ValueError):
        cache(1e-6)


def test_v_gaussian_small_x():
    # the pole at s = -1/2 leaves a correction of order x^{1/2}; mpmath quadrature value
    v = W.v_alpha(1e-6, 0.0, GSpec("gaussian"))
    assert abs(v - 0.998878582037579232735) < 1e-10
    assert abs(v - 1) < 2e-3


def test_v_contour_independence():
    g = GSpec("gaussian")
    c1 = W.ContourSpec(1.0, 8.0, 0.05)
    v1 = W.v_alpha(1.0, 0.02, g, c1)
    v2 = W.v_alpha(1.0, 0.02, g, c1.with_abscissa(2.0))
    assert abs(v1 - v2) < 1e-9


def test_v_cache_probes_and_monotone_tail():
    g = GSpec("gaussian")
    cache = W.build_v_cache(0.02, g, xmax=64.0)
    for x in (1.0, 64.0):
        if x < cache.x_cut:
            assert abs(cache(x) - W.v_alpha(x, 0.02, g)) < 1e-8
    xs = np.linspace(10, min(64.0, cache.x_cut * 0.99), 200)
    mags = np.abs(cache(xs))
    assert np.all(np.diff(mags) <= 1e-15)


def test_mellin_at_one_is_integral():
    from scipy import integrate

    val, _ = integrate.quad(W.DEFAULT_WEIGHT.evaluate, 1, 2, epsabs=1e-15, epsrel=1e-14, limit=400)
    assert abs(W.DEFAULT_WEIGHT.mellin(1.0) - val) < 1e-12
    u, s = 0.2, 1.3 + 1j
    assert abs(W.DEFAULT_WEIGHT.shifted(u).mellin(s) - W.DEFAULT_WEIGHT.mellin(s + u)) < 1e-15
