import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlmoment import gauss
from qlmoment.weights import DEFAULT_WEIGHT


def test_small_examples():
    assert abs(gauss.gauss_brute(5, 1) - 1) < 1e-15
    assert abs(gauss.gauss_brute(1, 3) - math.sqrt(3)) < 1e-14
    assert abs(gauss.gauss_brute(0, 3)) < 1e-14
    assert gauss.gauss_closed(0, 9) == 6
    assert gauss.gauss_closed(3, 9) == -3
    assert abs(gauss.gauss_closed(1, 15) - gauss.gauss_closed(1, 3) * gauss.gauss_closed(1, 5)) < 1e-15


def test_rejects_even_modulus():
    with pytest.raises(ValueError):
        gauss.gauss_closed(1, 4)
    with pytest.raises(ValueError):
        gauss.gauss_brute(1, 0)


@given(st.integers(-500, 500), st.integers(0, 600).map(lambda m: 2 * m + 1))
def test_closed_equals_brute(k, n):
    assert abs(gauss.gauss_closed(k, n) - gauss.gauss_brute(k, n)) <= 1e-9 * n


@given(st.integers(-300, 300), st.integers(0, 60).map(lambda m: 2 * m + 1), st.integers(0, 60).map(lambda m: 2 * m + 1))
def test_multiplicative(k, m, n):
    if math.gcd(m, n) != 1:
        return
    assert abs(gauss.gauss_closed(k, m * n) - gauss.gauss_closed(k, m) * gauss.gauss_closed(k, n)) < 1e-9


def test_brute_values_are_real():
    for n in (1, 3, 9, 45, 105, 243):
        assert np.max(np.abs(gauss.gauss_brute_all(n).imag)) < 1e-9 * n


def test_vectorized_matches_scalar():
    ks = np.arange(-40, 41)
    for n in (27, 75, 225):
        assert np.array_equal(gauss.gauss_closed_vec(ks, n), [gauss.gauss_closed(int(k), n) for k in ks])


def test_sweep_small():
    worst, _ = gauss.gauss_sweep(200, 20)
    assert worst <= 1e-9


def test_fhat_properties():
    f = lambda x: float(DEFAULT_WEIGHT.evaluate(x))
    assert abs(gauss.fhat(f, 0.0) - DEFAULT_WEIGHT.mellin(1.0)) < 1e-13
    assert abs(gauss.fhat(lambda x: 2 * f(x), 1.7) - 2 * gauss.fhat(f, 1.7)) < 1e-14
    for y in (50.0, -50.0, 80.0):
        assert abs(gauss.fhat(f, y)) <= 1e-6


@pytest.mark.parametrize("n,Z", [(1, 500), (3, 1000), (15, 1000), (5, 1000), (9, 1000), (45, 1000)])
def test_poisson(n, Z):
    lhs, rhs = gauss.poisson_check(n, Z)
    assert abs(lhs - rhs) <= 1e-6


def test_poisson_tail_guard():
    with pytest.raises(gauss.TailNotConverged):
        gauss.poisson_check(45, 1000, kmax=2)
