import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from qlmoment import arith


def euler_criterion(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


@given(st.integers(-10**6, 10**6), st.sampled_from(list(sympy.primerange(3, 200))))
def test_jacobi_prime_is_euler_criterion(a, p):
    assert arith.jacobi(a, p) == euler_criterion(a, p)


@given(st.integers(-1000, 1000), st.integers(1, 400), st.integers(1, 400))
def test_jacobi_multiplicative_in_modulus(a, m, n):
    m, n = 2 * m - 1, 2 * n - 1
    assert arith.jacobi(a, m * n) == arith.jacobi(a, m) * arith.jacobi(a, n)


def test_jacobi_rejects_even_modulus():
    with pytest.raises(ValueError):
        arith.jacobi(3, 8)


@pytest.mark.parametrize("a,n,expected", [(2, 7, 1), (2, 3, -1), (5, 2, -1), (1, 2, 1), (3, 2, -1), (4, 2, 0), (-1, 3, -1)])
def test_kronecker_small(a, n, expected):
    assert arith.kronecker(a, n) == expected


@given(st.integers(1, 20000))
def test_factorize_matches_sympy(n):
    assert arith.factorize(n) == {int(p): e for p, e in sympy.factorint(n).items()}


@given(st.integers(1, 20000))
def test_phi_and_mu_match_sympy(n):
    assert arith.euler_phi(n) == int(sympy.totient(n))
    assert arith.moebius(n) == int(sympy.mobius(n))


def test_sieve_tables_match_pointwise():
    t = arith.build_sieves(3000)
    for n in range(1, 3001, 7):
        assert t.moebius[n] == arith.moebius(n)
        assert t.totient[n] == arith.euler_phi(n)
    assert all(arith.is_squarefree(int(d)) and d % 2 == 1 for d in t.odd_squarefree)
    with pytest.raises(ValueError):
        t.moebius[3] = 0


def test_sieve_cap():
    with pytest.raises(MemoryError):
        arith.build_sieves(arith.SIEVE_LIMIT_CAP + 1)


def test_odd_squarefree_validation():
    assert arith.check_odd_squarefree(15) == 15
    for bad in (9, 2, 0, -3):
        with pytest.raises(ValueError):
            arith.check_odd_squarefree(bad)


@given(st.integers(1, 3000).map(lambda k: 2 * k - 1).filter(arith.is_squarefree), st.integers(1, 500))
def test_chi8d_is_kronecker(d, n):
    assert arith.chi8d(d, n) == (0 if n % 2 == 0 else arith.kronecker(8 * d, n))


def test_jacobi_table():
    n = 105
    tab = arith.jacobi_table(n)
    assert [int(x) for x in tab] == [arith.jacobi(a, n) for a in range(n)]


def test_squarefree_coprime():
    a, mu = arith.squarefree_coprime(50, 6)
    assert list(a) == [n for n in range(1, 51) if arith.is_squarefree(n) and np.gcd(n, 6) == 1]
    assert list(mu) == [arith.moebius(int(n)) for n in a]
