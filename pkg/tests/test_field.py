from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from mhecke.errors import IncompatibleTower, NotFundamental
from mhecke.field import (
    QuadTowerNumber, divisors, factorint, is_fundamental, kronecker, mobius, sigma, simplify,
    sqrt_of, squarefree_decomposition,
)
from mhecke.harness import character_sum_failures

Q = QuadTowerNumber


def legendre_by_counting(a, p):
    """Oracle: 1 + #{x : x^2 = a mod p} - 2 for an odd prime p."""
    if a % p == 0:
        return 0
    return sum(1 for x in range(p) if (x * x - a) % p == 0) - 1


def kronecker_oracle(D, n):
    """Factor n and multiply local symbols; 2 handled by D mod 8."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        out = -1 if D < 0 else 1
    for p in range(2, n + 1):
        while n % p == 0:
            n //= p
            if p == 2:
                out *= 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
            else:
                out *= legendre_by_counting(D, p)
    return out


def test_kronecker_examples():
    assert [kronecker(8, n) for n in (1, 3, 5, 7)] == [1, -1, -1, 1]
    assert kronecker(8, 2) == 0
    assert kronecker(13, 3) == 1
    assert kronecker(-4, 3) == -1
    assert kronecker(5, 0) == 0 and kronecker(1, 0) == 1 and kronecker(-1, 0) == 1


@pytest.mark.parametrize("D", [-23, -4, -3, 1, 5, 8, 12, 13, 17, 21, 24, 40])
def test_kronecker_against_counting_oracle(D):
    for n in range(-30, 120):
        assert kronecker(D, n) == kronecker_oracle(D, n), (D, n)


@pytest.mark.parametrize("D", [5, 8, 13, 17, 21, 24, 28, 33])
def test_kronecker_periodic_and_multiplicative(D):
    for m in range(1, 200):
        assert kronecker(D, m + D) == kronecker(D, m)
        for n in range(1, 60):
            assert kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n)


@pytest.mark.parametrize("D", [5, 8, 13, 17, 21, 24])
def test_gauss_sum_identity(D):
    with mpmath.workprec(200):
        _check_gauss(D)


def _check_gauss(D):
    zeta = mpmath.exp(2j * mpmath.pi / D)
    for r in range(1, D + 1):
        s = mpmath.fsum(kronecker(D, m) * zeta ** (m * r) for m in range(1, D))
        assert abs(s - mpmath.sqrt(D) * kronecker(D, r)) < mpmath.mpf(10) ** -50


def test_character_sum_vanishes():
    assert character_sum_failures(120) == []


def test_number_theory_helpers():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert sigma(12) == 28 and sigma(1) == 1 and sigma(2) == 3
    for n in range(1, 300):
        assert divisors(n) == [d for d in range(1, n + 1) if n % d == 0]
        prod = 1
        for p, e in factorint(n) if n > 1 else ():
            prod *= p**e
        assert prod == n
    # sum of mobius over divisors is [n == 1]
    for n in range(1, 200):
        assert sum(mobius(d) for d in divisors(n)) == (1 if n == 1 else 0)
    assert squarefree_decomposition(72) == (6, 2)
    assert squarefree_decomposition(-12) == (2, -3)


def test_is_fundamental():
    fund = [D for D in range(1, 60) if is_fundamental(D)]
    assert fund == [1, 5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 57]
    assert not is_fundamental(4) and not is_fundamental(9) and not is_fundamental(0)


def test_sqrt_of():
    assert sqrt_of(8) == 2 * Q.sqrt(2)
    assert sqrt_of(1) == 1
    assert sqrt_of(13) == Q.sqrt(13)
    with pytest.raises(NotFundamental):
        sqrt_of(9)


def test_arithmetic_examples():
    s2 = Q.sqrt(2)
    assert (1 + s2) * (1 - s2) == -1
    assert Q.sqrt(8) == 2 * s2
    assert 1 / s2 == Fraction(1, 2) * s2
    i3 = Q.sqrt(-3)
    assert i3 * i3 == -3
    assert Q.sqrt(-2) * Q.sqrt(-3) == -Q.sqrt(6)
    assert Q.sqrt(-3) * Q.sqrt(3) == 3 * Q.sqrt(-1)
    with pytest.raises(ZeroDivisionError):
        s2 / Q()
    with pytest.raises(IncompatibleTower):
        Q.sqrt(2) + Q.sqrt(3) + Q.sqrt(5)


def test_rendering_and_json():
    x = Fraction(-3, 2) - Fraction(3, 2) * Q.sqrt(-3)
    assert str(x) == "-3/2 - 3/2*sqrt(-3)"
    assert Q.parse(str(x)) == x
    assert Q.from_json(x.to_json()) == x
    y = Q.from_parts(2, -3, 1, 2, 3, 4)
    assert Q.from_json(y.to_json()) == y
    assert all(isinstance(v, str) for k, v in y.to_json().items())


def test_numeric_embedding():
    x = 3 + 2 * Q.sqrt(-3)
    with mpmath.workprec(100):
        z = x.to_complex(100)
        assert abs(z - mpmath.mpc(3, 2 * mpmath.sqrt(3))) < 1e-25


radicands = st.sampled_from([1, 2, -3, 6, -1])
fracs = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@st.composite
def tower_elements(draw):
    # everything lives in Q(sqrt 2, sqrt -3)
    return Q.from_parts(2, -3, draw(fracs), draw(fracs), draw(fracs), draw(fracs))


@given(tower_elements(), tower_elements(), tower_elements())
def test_field_axioms(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0 and a + 0 == a and a * 1 == a
    if a:
        assert a * a.inverse() == 1
        assert (b / a) * a == b


@given(tower_elements())
def test_norm_is_rational_and_conjugates_multiply(a):
    n = a.norm()
    assert isinstance(n, Fraction)
    prod = Q({1: Fraction(1)})
    for c in a.conjugates():
        prod = prod * c
    assert prod == n


@given(tower_elements())
def test_canonicalization_idempotent(a):
    b = Q.parse(str(a))
    assert b == a and str(b) == str(a)
    assert simplify(a - a.coefficient(1) + a.coefficient(1)) == simplify(a)
    assert hash(simplify(Q({1: Fraction(5)}))) == hash(5)
