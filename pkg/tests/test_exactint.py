import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apsq.errors import InvalidArgument
from apsq.exactint import (
    ceil_isqrt,
    cmp_monomial,
    ge_sqrt,
    gt_sqrt,
    is_square,
    isqrt,
    jacobi,
    le_sqrt,
    lt_sqrt,
    mod_inverse,
    monomial,
    nearest_square_distance,
)

big = st.integers(min_value=0, max_value=10**60)


@given(big)
def test_isqrt_brackets(x):
    r = isqrt(x)
    assert r * r <= x < (r + 1) ** 2


@given(big)
def test_ceil_isqrt(x):
    c = ceil_isqrt(x)
    assert c * c >= x
    assert c == 0 or (c - 1) ** 2 < x


def test_isqrt_examples():
    assert [isqrt(x) for x in (0, 1, 3, 4, 15, 16, 10**40)] == [0, 1, 1, 2, 3, 4, 10**20]
    with pytest.raises(InvalidArgument):
        isqrt(-1)


@given(st.integers(min_value=0, max_value=10**30))
def test_is_square(x):
    assert is_square(x * x)
    assert is_square(x * x + 2 * x + 1)
    if x > 0:
        assert not is_square(x * x + 1) or x == 0


def _nearest_brute(x):
    best = None
    for m in range(0, math.isqrt(x) + 3):
        cand = (abs(x - m * m), m)
        if best is None or cand < best:
            best = cand
    return best


@given(st.integers(min_value=0, max_value=10**5))
def test_nearest_square_matches_scan(x):
    assert nearest_square_distance(x) == _nearest_brute(x)


@given(big)
def test_nearest_square_within_two_roots(x):
    dist, m = nearest_square_distance(x)
    assert dist == abs(x - m * m)
    assert dist * dist <= 4 * x


def test_nearest_square_examples():
    # an integer is never equidistant from two consecutive squares
    assert nearest_square_distance(0) == (0, 0)
    assert nearest_square_distance(2) == (1, 1)
    # x = m^2 + m is at distance m from m^2 and m + 1 from (m+1)^2
    assert nearest_square_distance(12) == (3, 3)


def _legendre(h, p):
    h %= p
    if h == 0:
        return 0
    return 1 if pow(h, (p - 1) // 2, p) == 1 else -1


PRIMES = [3, 5, 7, 11, 13, 101, 997, 7919]


@given(st.integers(min_value=-10**6, max_value=10**6), st.sampled_from(PRIMES))
def test_jacobi_is_euler_criterion_for_primes(h, p):
    assert jacobi(h, p) == _legendre(h, p)


@given(st.integers(min_value=-1000, max_value=1000), st.sampled_from(PRIMES), st.sampled_from(PRIMES))
def test_jacobi_multiplicative_in_modulus(h, p, r):
    assert jacobi(h, p * r) == _legendre(h, p) * _legendre(h, r)


def test_jacobi_rejects_even_modulus():
    for q in (0, 2, 10, -3):
        with pytest.raises(InvalidArgument):
            jacobi(1, q)


@given(st.integers(min_value=-10**9, max_value=10**9), st.integers(min_value=2, max_value=10**6))
def test_mod_inverse(h, q):
    if math.gcd(h, q) != 1:
        with pytest.raises(InvalidArgument):
            mod_inverse(h, q)
    else:
        inv = mod_inverse(h, q)
        assert 0 <= inv < q and (h * inv) % q == 1


def test_mod_inverse_modulus_one():
    with pytest.raises(InvalidArgument):
        mod_inverse(1, 1)


factors = st.lists(st.tuples(st.integers(min_value=1, max_value=10**6), st.integers(min_value=0, max_value=5)), max_size=3)


@given(st.integers(min_value=1, max_value=10**7), factors, st.integers(min_value=1, max_value=10**7), factors)
def test_cmp_monomial(c1, f1, c2, f2):
    lhs, rhs = monomial(c1, f1), monomial(c2, f2)
    assert cmp_monomial(c1, f1, c2, f2) == (lhs > rhs) - (lhs < rhs)


@settings(max_examples=300)
@given(st.integers(min_value=-10**12, max_value=10**12), st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=10**12))
def test_sqrt_comparisons_against_high_precision(lhs, c, r):
    with mpmath.workdps(80):
        rhs = c * mpmath.sqrt(r)
        if lhs == rhs:  # exact ties only happen when r is a square
            assert le_sqrt(lhs, c, r) and ge_sqrt(lhs, c, r)
            assert not lt_sqrt(lhs, c, r) and not gt_sqrt(lhs, c, r)
            return
        assert lt_sqrt(lhs, c, r) == (lhs < rhs)
        assert le_sqrt(lhs, c, r) == (lhs < rhs)
        assert gt_sqrt(lhs, c, r) == (lhs > rhs)
        assert ge_sqrt(lhs, c, r) == (lhs > rhs)


def test_sqrt_comparison_ties():
    assert le_sqrt(6, 2, 9) and ge_sqrt(6, 2, 9)
    assert not lt_sqrt(6, 2, 9) and not gt_sqrt(6, 2, 9)
    assert lt_sqrt(Fraction(-1, 2), 0, 5)
