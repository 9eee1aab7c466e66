import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apsq.errors import InvalidArgument
from apsq.expsums import (
    ComplexAccumulator,
    GaussSumArgs,
    SalieGrid,
    SalieParams,
    conjecture3_bound,
    conjecture_ratio_scan,
    e_rational,
    e_real,
    gauss_sum_closed,
    gauss_sum_direct,
    lemma2_bound,
    lemma2_pair,
    salie_sum,
    scan_moduli,
)


def _factor(q):
    out, p = [], 3
    while p * p <= q:
        while q % p == 0:
            out.append(p)
            q //= p
        p += 2
    if q > 1:
        out.append(q)
    return out


def legendre_product(h, q):
    """Jacobi symbol as a product of Euler-criterion Legendre symbols over the prime factors."""
    v = 1
    for p in _factor(q):
        r = pow(h % p, (p - 1) // 2, p)
        v *= 0 if h % p == 0 else (1 if r == 1 else -1)
    return v


def naive_salie(a, q, H, K, lam, mu):
    total = 0j
    for h in range(1, H + 1):
        if math.gcd(h, q) != 1:
            continue
        hbar = pow(h, -1, q)
        chi = legendre_product(h, q)
        for k in range(K):
            total += chi * cmath.exp(2j * math.pi * (lam * h + mu * k + a * hbar * k * k / q))
    return total


def naive_gauss(a, b, q):
    return sum(cmath.exp(2j * math.pi * ((a * n * n + b * n) % q) / q) for n in range(q))


odd_q = st.integers(1, 499).map(lambda k: 2 * k + 1)


@given(odd_q, st.integers(-50, 50), st.integers(1, 20), st.integers(1, 20), st.floats(-2, 2), st.floats(-2, 2))
def test_salie_matches_naive(q, a, H, K, lam, mu):
    if math.gcd(a, q) != 1:
        with pytest.raises(InvalidArgument):
            salie_sum(SalieParams(a, q, H, K, lam, mu))
        return
    got = salie_sum(SalieParams(a, q, H, K, lam, mu))
    want = naive_salie(a, q, H, K, lam, mu)
    assert abs(complex(got) - want) <= 1e-9 * (H * K + 1)
    assert got.abs_error_bound < 1e-9 * (H * K + 1)


def test_salie_trivial_sizes():
    s = salie_sum(SalieParams(1, 7, 1, 1))
    assert abs(complex(s) - 1) < 1e-15


@given(odd_q, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_gauss_closed_matches_direct(q, a, b):
    g = GaussSumArgs(a, b, q)
    direct = gauss_sum_direct(g)
    assert abs(complex(direct) - naive_gauss(a, b, q)) < 1e-9 * q
    if math.gcd(a, q) != 1:
        with pytest.raises(InvalidArgument):
            gauss_sum_closed(g)
        return
    closed = gauss_sum_closed(g)
    assert abs(complex(direct) - complex(closed)) <= 1e-9 * math.sqrt(q)
    assert abs(abs(closed) - math.sqrt(q)) <= 1e-12 * math.sqrt(q)


def test_gauss_examples():
    assert abs(complex(gauss_sum_direct(GaussSumArgs(0, 0, 5))) - 5) < 1e-12
    assert abs(complex(gauss_sum_closed(GaussSumArgs(1, 0, 3))) - 1j * math.sqrt(3)) < 1e-12
    assert abs(complex(gauss_sum_closed(GaussSumArgs(1, 0, 5))) - math.sqrt(5)) < 1e-12
    # q = 9, a = 2: gcd 1, closed form still applies to prime powers
    assert abs(complex(gauss_sum_closed(GaussSumArgs(2, 0, 9))) - 3) < 1e-12
    assert abs(complex(gauss_sum_direct(GaussSumArgs(2, 0, 9))) - 3) < 1e-12
    with pytest.raises(InvalidArgument):
        gauss_sum_closed(GaussSumArgs(1, 0, 8))


@given(st.integers(-10**12, 10**12), st.integers(1, 10**6))
def test_e_rational_against_mpmath(num, den):
    z = e_rational(num, den)
    with mpmath.workdps(40):
        ref = mpmath.expjpi(2 * mpmath.mpf(num % den) / den)
    assert abs(z - complex(ref)) <= 6 * 2.220446049250313e-16


@given(st.floats(-1e6, 1e6))
def test_e_real_error_bound(u):
    z, err = e_real(u)
    with mpmath.workdps(40):
        ref = mpmath.expjpi(2 * mpmath.mpf(u))
    assert abs(z - complex(ref)) <= err


def test_accumulator_bound_holds():
    rng = random.Random(3)
    for _ in range(50):
        terms = [complex(rng.uniform(-1, 1) * 10 ** rng.randint(-8, 8), rng.uniform(-1, 1)) for _ in range(500)]
        acc = ComplexAccumulator()
        for z in terms:
            acc.add(z)
        v = acc.value()
        re = math.fsum(z.real for z in terms)
        im = math.fsum(z.imag for z in terms)
        assert abs(v.re - re) + abs(v.im - im) <= v.abs_error_bound + 1e-300


def test_bound_formulas():
    s = SalieParams(1, 257, 16, 16, epsilon=0.0)
    r = 1 / math.sqrt(257)
    want = 16 + 16**0.75 + 16 + r * 256 + r * 256
    assert conjecture3_bound(s) == pytest.approx(want, rel=1e-14)
    assert conjecture3_bound(SalieParams(1, 257, 16, 16)) == pytest.approx(want * 257**0.05, rel=1e-14)
    assert lemma2_bound(SalieParams(1, 9, 1, 1, epsilon=0.0)) == pytest.approx(3 + 3 + 3 + 1 + 1)


def test_gauss_average_matches_naive():
    for q, H, K, lam, mu, sign in [(9, 1, 1, 0, 0, 1), (15, 5, 7, 0.3, 0.7, 1), (21, 6, 4, 0.1, 0.2, -1)]:
        got, bound = lemma2_pair(SalieParams(1, q, H, K, lam, mu), sign)
        want = sum(
            cmath.exp(2j * math.pi * (mu * k + lam * h)) * naive_gauss(h, sign * k, q)
            for k in range(K)
            for h in range(1, H + 1)
            if math.gcd(h, q) == 1
        )
        assert abs(complex(got) - want) < 1e-9 * q * H * K
        assert bound > 0
    got, bound = lemma2_pair(SalieParams(1, 9, 1, 1, epsilon=0.0))
    assert abs(complex(got) - 3) < 1e-12 and bound == pytest.approx(11.0)


def test_scan_skips_squares_and_is_ordered():
    assert 9 not in scan_moduli(30) and 25 not in scan_moduli(30)
    assert 9 in scan_moduli(30, include_squares=True)
    rows = conjecture_ratio_scan(41, SalieGrid(a_values=(1, 3)))
    keys = [(r.q, r.a, r.H, r.K, r.lam, r.mu) for r in rows]
    assert keys == sorted(keys)
    assert all(math.gcd(r.a, r.q) == 1 for r in rows)
    assert all(math.isfinite(r.ratio) and r.ratio >= 0 for r in rows)


def test_validation():
    with pytest.raises(InvalidArgument):
        salie_sum(SalieParams(1, 8, 1, 1))
    with pytest.raises(InvalidArgument):
        salie_sum(SalieParams(1, 7, 0, 1))
    with pytest.raises(InvalidArgument):
        salie_sum(SalieParams(1, 7, 1, 1, epsilon=-1))
