"""Exact integer primitives.

Nothing in here touches floating point. Every function accepts Python ints of
any size.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Tuple

from apsq.errors import InvalidArgument

Factors = Sequence[Tuple[int, int]]


def _check_nat(x: int, name: str = "x") -> None:
    if not isinstance(x, int) or isinstance(x, bool):
        raise InvalidArgument(f"{name} must be an int, got {type(x).__name__}")
    if x < 0:
        raise InvalidArgument(f"{name} must be nonnegative, got {x}")


def isqrt(x: int) -> int:
    """Largest r with r*r <= x."""
    _check_nat(x)
    return math.isqrt(x)


def ceil_isqrt(x: int) -> int:
    """Smallest r with r*r >= x."""
    _check_nat(x)
    r = math.isqrt(x)
    return r if r * r == x else r + 1


def is_square(x: int) -> bool:
    if x < 0:
        return False
    r = math.isqrt(x)
    return r * r == x


def nearest_square_distance(x: int) -> tuple[int, int]:
    """Distance from ``x`` to the nearest perfect square, and that square's root.

    Ties go to the smaller root. The distance never exceeds ``2*sqrt(x)``.

    >>> nearest_square_distance(8)
    (1, 3)
    >>> nearest_square_distance(0)
    (0, 0)
    """
    _check_nat(x)
    r = math.isqrt(x)
    below = x - r * r
    above = (r + 1) * (r + 1) - x
    if below <= above:
        return below, r
    return above, r + 1


def jacobi(h: int, q: int) -> int:
    """Jacobi symbol (h/q) for odd positive q."""
    if not isinstance(q, int) or q < 1 or q % 2 == 0:
        raise InvalidArgument(f"Jacobi symbol needs odd q >= 1, got q={q}")
    h %= q
    result = 1
    while h:
        while h % 2 == 0:
            h //= 2
            if q % 8 in (3, 5):
                result = -result
        h, q = q, h
        if h % 4 == 3 and q % 4 == 3:
            result = -result
        h %= q
    return result if q == 1 else 0


def mod_inverse(h: int, q: int) -> int:
    """The inverse of h modulo q, in [1, q-1]."""
    if q < 2:
        raise InvalidArgument(f"modulus must be >= 2, got {q}")
    if math.gcd(h, q) != 1:
        raise InvalidArgument(f"{h} is not invertible modulo {q}")
    return pow(h, -1, q)


def monomial(coeff: int, factors: Iterable[tuple[int, int]]) -> int:
    value = coeff
    for base, exp in factors:
        _check_nat(base, "base")
        _check_nat(exp, "exponent")
        value *= base**exp
    return value


def cmp_monomial(lhs_coeff: int, lhs_factors: Factors, rhs_coeff: int, rhs_factors: Factors) -> int:
    """Three-way comparison of two integer monomials: -1, 0 or +1.

    Used for thresholds with fractional exponents after raising both sides to
    a common power, e.g. ``a <= N**(4/3) d**(4/3) / 200`` becomes
    ``cmp_monomial(8_000_000, [(a, 3)], 1, [(N, 4), (d, 4)]) <= 0``.
    """
    _check_nat(lhs_coeff, "lhs_coeff")
    _check_nat(rhs_coeff, "rhs_coeff")
    lhs = monomial(lhs_coeff, lhs_factors)
    rhs = monomial(rhs_coeff, rhs_factors)
    return (lhs > rhs) - (lhs < rhs)


# Sign-aware comparisons against c*sqrt(r) with c, r >= 0. These are how the
# irrational quantities elsewhere get decided without floating point.


def lt_sqrt(lhs, coeff, radicand) -> bool:
    """lhs < coeff*sqrt(radicand), exactly, for int or Fraction arguments."""
    if coeff < 0 or radicand < 0:
        raise InvalidArgument("coefficient and radicand must be nonnegative")
    if lhs < 0:
        return True
    return lhs * lhs < coeff * coeff * radicand


def le_sqrt(lhs, coeff, radicand) -> bool:
    if coeff < 0 or radicand < 0:
        raise InvalidArgument("coefficient and radicand must be nonnegative")
    if lhs <= 0:
        return True
    return lhs * lhs <= coeff * coeff * radicand


def gt_sqrt(lhs, coeff, radicand) -> bool:
    """lhs > coeff*sqrt(radicand)."""
    return not le_sqrt(lhs, coeff, radicand)


def ge_sqrt(lhs, coeff, radicand) -> bool:
    return not lt_sqrt(lhs, coeff, radicand)
