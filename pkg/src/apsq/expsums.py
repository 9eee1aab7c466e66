"""Gauss sums, the twisted incomplete Salie sum, and its Gauss-sum average.

All sums are accumulated in double precision with Neumaier compensation and
carry an explicit bound on their absolute rounding error.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

from apsq.errors import InvalidArgument
from apsq.exactint import is_square, jacobi, mod_inverse

EPS = sys.float_info.epsilon
TAU = 2.0 * math.pi
# e(r/q) for integer r is evaluated on the reduced phase r/q in [-1/2, 1/2):
# |2 pi x| <= pi, three roundings in the phase plus one in cos/sin.
E_RATIONAL_ERR = 6.0 * EPS


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float
    abs_error_bound: float = 0.0

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def close_to(self, other: "ComplexValue | complex", tol: float) -> bool:
        return abs(complex(self) - complex(other)) <= tol


class ComplexAccumulator:
    """Neumaier-compensated complex sum with a running rounding-error bound.

    ``add`` takes the error already present in the term itself; the bound
    reported by ``value`` adds that to the summation error.
    """

    def __init__(self):
        self._re = 0.0
        self._re_c = 0.0
        self._im = 0.0
        self._im_c = 0.0
        self._abs_total = 0.0
        self._term_err = 0.0
        self._count = 0

    @staticmethod
    def _step(total, comp, x):
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        return t, comp

    def add(self, z: complex, err: float = 0.0) -> None:
        self._re, self._re_c = self._step(self._re, self._re_c, z.real)
        self._im, self._im_c = self._step(self._im, self._im_c, z.imag)
        self._abs_total += abs(z.real) + abs(z.imag)
        self._term_err += err
        self._count += 1

    def value(self) -> ComplexValue:
        re = self._re + self._re_c
        im = self._im + self._im_c
        # Neumaier: |error| <= 2u|S| + 2 n u^2 sum|x_i| per component
        u = EPS / 2
        summation = 2 * u * (abs(re) + abs(im)) + 2 * self._count * u * u * self._abs_total
        return ComplexValue(re, im, self._term_err + summation)


def e_rational(num: int, den: int) -> complex:
    """exp(2 pi i num/den), with the phase reduced exactly before evaluation."""
    r = num % den
    if 2 * r >= den:
        r -= den
    x = TAU * (r / den)
    return complex(math.cos(x), math.sin(x))


def e_real(u: float) -> tuple[complex, float]:
    """exp(2 pi i u) and a bound on its absolute error."""
    f = u - math.floor(u)
    if f >= 0.5:
        f -= 1.0
    x = TAU * f
    err = TAU * EPS * (abs(u) + 1.0) + 2 * EPS
    return complex(math.cos(x), math.sin(x)), err


@dataclass(frozen=True)
class GaussSumArgs:
    a: int
    b: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidArgument(f"q must be >= 1, got {self.q}")


def _gauss_direct(a: int, b: int, q: int) -> ComplexValue:
    acc = ComplexAccumulator()
    for n in range(q):
        acc.add(e_rational(a * n * n + b * n, q), E_RATIONAL_ERR)
    return acc.value()


def gauss_sum_direct(g: GaussSumArgs) -> ComplexValue:
    """G(a, b; q) = sum over n mod q of e((a n^2 + b n)/q), term by term."""
    return _gauss_direct(g.a, g.b, g.q)


def gauss_sum_closed(g: GaussSumArgs) -> ComplexValue:
    """Completed-square evaluation for odd q and gcd(a, q) = 1.

    a n^2 + b n = a (n + b/(2a))^2 - b^2/(4a) mod q, and G(a, 0; q) is
    (a/q) sqrt(q) times 1 or i as q is 1 or 3 mod 4.
    """
    a, b, q = g.a, g.b, g.q
    if q % 2 == 0:
        raise InvalidArgument("closed form needs odd q; use gauss_sum_direct")
    if math.gcd(a, q) != 1:
        raise InvalidArgument("closed form needs gcd(a, q) = 1; use gauss_sum_direct")
    if q == 1:
        return ComplexValue(1.0, 0.0, 0.0)
    sign = jacobi(a, q)
    root = math.sqrt(q)
    unit = complex(root, 0.0) if q % 4 == 1 else complex(0.0, root)
    phase = e_rational(-mod_inverse(4 * a % q, q) * b * b, q)
    z = sign * unit * phase
    return ComplexValue(z.real, z.imag, (E_RATIONAL_ERR + 2 * EPS) * root)


@dataclass(frozen=True)
class SalieParams:
    a: int
    q: int
    H: int
    K: int
    lam: float = 0.0
    mu: float = 0.0
    epsilon: float = 0.05

    def validate(self) -> None:
        if self.q < 2 or self.q % 2 == 0:
            raise InvalidArgument(f"q must be odd and >= 3, got {self.q}")
        if math.gcd(self.a, self.q) != 1:
            raise InvalidArgument(f"gcd(a, q) must be 1, got a={self.a}, q={self.q}")
        if self.H < 1 or self.K < 1:
            raise InvalidArgument("H and K must be >= 1")
        if self.epsilon < 0:
            raise InvalidArgument("epsilon must be >= 0")


def salie_sum(s: SalieParams) -> ComplexValue:
    """sum_{h<=H, (h,q)=1} e(lam h) sum_{k<K} e(mu k) (h/q) e(a hbar k^2 / q)."""
    s.validate()
    q = s.q
    acc = ComplexAccumulator()
    mu_phase = [e_real(s.mu * k) for k in range(s.K)]
    for h in range(1, s.H + 1):
        if math.gcd(h, q) != 1:
            continue
        chi = jacobi(h, q)
        lam_z, lam_err = e_real(s.lam * h)
        coeff = s.a * mod_inverse(h, q)
        for k in range(s.K):
            mu_z, mu_err = mu_phase[k]
            z = chi * lam_z * mu_z * e_rational(coeff * k * k, q)
            acc.add(z, lam_err + mu_err + E_RATIONAL_ERR + 4 * EPS)
    return acc.value()


def conjecture3_bound(s: SalieParams) -> float:
    """(H^1/2 K^1/2 + H^3/4 + K + q^-1/2 HK + q^-1/2 K^2) q^eps."""
    H, K, q = float(s.H), float(s.K), float(s.q)
    r = 1.0 / math.sqrt(q)
    return (math.sqrt(H * K) + H**0.75 + K + r * H * K + r * K * K) * q**s.epsilon


def lemma2_bound(s: SalieParams) -> float:
    H, K, q = float(s.H), float(s.K), float(s.q)
    rq = math.sqrt(q)
    return (rq * math.sqrt(H * K) + rq * H**0.75 + rq * K + H * K + K * K) * q**s.epsilon


def lemma2_pair(s: SalieParams, sign: int = 1) -> tuple[ComplexValue, float]:
    """sum_{k<K} e(mu k) sum_{h<=H, (h,q)=1} e(lam h) G(h, sign*k; q), and its bound."""
    if sign not in (1, -1):
        raise InvalidArgument("sign must be +1 or -1")
    q = s.q
    if q < 1 or q % 2 == 0:
        raise InvalidArgument(f"q must be odd, got {q}")
    cache: dict[tuple[int, int], ComplexValue] = {}
    acc = ComplexAccumulator()
    for k in range(s.K):
        mu_z, mu_err = e_real(s.mu * k)
        for h in range(1, s.H + 1):
            if math.gcd(h, q) != 1:
                continue
            key = (h % q, (sign * k) % q)
            if key not in cache:
                cache[key] = _gauss_direct(key[0], key[1], q)
            g = cache[key]
            lam_z, lam_err = e_real(s.lam * h)
            w = lam_z * mu_z
            acc.add(w * complex(g), abs(g) * (lam_err + mu_err + 4 * EPS) + g.abs_error_bound)
    return acc.value(), lemma2_bound(s)


@dataclass(frozen=True)
class SalieGrid:
    a_values: Sequence[int] = (1, 2)
    H_values: Sequence[int] = (1, 4, 16)
    K_values: Sequence[int] = (1, 4, 16)
    lambdas: Sequence[float] = (0.0, 0.3)
    mus: Sequence[float] = (0.0, 0.7)
    epsilon: float = 0.05
    include_squares: bool = False


@dataclass(frozen=True)
class SalieRow:
    q: int
    a: int
    H: int
    K: int
    lam: float
    mu: float
    abs_sum: float
    bound: float
    ratio: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ratio", self.abs_sum / self.bound)


def scan_moduli(q_max: int, include_squares: bool = False, q_min: int = 3) -> list[int]:
    return [q for q in range(max(q_min, 3), q_max + 1, 2) if include_squares or not is_square(q)]


def conjecture_ratio_scan(q_max: int, grid: SalieGrid = SalieGrid(), q_min: int = 3) -> list[SalieRow]:
    """|salie_sum| / conjecture3_bound over odd q <= q_max and the grid.

    Rows come out ordered by (q, a, H, K, lambda, mu); pairs with
    gcd(a, q) > 1 are skipped.
    """
    rows = []
    for q in scan_moduli(q_max, grid.include_squares, q_min):
        for a in sorted(grid.a_values):
            if math.gcd(a, q) != 1:
                continue
            for H in sorted(grid.H_values):
                for K in sorted(grid.K_values):
                    for lam in sorted(grid.lambdas):
                        for mu in sorted(grid.mus):
                            s = SalieParams(a, q, H, K, lam, mu, grid.epsilon)
                            rows.append(SalieRow(q, a, H, K, lam, mu, abs(salie_sum(s)), conjecture3_bound(s)))
    return rows
