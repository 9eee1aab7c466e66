"""Desk-scale checks of the analytic machinery.

* Huxley's count of integers m with ||f(m)|| <= eps, against its guaranteed
  lower bound, for the parabola (m^2 - a)/d and the root sqrt(a + m d).
* The tent functions and their Fourier coefficients.
* Poisson summation of the tent-weighted quadratic exponential sum, and the
  split of the smoothed count into Delta*M plus a Gauss-sum remainder.

Every truncated Fourier series carries a closed-form tail bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from apsq.delta import ProgressionParams
from apsq.errors import InvalidArgument, RegimeMismatch
from apsq.exactint import ceil_isqrt
from apsq.expsums import EPS, ComplexAccumulator, ComplexValue, E_RATIONAL_ERR, _gauss_direct, e_rational


def _frac(x) -> Fraction:
    """Decimal reading of a float (0.1 -> 1/10); ints and Fractions pass through."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(repr(float(x)))


# ---------------------------------------------------------------- Huxley


class Curve(str, enum.Enum):
    PARABOLA = "parabola"
    ROOT = "root"


@dataclass(frozen=True)
class HuxleySetup:
    curve: Curve
    p: ProgressionParams
    I_lo: int
    I_hi: int
    C: int
    eps: Fraction

    @property
    def M(self) -> int:
        return self.I_hi - self.I_lo

    @property
    def Delta(self):
        """2/d (exact) for the parabola, d^2 / (8 a^(3/2)) (50 digits) for the root."""
        if self.curve is Curve.PARABOLA:
            return Fraction(2, self.p.d)
        mp = mpmath.MPContext()
        mp.dps = 50
        return mp.mpf(self.p.d) ** 2 / (8 * mp.mpf(self.p.a) ** mp.mpf(1.5))


def huxley_setup(curve: Curve | str, p: ProgressionParams, eps) -> HuxleySetup:
    """Parabola on [ceil sqrt a, floor sqrt(a+Nd)] with C = 1, or root on [0, N] with C = 2."""
    curve = Curve(curve)
    eps = _frac(eps)
    if curve is Curve.PARABOLA:
        return HuxleySetup(curve, p, ceil_isqrt(p.a), math.isqrt(p.last), 1, eps)
    return HuxleySetup(curve, p, 0, p.N, 2, eps)


def huxley_hypotheses(h: HuxleySetup) -> list[str]:
    """Violated hypotheses of the point-count theorem, as readable inequalities.

    All checks are exact: the root curve's Delta = d^2/(8 a^(3/2)) is
    eliminated by raising both sides to even powers.
    """
    bad = []
    M, C, eps = h.M, h.C, h.eps
    a, d = h.p.a, h.p.d
    if M < 12:
        bad.append(f"M >= 12 (M = {M})")
    if eps > Fraction(1, 4):
        bad.append("eps <= 1/4")
    if eps * eps < Fraction(72 * C**4, max(M, 1)):
        bad.append("6 C^2 sqrt(2/M) <= eps")
    if h.curve is Curve.PARABOLA:
        delta = Fraction(2, d)
        if Fraction(144, max(M, 1) ** 2) > delta / C:
            bad.append("144/M^2 <= Delta/C")
        if C * delta > 1:
            bad.append("C Delta <= 1")
        if 9 * C**3 * delta > eps * eps:
            bad.append("3 sqrt(C^3 Delta) <= eps")
        # |f''| = 2/d = Delta everywhere, so Delta/C <= |f''| <= C Delta holds
    else:
        if a < 1:
            return bad + ["a >= 1"]
        # 144/M^2 <= d^2/(16 a^1.5)  <=>  2304^2 a^3 <= M^4 d^4
        if 2304**2 * a**3 > M**4 * d**4:
            bad.append("144/M^2 <= Delta/C")
        # C Delta = d^2/(4 a^1.5) <= 1
        if d**4 > 16 * a**3:
            bad.append("C Delta <= 1")
        # |g''| ranges over [d^2/(4 (a+Nd)^1.5), d^2/(4 a^1.5)]; the low end must reach Delta/C
        if (a + h.I_hi * d) ** 3 > 16 * a**3:
            bad.append("Delta/C <= |g''(x)| on I")
        # 3 sqrt(8 Delta) <= eps  <=>  81 d^4 <= eps^4 a^3
        if 81 * d**4 > eps**4 * a**3:
            bad.append("3 sqrt(C^3 Delta) <= eps")
    return bad


def _check(h: HuxleySetup) -> None:
    bad = huxley_hypotheses(h)
    if bad:
        raise RegimeMismatch("; ".join(bad))


def _near_integer_parabola(m: int, a: int, d: int, eps_d: Fraction) -> bool:
    r = (m * m - a) % d
    return min(r, d - r) <= eps_d


def _near_integer_root(y: int, eps: Fraction) -> bool:
    r = math.isqrt(y)
    # ||sqrt y|| <= eps  <=>  y <= (r + eps)^2  or  y >= (r + 1 - eps)^2
    return y <= (r + eps) ** 2 or y >= (r + 1 - eps) ** 2


def huxley_count(h: HuxleySetup, *, check: bool = True) -> int:
    """Exact number of integers m in [I_lo, I_hi] with ||f(m)|| <= eps."""
    if check:
        _check(h)
    a, d = h.p.a, h.p.d
    if h.curve is Curve.PARABOLA:
        eps_d = h.eps * d
        return sum(1 for m in range(h.I_lo, h.I_hi + 1) if _near_integer_parabola(m, a, d, eps_d))
    return sum(1 for x in range(h.I_lo, h.I_hi + 1) if _near_integer_root(a + x * d, h.eps))


def root_margin(h: HuxleySetup, dps: int = 30) -> mpmath.mpf:
    """Smallest | ||sqrt(a + x d)|| - eps | over I; how close the root count came to flipping."""
    mp = mpmath.MPContext()
    mp.dps = dps
    eps = mp.mpf(h.eps.numerator) / h.eps.denominator
    worst = None
    for x in range(h.I_lo, h.I_hi + 1):
        s = mp.sqrt(h.p.a + x * h.p.d)
        gap = abs(abs(s - mp.nint(s)) - eps)
        worst = gap if worst is None or gap < worst else worst
    return worst


def huxley_lower_bound_value(eps, M, C, Delta):
    """min(eps^4 M / (2^4 3^4 C^7 Delta), eps M / (2^7 3^2 C^4)), in the arithmetic of the inputs."""
    return min(eps**4 * M / (1296 * C**7 * Delta), eps * M / (1152 * C**4))


def huxley_lower_bound(h: HuxleySetup):
    """Exact Fraction for the parabola; 50-digit mpf for the root."""
    if h.curve is Curve.PARABOLA:
        return huxley_lower_bound_value(h.eps, Fraction(h.M), Fraction(h.C), h.Delta)
    D = h.Delta
    mp = D.context
    eps = mp.mpf(h.eps.numerator) / h.eps.denominator
    return huxley_lower_bound_value(eps, mp.mpf(h.M), mp.mpf(h.C), D)


# ----------------------------------------------------------- tents, Fourier


def _sinpi(x: float) -> float:
    r = math.fmod(x, 2.0)
    if r == math.floor(r):
        return 0.0
    return math.sin(math.pi * r)


def tent_f(x: float) -> float:
    return max(0.0, 1.0 - abs(x))


def tent_t(x: float, Delta: float) -> float:
    return max(0.0, 1.0 - abs(x / Delta))


def g_lambda(x: float, lam: float, Delta: float) -> float:
    """Periodised tent centred on lam; one term of the periodisation survives since Delta < 1/2."""
    if not 0 < Delta < 0.5:
        raise InvalidArgument("Delta must lie in (0, 1/2)")
    y = x - lam
    return tent_t(y - round(y), Delta)


def fhat(y: float) -> float:
    """Fourier transform of tent_f: (sin pi y / pi y)^2."""
    if y == 0:
        return 1.0
    s = _sinpi(y) / (math.pi * y)
    return s * s


def fourier_c(h: int, Delta: float) -> float:
    """Fourier coefficient c(h) = Delta (sin pi Delta h / pi Delta h)^2 of the periodised tent."""
    if not 0 < Delta < 0.5:
        raise InvalidArgument("Delta must lie in (0, 1/2)")
    return Delta * fhat(Delta * h)


def _fhat_array(y: np.ndarray) -> np.ndarray:
    return np.sinc(y) ** 2


def _tail_inverse_squares(k: int) -> float:
    """sum_{|j| > k} 1/j^2 = 2 psi'(k+1)."""
    return 2.0 * float(mpmath.psi(1, k + 1))


# ------------------------------------------------------ Poisson / decomposition


@dataclass(frozen=True)
class AnalyticSetup:
    a: int
    d: int
    N: int
    A_center: int
    M_window: int
    threshold: float
    sigma: float = 5.0

    def __post_init__(self):
        if not 0 < self.threshold < 0.5:
            raise InvalidArgument("threshold Delta must lie in (0, 1/2)")
        if self.d < 1 or self.M_window < 1:
            raise InvalidArgument("need d >= 1 and M_window >= 1")
        if self.sigma <= 1:
            raise InvalidArgument("sigma must exceed 1")

    @property
    def lam(self) -> Fraction:
        return Fraction(self.a % self.d, self.d)

    @property
    def L(self) -> float:
        return (self.d / self.M_window) ** self.sigma


def analytic_setup(a: int, d: int, N: int, threshold: float, sigma: float = 5.0) -> AnalyticSetup:
    """A = floor sqrt(a + Nd/2) and M = floor(Nd / (12 sqrt a)), both exact."""
    if a < 1:
        raise InvalidArgument("a must be >= 1")
    A = math.isqrt((2 * a + N * d) // 2)
    M = math.isqrt((N * d) ** 2 // (144 * a))
    return AnalyticSetup(a, d, N, A, M, threshold, sigma)


@lru_cache(maxsize=64)
def _gauss_table(d: int) -> tuple[tuple[complex, ...], ...]:
    """G(r, s; d) for r, s mod d."""
    return tuple(tuple(complex(_gauss_direct(r, s, d)) for s in range(d)) for r in range(d))


def _residue_sums(values: np.ndarray, start: int, d: int) -> list[float]:
    """out[s] = sum of values[i] over i with (start + i) % d == s, via exactly rounded fsum."""
    idx = (start + np.arange(values.size)) % d
    return [math.fsum(values[idx == s].tolist()) for s in range(d)]


def _k_sums(M: int, d: int, k_max: int) -> list[float]:
    """F[s] = sum_{|k| <= k_max, k = s mod d} fhat(M k / d)."""
    k = np.arange(-k_max, k_max + 1)
    return _residue_sums(_fhat_array(M * k / d), -k_max, d)


def _fhat_tail(M: int, d: int, k_max: int) -> float:
    # fhat(y) <= 1/(pi y)^2
    return (d / (math.pi * M)) ** 2 * _tail_inverse_squares(k_max)


def poisson_check(s: AnalyticSetup, h: int, k_max: int) -> tuple[ComplexValue, ComplexValue, float]:
    """Both sides of the Poisson formula for W(h) = sum_m e(h (A+m)^2 / d) f(m/M).

    lhs sums over |m| < M directly. rhs is (M/d) sum_{|k|<=k_max} fhat(Mk/d)
    e(-kA/d) G(h, k; d), grouped by k mod d. tail_bound covers |k| > k_max
    using |G(h, k; d)| <= sqrt(d gcd(h, d)).
    """
    if s.d % 2 == 0:
        raise InvalidArgument("d must be odd")
    d, M, A = s.d, s.M_window, s.A_center

    acc = ComplexAccumulator()
    for m in range(-M + 1, M):
        w = (M - abs(m)) / M
        acc.add(w * e_rational(h * (A + m) ** 2, d), w * (E_RATIONAL_ERR + EPS))
    lhs = acc.value()

    F = _k_sums(M, d, k_max)
    row = _gauss_table(d)[h % d]
    acc = ComplexAccumulator()
    for res in range(d):
        g = row[res]
        acc.add((M / d) * F[res] * e_rational(-res * A, d) * g, (M / d) * F[res] * abs(g) * 8 * EPS * d)
    rhs = acc.value()

    tail = (M / d) * math.sqrt(d * math.gcd(h, d)) * _fhat_tail(M, d, k_max)
    return lhs, rhs, tail


def s_direct(s: AnalyticSetup) -> int:
    """#{m : |m| <= M, ||((A+m)^2 - a)/d|| < Delta}, decided on residues mod d."""
    delta_d = _frac(s.threshold) * s.d
    count = 0
    for m in range(-s.M_window, s.M_window + 1):
        r = ((s.A_center + m) ** 2 - s.a) % s.d
        if min(r, s.d - r) < delta_d:
            count += 1
    return count


def smoothed_direct(s: AnalyticSetup) -> float:
    """sum_m f(m/M) g_lambda((A+m)^2/d) with lambda = a/d, evaluated exactly then rounded."""
    M, d = s.M_window, s.d
    delta_d = _frac(s.threshold) * d
    total = Fraction(0)
    for m in range(-M + 1, M):
        r = ((s.A_center + m) ** 2 - s.a) % d
        dist = min(r, d - r)
        if dist < delta_d:
            total += Fraction(M - abs(m), M) * (1 - dist / delta_d)
    return float(total)


def s_fourier(s: AnalyticSetup, h_max: int = 10**6, k_max: int = 10**4) -> tuple[float, float, float]:
    """Fourier side of the smoothed count: (Delta*M, truncated remainder, error budget).

    The remainder is the double sum over 0 < |h| <= h_max and |k| <= k_max of
    (M/d) fhat(Mk/d) e(-kA/d) c(h) e(-lambda h) G(h, k; d). Both phases and
    G depend only on h and k mod d, so the sum is regrouped by residue
    classes without changing its value. The budget bounds the dropped terms.
    """
    if s.d % 2 == 0:
        raise InvalidArgument("d must be odd")
    d, M, A, Delta = s.d, s.M_window, s.A_center, s.threshold
    main = Delta * M

    hs = np.arange(1, h_max + 1)
    c_pos = Delta * _fhat_array(Delta * hs)
    C_pos = _residue_sums(c_pos, 1, d)
    # c is even: the h < 0 half is the h > 0 half with residues r -> -r
    C = [C_pos[r] + C_pos[-r % d] for r in range(d)]

    F = _k_sums(M, d, k_max)
    G = _gauss_table(d)
    B = [e_rational(-s.a * r, d) * C[r] for r in range(d)]

    acc = ComplexAccumulator()
    abs_total = 0.0
    for k_res in range(d):
        T = sum(B[r] * G[r][k_res] for r in range(d))
        term = (M / d) * F[k_res] * e_rational(-k_res * A, d) * T
        abs_total += (M / d) * F[k_res] * sum(abs(B[r]) * abs(G[r][k_res]) for r in range(d))
        acc.add(term)
    rem = acc.value()

    h_tail = M * Delta * _tail_inverse_squares(h_max) / (math.pi * Delta) ** 2
    weight = sum(C[r] * math.sqrt(d * math.gcd(r, d)) for r in range(d))
    k_tail = (M / d) * weight * _fhat_tail(M, d, k_max)
    rounding = rem.abs_error_bound + 64 * (d + math.log2(h_max + k_max + 2)) * EPS * abs_total + abs(rem.im)
    return float(main), float(rem.re), float(h_tail + k_tail + rounding)
