"""The extremal family d = 2(9d'+1), a = ((9d'+1)^2 (9X+1)^2 - 1)/9.

For these parameters 2*sqrt(a)/d has fractional part just under 1/3, which
keeps every term a+nd at distance at least d/1800 from the squares when
25 N^2 d <= a <= N^2 d^2 and d >= 30.

Verdicts here are exact. Each irrational quantity c*sqrt(r) is compared
after squaring, with the sign of the other side checked first (see the
``*_sqrt`` helpers in ``exactint``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from apsq.delta import DeltaResult, ProgressionParams, delta
from apsq.errors import InvalidArgument, RegimeMismatch
from apsq.exactint import ceil_isqrt, ge_sqrt, gt_sqrt, le_sqrt, lt_sqrt

MIN_D = 30
BOUND_DENOMINATOR = 1800


@dataclass(frozen=True)
class FamilyInstance:
    d_prime: int
    X: int
    N: int
    d: int
    a: int
    A: int

    @property
    def params(self) -> ProgressionParams:
        return ProgressionParams(self.a, self.d, self.N)


@dataclass(frozen=True)
class NRange:
    n_min: int
    n_max: int
    theorem_applies: bool  # d >= 30

    @property
    def empty(self) -> bool:
        return self.n_min > self.n_max

    def __iter__(self):
        return iter(range(self.n_min, self.n_max + 1))

    def __contains__(self, n) -> bool:
        return self.n_min <= n <= self.n_max


@dataclass(frozen=True)
class EpsilonCertificate:
    eps0_range_ok: bool
    eps1_range_ok: bool
    eps2_range_ok: bool
    eps3_range_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.eps0_range_ok and self.eps1_range_ok and self.eps2_range_ok and self.eps3_range_ok


def family_instance(d_prime: int, X: int, N: int = 1) -> FamilyInstance:
    if d_prime < 1 or X < 1 or N < 1:
        raise InvalidArgument(f"need d' >= 1, X >= 1, N >= 1; got {d_prime}, {X}, {N}")
    P = (9 * d_prime + 1) * (9 * X + 1)
    q, r = divmod(P * P - 1, 9)
    assert r == 0, "(9d'+1)^2 (9X+1)^2 - 1 must be divisible by 9"
    A = 27 * d_prime * X + 3 * X + 3 * d_prime
    assert A * A <= q < (A + 1) * (A + 1), "closed form of floor(sqrt(a)) failed"
    return FamilyInstance(d_prime, X, N, 2 * (9 * d_prime + 1), q, A)


def valid_n_range(inst: FamilyInstance) -> NRange:
    """All N with 25 N^2 d <= a <= N^2 d^2."""
    a, d = inst.a, inst.d
    # (N d)^2 >= a  <=>  N d >= ceil(sqrt(a))
    n_min = max(1, -(-ceil_isqrt(a) // d))
    n_max = math.isqrt(a // (25 * d))
    return NRange(n_min, n_max, d >= MIN_D)


def with_n(inst: FamilyInstance, N: int) -> FamilyInstance:
    return family_instance(inst.d_prime, inst.X, N)


# Write s = sqrt(a). The three expansions define
#   eps1 = d s (2s/d - 3X - 1/3)           = 2a - (d (9X+1)/3) s
#   eps2 = s (s - A - 1/3)                 = a - ((3A+1)/3) s
#   eps3 = d ((2s/d)(s - A) - X - 1/9)     = 2a - d(9X+1)/9 - 2A s
# and each range check is a pair of comparisons "lhs < / > c*sqrt(a)"
# after multiplying through by the denominator.


def _eps1_ok(inst: FamilyInstance) -> bool:
    a, c = inst.a, inst.d * (9 * inst.X + 1)
    # eps1 < 0  <=>  6a < c s ;  eps1 > -3  <=>  6a + 9 > c s
    return lt_sqrt(6 * a, c, a) and gt_sqrt(6 * a + 9, c, a)


def _eps2_ok(inst: FamilyInstance) -> bool:
    a, c = inst.a, 3 * inst.A + 1
    # eps2 < 0  <=>  3a < c s ;  eps2 > -1  <=>  3a + 3 > c s
    return lt_sqrt(3 * a, c, a) and gt_sqrt(3 * a + 3, c, a)


def _eps3_ok(inst: FamilyInstance) -> bool:
    a, c = inst.a, 18 * inst.A
    base = 18 * a - inst.d * (9 * inst.X + 1)
    # eps3 < 0  <=>  base < c s ;  eps3 > -3  <=>  base + 27 > c s
    return lt_sqrt(base, c, a) and gt_sqrt(base + 27, c, a)


def _eps0_ok(inst: FamilyInstance) -> bool:
    # sqrt(a+nd) = s + nd/(2s) + eps0 n^2 d^2 / a^(3/2). Multiplying by 8a^2/s,
    # |eps0| <= 1/8 is
    #   8a^2 + 4nda - n^2 d^2  <=  8a sqrt(a (a+nd))  <=  8a^2 + 4nda + n^2 d^2.
    a, d = inst.a, inst.d
    for n in range(1, inst.N + 1):
        rad = a * (a + n * d)
        lo = 8 * a * a + 4 * n * d * a - n * n * d * d
        hi = 8 * a * a + 4 * n * d * a + n * n * d * d
        if not (le_sqrt(lo, 8 * a, rad) and ge_sqrt(hi, 8 * a, rad)):
            return False
    return True


def certify_epsilons(inst: FamilyInstance) -> EpsilonCertificate:
    if inst.a == 0:
        raise InvalidArgument("a = 0 has no expansion")
    return EpsilonCertificate(_eps0_ok(inst), _eps1_ok(inst), _eps2_ok(inst), _eps3_ok(inst))


def epsilon_values(inst: FamilyInstance, dps: int = 50) -> dict[str, mpmath.mpf]:
    """High-precision eps0..eps4 for display; eps0 is reported at n = N."""
    mp = mpmath.MPContext()
    mp.dps = dps
    a, d, X, A, N = (mp.mpf(v) for v in (inst.a, inst.d, inst.X, inst.A, inst.N))
    s = mp.sqrt(a)
    eps1 = 2 * a - d * (9 * X + 1) / 3 * s
    eps2 = a - (3 * A + 1) / 3 * s
    eps3 = 2 * a - d * (9 * X + 1) / 9 - 2 * A * s
    eps0 = (mp.sqrt(a + N * d) - s - N * d / (2 * s)) * a * s / (N * N * d * d)
    # eps4: (min_k ||(2s/d)k - (2s/d)(s - A)|| - 1/9) * d over 0 <= k <= Nd/(2s) + 1
    k_max = int(mp.floor(N * d / (2 * s) + 1))
    shift = 2 * s / d * (s - A)
    gaps = (abs(v - mp.nint(v)) for v in (2 * s / d * k - shift for k in range(k_max + 1)))
    eps4 = (min(gaps) - mp.mpf(1) / 9) * d
    return {"eps0": eps0, "eps1": eps1, "eps2": eps2, "eps3": eps3, "eps4": eps4}


def verify_lower_bound(inst: FamilyInstance, n: int | None = None) -> bool:
    """True iff 1800 * delta(a, d, N) >= d, with N = n (default inst.N)."""
    return lower_bound_witness(inst, n)[1]


def lower_bound_witness(inst: FamilyInstance, n: int | None = None) -> tuple[DeltaResult, bool]:
    n = inst.N if n is None else n
    if inst.d < MIN_D:
        raise RegimeMismatch(f"d >= {MIN_D} (d = {inst.d})")
    rng = valid_n_range(inst)
    if n not in rng:
        raise RegimeMismatch(f"25 N^2 d <= a <= N^2 d^2 (N = {n}, valid range {rng.n_min}..{rng.n_max})")
    res = delta(ProgressionParams(inst.a, inst.d, n))
    return res, BOUND_DENOMINATOR * res.delta >= inst.d


def chain_margin(inst: FamilyInstance, dps: int = 50) -> mpmath.mpf:
    """min over n <= N of |sqrt(a+nd) - m| - d/(1800 sqrt(a)), m the nearest root.

    Diagnostic for the intermediate real inequality; positive means it holds.
    """
    mp = mpmath.MPContext()
    mp.dps = dps
    s = mp.sqrt(inst.a)
    target = mp.mpf(inst.d) / (BOUND_DENOMINATOR * s)
    worst = None
    for n in range(inst.N + 1):
        root = mp.sqrt(inst.a + n * inst.d)
        gap = abs(root - mp.nint(root)) - target
        worst = gap if worst is None or gap < worst else worst
    return worst
