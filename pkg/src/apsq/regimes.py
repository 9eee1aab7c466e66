"""Which hypotheses hold for (a, d, N), and the bound each result predicts.

Every hypothesis is decided by exact integer comparison. Fractional powers
appear only in the bound values, which are evaluated with 50 significant
digits and feed ratios, never verdicts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath

from apsq.delta import ProgressionParams, delta
from apsq.errors import RegimeMismatch
from apsq.exactint import cmp_monomial

WORKING_DPS = 50
DEFAULT_EPSILON = 0.05

_mp = mpmath.MPContext()
_mp.dps = WORKING_DPS


class Thm1Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    NOT_APPLICABLE = "NotApplicable"


class Thm2Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    NOT_APPLICABLE = "NotApplicable"


class BoundKind(str, enum.Enum):
    THM1 = "Thm1"
    THM2 = "Thm2"
    COR1 = "Cor1"
    CONJ1 = "Conj1"
    CONJ2 = "Conj2"
    HEURISTIC = "Heuristic"


@dataclass(frozen=True)
class RegimeReport:
    admissible_paper: bool
    contains_square: bool
    m_upper: int
    conj1_applicable: bool
    conj2_applicable: bool
    thm1_case: Thm1Case
    thm2_case: Thm2Case
    note_range: bool
    # a sits on a shared edge of two thm1 cases (reported as the first)
    thm1_boundary: bool = False

    def as_dict(self) -> dict:
        return {
            "admissible_paper": self.admissible_paper,
            "contains_square": self.contains_square,
            "m_upper": self.m_upper,
            "conj1_applicable": self.conj1_applicable,
            "conj2_applicable": self.conj2_applicable,
            "thm1_case": self.thm1_case.value,
            "thm2_case": self.thm2_case.value,
            "note_range": self.note_range,
            "thm1_boundary": self.thm1_boundary,
        }


@dataclass(frozen=True)
class BoundPrediction:
    kind: BoundKind
    value: mpmath.mpf
    epsilon_used: float | None = None
    case: str | None = None


def admissible(p: ProgressionParams) -> bool:
    """a <= ((Nd-1)/2)^2, i.e. sqrt(a+Nd) >= 1 + sqrt(a)."""
    return 4 * p.a <= (p.N * p.d - 1) ** 2


def contains_square(p: ProgressionParams) -> bool:
    top = math.isqrt(p.last)
    return top * top >= p.a


def below_conj_threshold(p: ProgressionParams) -> bool:
    """N <= d + 2*sqrt(a)."""
    return p.N <= p.d or (p.N - p.d) ** 2 <= 4 * p.a


def thm1_hypothesis(p: ProgressionParams) -> bool:
    return 1800 * p.a <= p.N**2 * p.d


def thm2_hypothesis(p: ProgressionParams) -> bool:
    # a <= N^(4/3) d^(4/3) / 200, cubed
    return cmp_monomial(8_000_000, [(p.a, 3)], 1, [(p.N, 4), (p.d, 4)]) <= 0


def _thm1_cases(p: ProgressionParams) -> list[Thm1Case]:
    if not thm1_hypothesis(p):
        return []
    a, nd, n2 = p.a, p.N * p.d, p.N**2
    hits = []
    if a >= nd and a >= n2:
        hits.append(Thm1Case.CASE1)
    if n2 <= a <= nd:
        hits.append(Thm1Case.CASE2)
    if a <= n2:
        hits.append(Thm1Case.CASE3)
    return hits


def _thm2_case(p: ProgressionParams) -> Thm2Case:
    if not thm2_hypothesis(p) or p.a < p.N * p.d:
        return Thm2Case.NOT_APPLICABLE
    # a >= N^(2/3) d^(4/3)  <=>  a^3 >= N^2 d^4
    if cmp_monomial(1, [(p.a, 3)], 1, [(p.N, 2), (p.d, 4)]) >= 0:
        return Thm2Case.CASE1
    # here a^3 < N^2 d^4 already; still need a >= d^(4/3)
    if cmp_monomial(1, [(p.a, 3)], 1, [(p.d, 4)]) >= 0:
        return Thm2Case.CASE2
    return Thm2Case.NOT_APPLICABLE


def classify(p: ProgressionParams) -> RegimeReport:
    top = math.isqrt(p.last)
    conj1 = below_conj_threshold(p)
    cases = _thm1_cases(p)
    n2d = p.N**2 * p.d
    return RegimeReport(
        admissible_paper=admissible(p),
        contains_square=top * top >= p.a,
        m_upper=top - math.isqrt(p.a),
        conj1_applicable=conj1,
        conj2_applicable=not conj1,
        thm1_case=cases[0] if cases else Thm1Case.NOT_APPLICABLE,
        thm2_case=_thm2_case(p),
        note_range=p.d >= 30 and 25 * n2d <= p.a <= n2d * p.d,
        thm1_boundary=len(cases) > 1,
    )


def _eps(epsilon) -> mpmath.mpf:
    # decimal reading of the float, so 0.05 means 5/100 to working precision
    return _mp.mpf(repr(float(epsilon)))


def predicted_bound(
    p: ProgressionParams,
    kind: BoundKind | str,
    epsilon: float = DEFAULT_EPSILON,
    *,
    check: bool = True,
) -> BoundPrediction:
    """Evaluate the bound of ``kind`` at p.

    With ``check`` the kind's hypotheses are verified first and a failure
    raises RegimeMismatch naming the inequality. ``check=False`` evaluates the
    formula regardless (Thm1/Thm2 then still need a case, so they always check).
    """
    kind = BoundKind(kind)
    mp = _mp
    a, d, N = mp.mpf(p.a), mp.mpf(p.d), mp.mpf(p.N)
    eps = None
    case = None

    if kind is BoundKind.THM1:
        cases = _thm1_cases(p)
        if not cases:
            raise RegimeMismatch("a <= N^2 d / 1800")
        case = cases[0].value
        if cases[0] is Thm1Case.CASE1:
            value = a ** mp.mpf(0.25) * mp.sqrt(d) / mp.sqrt(N)
        elif cases[0] is Thm1Case.CASE2:
            value = d ** mp.mpf(0.75) / N ** mp.mpf(0.25)
        else:
            value = mp.sqrt(d)
    elif kind is BoundKind.THM2:
        c2 = _thm2_case(p)
        if c2 is Thm2Case.NOT_APPLICABLE:
            if not thm2_hypothesis(p):
                raise RegimeMismatch("a <= N^(4/3) d^(4/3) / 200")
            if p.a < p.N * p.d:
                raise RegimeMismatch("a >= N d")
            raise RegimeMismatch("a >= d^(4/3)")
        case = c2.value
        if c2 is Thm2Case.CASE1:
            value = mp.sqrt(a) / mp.sqrt(N)
        else:
            value = d / a ** mp.mpf(0.25)
    elif kind is BoundKind.COR1:
        if check and not thm1_hypothesis(p):
            raise RegimeMismatch("a <= N^2 d / 1800")
        value = d ** mp.mpf(0.75)
    elif kind is BoundKind.CONJ1:
        if check and not admissible(p):
            raise RegimeMismatch("a <= ((N d - 1)/2)^2")
        if check and not below_conj_threshold(p):
            raise RegimeMismatch("N <= d + 2 sqrt(a)")
        eps = float(epsilon)
        value = mp.sqrt(a + N * d) / N * d ** _eps(epsilon)
    elif kind is BoundKind.CONJ2:
        if check and not admissible(p):
            raise RegimeMismatch("a <= ((N d - 1)/2)^2")
        if check and below_conj_threshold(p):
            raise RegimeMismatch("N > d + 2 sqrt(a)")
        eps = float(epsilon)
        value = d ** _eps(epsilon)
    else:
        value = (mp.sqrt(a + N * d) + mp.sqrt(a)) / N

    if not value > 0:
        raise RegimeMismatch(f"{kind.value} bound is not positive at {p}")
    return BoundPrediction(kind, value, eps, case)


def ratio(
    p: ProgressionParams,
    kind: BoundKind | str,
    epsilon: float = DEFAULT_EPSILON,
    *,
    check: bool = True,
) -> mpmath.mpf:
    """delta(p) divided by the predicted bound; an empirical implied constant."""
    bound = predicted_bound(p, kind, epsilon, check=check)
    return _mp.mpf(delta(p).delta) / bound.value
