"""Minimum distance between the progression a, a+d, ..., a+Nd and the squares.

Two independent algorithms are provided. The term scan visits every term and
asks for its nearest square; the square scan visits every candidate square
and asks for its nearest term. They agree exactly, witnesses included.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from apsq import _kernels
from apsq.errors import InvalidArgument
from apsq.exactint import nearest_square_distance


class Algorithm(str, enum.Enum):
    TERM_SCAN = "TermScan"
    SQUARE_SCAN = "SquareScan"


@dataclass(frozen=True)
class ProgressionParams:
    a: int
    d: int
    N: int

    def __post_init__(self):
        for name in ("a", "d", "N"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvalidArgument(f"{name} must be an int, got {v!r}")
        if self.a < 0:
            raise InvalidArgument(f"a must be >= 0, got {self.a}")
        if self.d < 1:
            raise InvalidArgument(f"d must be >= 1, got {self.d}")
        if self.N < 1:
            raise InvalidArgument(f"N must be >= 1, got {self.N}")

    @property
    def last(self) -> int:
        return self.a + self.N * self.d

    def fits_int64(self) -> bool:
        return self.last < _kernels.INT64_SAFE


@dataclass(frozen=True)
class DeltaResult:
    delta: int
    n_star: int
    m_star: int
    algorithm: Algorithm

    def witness_ok(self, p: ProgressionParams) -> bool:
        return abs(p.a + self.n_star * p.d - self.m_star**2) == self.delta


def _term_scan_py(a: int, d: int, N: int) -> tuple[int, int, int]:
    best = None
    x = a
    for n in range(N + 1):
        dist, m = nearest_square_distance(x)
        if best is None or dist < best[0]:
            best = (dist, n, m)
            if dist == 0:
                break
        x += d
    return best


def _round_half_down(num: int, den: int) -> int:
    # ceil(num/den - 1/2)
    return -((den - 2 * num) // (2 * den))


def _square_scan_py(a: int, d: int, N: int) -> tuple[int, int, int]:
    best = None
    for m in range(math.isqrt(a), math.isqrt(a + N * d) + 2):
        num = m * m - a
        n0 = min(max(_round_half_down(num, d), 0), N)
        for n in (n0 - 1, n0, n0 + 1):
            if 0 <= n <= N:
                cand = (abs(num - n * d), n, m)
                if best is None or cand < best:
                    best = cand
    return best


def _use_jit(p: ProgressionParams, jit: bool | None) -> bool:
    if jit is None:
        return p.fits_int64()
    if jit and not p.fits_int64():
        raise InvalidArgument("inputs exceed the int64 fast path")
    return jit


def delta_bruteforce(p: ProgressionParams, *, jit: bool | None = None) -> DeltaResult:
    """Scan every term a+nd and take the closest square.

    Ties go to the smallest n, then the smallest m. ``jit=None`` picks the
    compiled path whenever the integers fit in int64.
    """
    if _use_jit(p, jit):
        r = _kernels.bruteforce(p.a, p.d, p.N)
    else:
        r = _term_scan_py(p.a, p.d, p.N)
    return DeltaResult(int(r[0]), int(r[1]), int(r[2]), Algorithm.TERM_SCAN)


def delta_square_scan(p: ProgressionParams, *, jit: bool | None = None) -> DeltaResult:
    """Scan the squares from isqrt(a)^2 to (isqrt(a+Nd)+1)^2 and take the closest term.

    The range includes one square past each end of [a, a+Nd], so the result is
    right even when the interval holds no square at all.
    """
    if _use_jit(p, jit):
        r = _kernels.square_scan(p.a, p.d, p.N)
    else:
        r = _square_scan_py(p.a, p.d, p.N)
    return DeltaResult(int(r[0]), int(r[1]), int(r[2]), Algorithm.SQUARE_SCAN)


def square_count(p: ProgressionParams) -> int:
    return math.isqrt(p.last) - math.isqrt(p.a)


def delta(p: ProgressionParams, *, jit: bool | None = None) -> DeltaResult:
    """delta via whichever scan needs fewer iterations (N+1 terms vs M+2 squares)."""
    if p.N + 1 <= square_count(p) + 2:
        return delta_bruteforce(p, jit=jit)
    return delta_square_scan(p, jit=jit)


_GRID_ALGORITHMS = {None: 0, Algorithm.TERM_SCAN: 1, Algorithm.SQUARE_SCAN: 2}


def delta_grid(a_values, d_values, n_values, algorithm: Algorithm | None = None) -> np.ndarray:
    """delta, n_star, m_star for every (a, d, N) in the product grid.

    Returns an int64 array of shape (len(a)*len(d)*len(N), 3), rows in
    (a, d, N) lexicographic order. All values must lie in the int64 fast
    path range.
    """
    a_arr = np.asarray(a_values, dtype=np.int64)
    d_arr = np.asarray(d_values, dtype=np.int64)
    n_arr = np.asarray(n_values, dtype=np.int64)
    if a_arr.size and d_arr.size and n_arr.size:
        if a_arr.min() < 0 or d_arr.min() < 1 or n_arr.min() < 1:
            raise InvalidArgument("grid needs a >= 0, d >= 1, N >= 1")
        if int(a_arr.max()) + int(n_arr.max()) * int(d_arr.max()) >= _kernels.INT64_SAFE:
            raise InvalidArgument("grid exceeds the int64 fast path")
    return _kernels.delta_grid(a_arr, d_arr, n_arr, _GRID_ALGORITHMS[algorithm])
