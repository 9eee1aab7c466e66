"""Compiled int64 fast paths.

Each kernel mirrors a pure-Python routine elsewhere in the package and must
return identical results on its domain. Callers check the domain first; see
``INT64_SAFE``.
"""

import math

import numpy as np
from numba import njit

# Inputs whose progression end a + N*d stays below this are handled here.
# The float seed of isqrt is exact below 2**53 and every square we form
# stays far from int64 overflow.
INT64_SAFE = 1 << 52

# Largest intermediate product allowed by the vectorised regime classifier.
CLASSIFY_SAFE = 1 << 62


@njit(cache=True)
def isqrt64(x):
    r = np.int64(math.sqrt(float(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@njit(cache=True)
def bruteforce(a, d, n_max):
    best = -1
    best_n = 0
    best_m = 0
    x = a
    for n in range(n_max + 1):
        r = isqrt64(x)
        below = x - r * r
        above = (r + 1) * (r + 1) - x
        if below <= above:
            dist = below
            m = r
        else:
            dist = above
            m = r + 1
        if best < 0 or dist < best:
            best = dist
            best_n = n
            best_m = m
            if dist == 0:
                break
        x += d
    return best, best_n, best_m


@njit(cache=True)
def square_scan(a, d, n_max):
    best = -1
    best_n = 0
    best_m = 0
    m_lo = isqrt64(a)
    m_hi = isqrt64(a + n_max * d) + 1
    for m in range(m_lo, m_hi + 1):
        num = m * m - a
        # nearest n to num/d, halves rounded down
        n0 = -((d - 2 * num) // (2 * d))
        if n0 < 0:
            n0 = 0
        elif n0 > n_max:
            n0 = n_max
        for n in range(n0 - 1, n0 + 2):
            if n < 0 or n > n_max:
                continue
            dist = abs(num - n * d)
            if (
                best < 0
                or dist < best
                or (dist == best and (n < best_n or (n == best_n and m < best_m)))
            ):
                best = dist
                best_n = n
                best_m = m
    return best, best_n, best_m


@njit(cache=True)
def cheaper_is_bruteforce(a, d, n_max):
    m_count = isqrt64(a + n_max * d) - isqrt64(a)
    return n_max + 1 <= m_count + 2


@njit(cache=True)
def delta_auto(a, d, n_max):
    if cheaper_is_bruteforce(a, d, n_max):
        return bruteforce(a, d, n_max)
    return square_scan(a, d, n_max)


@njit(cache=True)
def delta_grid(a_vals, d_vals, n_vals, algorithm):
    """delta over the product grid, flattened in (a, d, N) order.

    algorithm: 0 = auto, 1 = term scan, 2 = square scan.
    """
    size = a_vals.size * d_vals.size * n_vals.size
    out = np.empty((size, 3), dtype=np.int64)
    i = 0
    for a in a_vals:
        for d in d_vals:
            for n in n_vals:
                if algorithm == 1:
                    r = bruteforce(a, d, n)
                elif algorithm == 2:
                    r = square_scan(a, d, n)
                else:
                    r = delta_auto(a, d, n)
                out[i, 0] = r[0]
                out[i, 1] = r[1]
                out[i, 2] = r[2]
                i += 1
    return out


# Regime codes: thm1 0=NotApplicable 1..3=Case1..Case3; thm2 0, 1, 2.
@njit(cache=True)
def classify_one(a, d, n):
    nd = n * d
    admissible = 4 * a <= (nd - 1) * (nd - 1)
    top = isqrt64(a + nd)
    contains = top * top >= a
    m_upper = top - isqrt64(a)
    conj1 = n <= d or (n - d) * (n - d) <= 4 * a
    thm1 = 0
    boundary = False
    if 1800 * a <= n * n * d:
        boundary = a == n * n or (a == nd and a >= n * n)
        if a >= nd and a >= n * n:
            thm1 = 1
        elif n * n <= a and a <= nd:
            thm1 = 2
        elif a <= n * n:
            thm1 = 3
    thm2 = 0
    a3 = a * a * a
    d4 = d * d * d * d
    if 8_000_000 * a3 <= n * n * n * n * d4 and a >= nd:
        if a3 >= n * n * d4:
            thm2 = 1
        elif a3 >= d4 and a3 <= n * n * d4:
            thm2 = 2
    note = d >= 30 and 25 * n * n * d <= a and a <= nd * nd
    return admissible, contains, m_upper, conj1, thm1, thm2, note, boundary


@njit(cache=True)
def classify_grid(a_vals, d_vals, n_vals):
    size = a_vals.size * d_vals.size * n_vals.size
    flags = np.empty((size, 5), dtype=np.bool_)
    codes = np.empty((size, 3), dtype=np.int64)
    i = 0
    for a in a_vals:
        for d in d_vals:
            for n in n_vals:
                adm, cont, mu, c1, t1, t2, note, bd = classify_one(a, d, n)
                flags[i, 0] = adm
                flags[i, 1] = cont
                flags[i, 2] = c1
                flags[i, 3] = note
                flags[i, 4] = bd
                codes[i, 0] = mu
                codes[i, 1] = t1
                codes[i, 2] = t2
                i += 1
    return flags, codes


@njit(cache=True)
def _put_int(buf, pos, v):
    if v == 0:
        buf[pos] = 48
        return pos + 1
    start = pos
    while v > 0:
        buf[pos] = 48 + v % 10
        v //= 10
        pos += 1
    lo = start
    hi = pos - 1
    while lo < hi:
        t = buf[lo]
        buf[lo] = buf[hi]
        buf[hi] = t
        lo += 1
        hi -= 1
    return pos


@njit(cache=True)
def _put_bytes(buf, pos, src):
    for j in range(src.size):
        buf[pos + j] = src[j]
    return pos + src.size


@njit(cache=True)
def write_delta_rows(a_vals, d_vals, n_vals, res, flags, codes, keep, words):
    """Render Delta-task CSV rows into bytes.

    ``words`` is a 2-D uint8 array of zero-padded tokens indexed as
    0 false, 1 true, 2..5 thm1 codes, 6..8 thm2 codes; ``words_len`` is
    recovered from the first zero byte.
    """
    lens = np.zeros(words.shape[0], dtype=np.int64)
    for w in range(words.shape[0]):
        k = 0
        while k < words.shape[1] and words[w, k] != 0:
            k += 1
        lens[w] = k
    count = 0
    for i in range(keep.size):
        if keep[i]:
            count += 1
    # 6 ints of <= 20 digits, 4 tokens of <= 16 bytes, separators
    buf = np.empty(count * 200 + 1, dtype=np.uint8)
    pos = 0
    i = 0
    for a in a_vals:
        for d in d_vals:
            for n in n_vals:
                if keep[i]:
                    pos = _put_int(buf, pos, a)
                    buf[pos] = 44
                    pos = _put_int(buf, pos + 1, d)
                    buf[pos] = 44
                    pos = _put_int(buf, pos + 1, n)
                    buf[pos] = 44
                    pos = _put_int(buf, pos + 1, res[i, 0])
                    buf[pos] = 44
                    pos = _put_int(buf, pos + 1, res[i, 1])
                    buf[pos] = 44
                    pos = _put_int(buf, pos + 1, res[i, 2])
                    buf[pos] = 44
                    pos += 1
                    for w in (
                        1 if flags[i, 0] else 0,
                        1 if flags[i, 1] else 0,
                        2 + codes[i, 1],
                        6 + codes[i, 2],
                    ):
                        pos = _put_bytes(buf, pos, words[w, : lens[w]])
                        buf[pos] = 44
                        pos += 1
                    buf[pos - 1] = 10
                i += 1
    return buf[:pos]
