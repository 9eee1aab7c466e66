"""Deterministic, resumable parameter sweeps.

A sweep walks a GridSpec in a fixed dense order, cut into chunks that do not
depend on the worker count. Chunks are evaluated (serially or in a process
pool), written strictly in index order, and each completed chunk appends a
line to a checkpoint file recording the output byte offset. A rerun with the
same checkpoint truncates the output to the last recorded offset and carries
on, so an interrupted and resumed sweep writes the same bytes as an
uninterrupted one.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from apsq import _kernels as K
from apsq.analytic import AnalyticSetup, Curve, huxley_count, huxley_hypotheses, huxley_lower_bound, huxley_setup, poisson_check
from apsq.delta import ProgressionParams, delta
from apsq.errors import InvalidArgument, SpecError
from apsq.exactint import is_square
from apsq.expsums import SalieParams, conjecture3_bound, salie_sum
from apsq.families import certify_epsilons, family_instance, valid_n_range, with_n
from apsq.gridspec import ADN_TASKS, GridSpec, Task
from apsq.regimes import classify

ADN_TARGET_ROWS = 1 << 18
POINTS_PER_CHUNK = {Task.FAMILY_SCAN: 4, Task.SALIE_SCAN: 16, Task.HUXLEY_SCAN: 16, Task.POISSON_SCAN: 4}

DELTA_COLUMNS = ("a", "d", "N", "delta", "n_star", "m_star", "admissible", "contains_square", "regime_thm1", "regime_thm2")
RATIO_COLUMNS = DELTA_COLUMNS + ("bound_kind", "bound_value", "ratio")
COLUMNS = {
    Task.DELTA: DELTA_COLUMNS,
    Task.RATIO_THM1: RATIO_COLUMNS,
    Task.RATIO_THM2: RATIO_COLUMNS,
    Task.RATIO_COR1: RATIO_COLUMNS,
    Task.RATIO_CONJ1: RATIO_COLUMNS,
    Task.FAMILY_SCAN: ("dprime", "X", "N", "d", "a", "delta", "bound_ok", "eps_ok"),
    Task.SALIE_SCAN: ("q", "a", "H", "K", "lambda", "mu", "abs_sum", "bound", "ratio"),
    Task.HUXLEY_SCAN: ("curve", "a", "d", "N", "M", "C", "Delta", "eps", "count", "lower_bound", "ok"),
    Task.POISSON_SCAN: ("d", "M", "A", "h", "kmax", "abs_diff", "tail_bound", "ok"),
}
BOUND_KIND = {Task.RATIO_THM1: "Thm1", Task.RATIO_THM2: "Thm2", Task.RATIO_COR1: "Cor1", Task.RATIO_CONJ1: "Conj1"}

THM1_NAMES = ("NotApplicable", "Case1", "Case2", "Case3")
THM2_NAMES = ("NotApplicable", "Case1", "Case2")
_WORDS = [b"false", b"true", *(s.encode() for s in THM1_NAMES), *(s.encode() for s in THM2_NAMES)]
WORDS = np.zeros((len(_WORDS), 16), dtype=np.uint8)
for _i, _w in enumerate(_WORDS):
    WORDS[_i, : len(_w)] = np.frombuffer(_w, dtype=np.uint8)


class Real(float):
    """Marks a cell rendered with 12 significant digits."""


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Real):
        return format(float(v), ".12g")
    return str(v)


def _json_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Real):
        text = format(float(v), ".12g")
        return text if math.isfinite(v) else json.dumps(text)
    return json.dumps(str(v))


def render(task: Task, rows: list[tuple], fmt: str) -> bytes:
    if fmt == "csv":
        return "".join(",".join(format_cell(v) for v in r) + "\n" for r in rows).encode()
    cols = COLUMNS[task]
    return "".join(
        "{" + ",".join(f'"{c}":{_json_cell(v)}' for c, v in zip(cols, r)) + "}\n" for r in rows
    ).encode()


def header(task: Task, fmt: str) -> bytes:
    return (",".join(COLUMNS[task]) + "\n").encode() if fmt == "csv" else b""


# ------------------------------------------------------------------ bounds


def bound_float(kind: str, a: int, d: int, N: int, thm1: int, thm2: int, epsilon: float) -> float:
    """Float64 value of a bound; thm1/thm2 are case codes (1-based)."""
    fa, fd, fn = float(a), float(d), float(N)
    if kind == "Thm1":
        if thm1 == 1:
            return math.pow(fa, 0.25) * math.sqrt(fd) / math.sqrt(fn)
        if thm1 == 2:
            return math.pow(fd, 0.75) / math.pow(fn, 0.25)
        return math.sqrt(fd)
    if kind == "Thm2":
        if thm2 == 1:
            return math.sqrt(fa) / math.sqrt(fn)
        return fd / math.pow(fa, 0.25)
    if kind == "Cor1":
        return math.pow(fd, 0.75)
    return math.sqrt(float(a + N * d)) / fn * math.pow(fd, epsilon)


def _bound_array(kind: str, a, d, n, thm1, thm2, epsilon: float) -> np.ndarray:
    fa, fd, fn = a.astype(np.float64), d.astype(np.float64), n.astype(np.float64)
    if kind == "Thm1":
        return np.where(
            thm1 == 1,
            fa**0.25 * np.sqrt(fd) / np.sqrt(fn),
            np.where(thm1 == 2, fd**0.75 / fn**0.25, np.sqrt(fd)),
        )
    if kind == "Thm2":
        return np.where(thm2 == 1, np.sqrt(fa) / np.sqrt(fn), fd / fa**0.25)
    if kind == "Cor1":
        return fd**0.75
    return np.sqrt((a + n * d).astype(np.float64)) / fn * fd**epsilon


def _applies(kind: str, adm, conj1, thm1, thm2):
    if kind in ("Thm1", "Cor1"):
        return thm1 != 0
    if kind == "Thm2":
        return thm2 != 0
    return adm & conj1


def _case_label(kind: str, thm1: int, thm2: int) -> str:
    if kind == "Thm1":
        return THM1_NAMES[thm1]
    if kind == "Thm2":
        return THM2_NAMES[thm2]
    return "all"


# ------------------------------------------------------------ chunk planning


@dataclass(frozen=True)
class Plan:
    task: Task
    chunks: int
    a_per_chunk: int = 0
    points_per_chunk: int = 0


def _points(spec: GridSpec) -> list[tuple]:
    names = {
        Task.FAMILY_SCAN: ("dprime", "X"),
        Task.SALIE_SCAN: ("q", "a", "H", "K"),
        Task.HUXLEY_SCAN: ("a", "d", "N"),
        Task.POISSON_SCAN: ("d", "M", "A", "h"),
    }[spec.task]
    return list(itertools.product(*(spec.axis_values(n) for n in names)))


def plan(spec: GridSpec) -> Plan:
    if spec.task in ADN_TASKS:
        a_vals = spec.axis_values("a")
        per_a = len(spec.axis_values("d")) * len(spec.axis_values("N"))
        k = max(1, ADN_TARGET_ROWS // max(per_a, 1))
        return Plan(spec.task, -(-len(a_vals) // k), a_per_chunk=k)
    n = len(_points(spec))
    k = POINTS_PER_CHUNK[spec.task]
    return Plan(spec.task, -(-n // k), points_per_chunk=k)


def _fast_ok(a_max: int, d_max: int, n_max: int) -> bool:
    nd = n_max * d_max
    return a_max + nd < K.INT64_SAFE and 8_000_000 * a_max**3 < K.CLASSIFY_SAFE and 32 * nd**4 < K.CLASSIFY_SAFE


def _chunk_axes(spec: GridSpec, pl: Plan, index: int):
    a_vals = spec.axis_values("a")[index * pl.a_per_chunk : (index + 1) * pl.a_per_chunk]
    return a_vals, spec.axis_values("d"), spec.axis_values("N")


# ------------------------------------------------------- (a, d, N) evaluation


def _adn_arrays(a_vals, d_vals, n_vals):
    """Delta and regime arrays over the product, in (a, d, N) order."""
    A = np.array(a_vals, dtype=np.int64)
    D = np.array(d_vals, dtype=np.int64)
    Nn = np.array(n_vals, dtype=np.int64)
    res = K.delta_grid(A, D, Nn, 0)
    flags, codes = K.classify_grid(A, D, Nn)
    a_col = np.repeat(A, D.size * Nn.size)
    d_col = np.tile(np.repeat(D, Nn.size), A.size)
    n_col = np.tile(Nn, A.size * D.size)
    return A, D, Nn, res, flags, codes, a_col, d_col, n_col


def _filter_mask(spec: GridSpec, flags, codes) -> np.ndarray:
    keep = np.ones(flags.shape[0], dtype=np.bool_)
    cols = {
        "admissible_paper": flags[:, 0],
        "contains_square": flags[:, 1],
        "conj1_applicable": flags[:, 2],
        "conj2_applicable": ~flags[:, 2],
        "note_range": flags[:, 3],
        "thm1_boundary": flags[:, 4],
    }
    for f in spec.filters:
        if f.op in ("is", "not"):
            hit = cols[f.field]
            keep &= hit if f.op == "is" else ~hit
        else:
            names = THM1_NAMES if f.field == "thm1_case" else THM2_NAMES
            hit = codes[:, 1 if f.field == "thm1_case" else 2] == names.index(f.value)
            keep &= hit if f.op == "==" else ~hit
    return keep


def _adn_rows_generic(spec: GridSpec, a_vals, d_vals, n_vals) -> list[tuple]:
    kind = BOUND_KIND.get(spec.task)
    eps = float(spec.param("epsilon"))
    rows = []
    for a in a_vals:
        for d in d_vals:
            for n in n_vals:
                p = ProgressionParams(a, d, n)
                rep = classify(p)
                info = rep.as_dict()
                if not all(f.test(info) for f in spec.filters):
                    continue
                t1 = THM1_NAMES.index(info["thm1_case"])
                t2 = THM2_NAMES.index(info["thm2_case"])
                if kind and not _applies(kind, rep.admissible_paper, rep.conj1_applicable, t1, t2):
                    continue
                r = delta(p)
                row = (a, d, n, r.delta, r.n_star, r.m_star, rep.admissible_paper, rep.contains_square, info["thm1_case"], info["thm2_case"])
                if kind:
                    b = bound_float(kind, a, d, n, t1, t2, eps)
                    row += (kind, Real(b), Real(r.delta / b))
                rows.append(row)
    return rows


def _adn_chunk(spec: GridSpec, pl: Plan, index: int, fmt: str, fast: bool) -> tuple[bytes, int]:
    a_vals, d_vals, n_vals = _chunk_axes(spec, pl, index)
    if not a_vals or not d_vals or not n_vals:
        return b"", 0
    if not (fast and _fast_ok(a_vals[-1], d_vals[-1], n_vals[-1])):
        rows = _adn_rows_generic(spec, a_vals, d_vals, n_vals)
        return render(spec.task, rows, fmt), len(rows)

    A, D, Nn, res, flags, codes, a_col, d_col, n_col = _adn_arrays(a_vals, d_vals, n_vals)
    keep = _filter_mask(spec, flags, codes)
    kind = BOUND_KIND.get(spec.task)
    if kind:
        keep &= _applies(kind, flags[:, 0], flags[:, 2], codes[:, 1], codes[:, 2])
    if spec.task is Task.DELTA and fmt == "csv":
        data = K.write_delta_rows(A, D, Nn, res, flags, codes, keep, WORDS)
        return data.tobytes(), int(keep.sum())

    eps = float(spec.param("epsilon"))
    rows = []
    for i in np.flatnonzero(keep):
        a, d, n = int(a_col[i]), int(d_col[i]), int(n_col[i])
        t1, t2 = int(codes[i, 1]), int(codes[i, 2])
        dl = int(res[i, 0])
        row = (a, d, n, dl, int(res[i, 1]), int(res[i, 2]), bool(flags[i, 0]), bool(flags[i, 1]), THM1_NAMES[t1], THM2_NAMES[t2])
        if kind:
            b = bound_float(kind, a, d, n, t1, t2, eps)
            row += (kind, Real(b), Real(dl / b))
        rows.append(row)
    return render(spec.task, rows, fmt), len(rows)


# ------------------------------------------------------------ other tasks


def _family_rows(spec, pts):
    rows, failures = [], 0
    for dp, X in pts:
        inst = family_instance(dp, X)
        rng = valid_n_range(inst)
        for n in rng:
            r = delta(ProgressionParams(inst.a, inst.d, n))
            bound_ok = 1800 * r.delta >= inst.d
            eps_ok = certify_epsilons(with_n(inst, n)).all_ok
            if rng.theorem_applies and not (bound_ok and eps_ok):
                failures += 1
            rows.append((dp, X, n, inst.d, inst.a, r.delta, bound_ok, eps_ok))
    return rows, failures


def _salie_rows(spec, pts):
    lams, mus = spec.float_list("lambda"), spec.float_list("mu")
    eps = float(spec.param("epsilon"))
    squares = spec.param("include_squares").lower() == "true"
    rows = []
    for q, a, H, Kk in pts:
        if q % 2 == 0 or math.gcd(a, q) != 1 or (is_square(q) and not squares):
            continue
        for lam in lams:
            for mu in mus:
                s = SalieParams(a, q, H, Kk, lam, mu, eps)
                v, b = abs(salie_sum(s)), conjecture3_bound(s)
                rows.append((q, a, H, Kk, Real(lam), Real(mu), Real(v), Real(b), Real(v / b)))
    return rows, 0


def _huxley_rows(spec, pts):
    curves = [c.strip() for c in spec.param("curve").split(",")]
    epss = sorted({Fraction(s.strip()) for s in spec.param("eps").split(",")})
    rows, failures = [], 0
    for a, d, n in pts:
        p = ProgressionParams(a, d, n)
        for c in sorted(curves):
            for e in epss:
                h = huxley_setup(Curve(c), p, e)
                if huxley_hypotheses(h):
                    continue
                count = huxley_count(h)
                lb = huxley_lower_bound(h)
                ok = count >= lb
                failures += not ok
                rows.append((c, a, d, n, h.M, h.C, Real(float(h.Delta)), Real(float(h.eps)), count, Real(float(lb)), ok))
    return rows, failures


def _poisson_rows(spec, pts):
    kmax = int(spec.param("kmax"))
    rows, failures = [], 0
    for d, M, A, hh in pts:
        if d % 2 == 0:
            continue
        s = AnalyticSetup(1, d, 1, A, M, 0.25)
        lhs, rhs, tail = poisson_check(s, hh, kmax)
        diff = abs(complex(lhs) - complex(rhs))
        budget = tail + lhs.abs_error_bound + rhs.abs_error_bound
        ok = diff <= budget
        failures += not ok
        rows.append((d, M, A, hh, kmax, Real(diff), Real(budget), ok))
    return rows, failures


_POINT_TASKS = {
    Task.FAMILY_SCAN: _family_rows,
    Task.SALIE_SCAN: _salie_rows,
    Task.HUXLEY_SCAN: _huxley_rows,
    Task.POISSON_SCAN: _poisson_rows,
}


def evaluate_chunk(spec: GridSpec, index: int, fmt: str = "csv", fast: bool = True) -> tuple[bytes, int, int]:
    """(rendered bytes, row count, failure count) for chunk ``index``."""
    pl = plan(spec)
    if spec.task in ADN_TASKS:
        data, n = _adn_chunk(spec, pl, index, fmt, fast)
        return data, n, 0
    pts = _points(spec)[index * pl.points_per_chunk : (index + 1) * pl.points_per_chunk]
    rows, failures = _POINT_TASKS[spec.task](spec, pts)
    return render(spec.task, rows, fmt), len(rows), failures


def _evaluate_star(args):
    return evaluate_chunk(*args)


# ---------------------------------------------------------------- driver


@dataclass
class SweepSummary:
    grid_hash: str
    chunks_total: int
    chunks_done: int
    rows: int
    failures: int

    @property
    def complete(self) -> bool:
        return self.chunks_done == self.chunks_total


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("APSQ_JOBS", "1")))
    except ValueError:
        return 1


def warm_up() -> None:
    """Compile (or load cached) kernels before forking workers."""
    one = np.array([1], dtype=np.int64)
    res = K.delta_grid(one, one, one, 0)
    flags, codes = K.classify_grid(one, one, one)
    K.write_delta_rows(one, one, one, res, flags, codes, np.ones(1, dtype=np.bool_), WORDS)


def _read_checkpoint(path: Path, grid_hash: str, fmt: str):
    """(offset, chunks_done, rows, failures) from a checkpoint, or None."""
    if not path.exists():
        return None
    lines = path.read_text().splitlines()
    try:
        head = json.loads(lines[0])
    except (IndexError, json.JSONDecodeError):
        return None
    if head.get("grid_hash") != grid_hash or head.get("format") != fmt:
        raise SpecError("checkpoint", f"{path} belongs to a different grid or format")
    state = (head["offset"], 0, 0, 0)
    for line in lines[1:]:
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            break  # torn final line
        state = (rec["offset"], rec["chunk"] + 1, rec["rows"], rec["failures"])
    return state


def run_sweep(
    spec: GridSpec,
    out: str | Path,
    *,
    jobs: int | None = None,
    fmt: str = "csv",
    checkpoint: str | Path | None = None,
    max_chunks: int | None = None,
    fresh: bool = False,
    fast: bool = True,
) -> SweepSummary:
    """Write the sweep of ``spec`` to ``out``.

    ``max_chunks`` stops after that many newly computed chunks (the state is
    checkpointed, so a later call resumes). ``fresh`` ignores an existing
    checkpoint. ``fast=False`` forces the pure-Python evaluation path.
    """
    if fmt not in ("csv", "jsonl"):
        raise InvalidArgument(f"unknown format {fmt!r}")
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    out = Path(out)
    ckpt = Path(checkpoint) if checkpoint is not None else out.with_name(out.name + ".ckpt")
    gh = spec.grid_hash()
    pl = plan(spec)

    state = None if fresh else _read_checkpoint(ckpt, gh, fmt)
    if state is not None and out.exists() and out.stat().st_size >= state[0]:
        offset, start, rows, failures = state
        fh = open(out, "r+b")
        fh.truncate(offset)
        fh.seek(offset)
    else:
        start, rows, failures = 0, 0, 0
        fh = open(out, "wb")
        fh.write(header(spec.task, fmt))
        fh.flush()
        ckpt.write_text(json.dumps({"grid_hash": gh, "format": fmt, "chunks": pl.chunks, "offset": fh.tell()}) + "\n")

    stop = pl.chunks if max_chunks is None else min(pl.chunks, start + max_chunks)
    todo = range(start, stop)
    done = start
    with fh, open(ckpt, "a") as ck:

        def commit(i, result):
            nonlocal rows, failures, done
            data, n, f = result
            fh.write(data)
            fh.flush()
            rows += n
            failures += f
            done = i + 1
            ck.write(json.dumps({"chunk": i, "offset": fh.tell(), "rows": rows, "failures": failures}) + "\n")
            ck.flush()

        if jobs == 1 or len(todo) <= 1:
            for i in todo:
                commit(i, evaluate_chunk(spec, i, fmt, fast))
        else:
            if fast and spec.task in ADN_TASKS:
                warm_up()
            with get_context("fork").Pool(jobs) as pool:
                pending: deque = deque()
                it = iter(todo)
                for i in it:
                    pending.append((i, pool.apply_async(_evaluate_star, ((spec, i, fmt, fast),))))
                    if len(pending) >= 2 * jobs:
                        break
                while pending:
                    i, job = pending.popleft()
                    commit(i, job.get())
                    nxt = next(it, None)
                    if nxt is not None:
                        pending.append((nxt, pool.apply_async(_evaluate_star, ((spec, nxt, fmt, fast),))))
    return SweepSummary(gh, pl.chunks, done, rows, failures)
