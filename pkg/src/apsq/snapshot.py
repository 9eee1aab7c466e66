"""Regression snapshots of maximal ratios over a sweep grid.

The scan uses float64 to locate the maximum of delta/bound per case (first
index wins on ties, in sweep order); the recorded value is then recomputed
at that point in 50-digit arithmetic. A stored snapshot is checked by
recomputing it and comparing at relative tolerance 1e-9.
"""

from __future__ import annotations

import json
from multiprocessing import get_context
from pathlib import Path

import mpmath
import numpy as np

from apsq import __version__
from apsq.delta import ProgressionParams, delta
from apsq.errors import SpecError
from apsq.gridspec import ADN_TASKS, GridSpec, Task
from apsq.regimes import BoundKind, classify, ratio
from apsq.sweep import (
    BOUND_KIND,
    THM1_NAMES,
    THM2_NAMES,
    _adn_arrays,
    _applies,
    _bound_array,
    _case_label,
    _chunk_axes,
    _fast_ok,
    _filter_mask,
    _points,
    _salie_rows,
    bound_float,
    default_jobs,
    plan,
    warm_up,
)

SNAPSHOT_TASKS = (Task.RATIO_THM1, Task.RATIO_THM2, Task.RATIO_COR1, Task.RATIO_CONJ1, Task.SALIE_SCAN)
REL_TOL = 1e-9


def _merge(best: dict, case: str, value: float, where: tuple, count: int) -> None:
    cur = best.get(case)
    if cur is None:
        best[case] = [value, where, count]
        return
    cur[2] += count
    if value > cur[0]:
        cur[0], cur[1] = value, where


def _adn_chunk_best(spec: GridSpec, index: int, fast: bool = True) -> dict:
    kind = BOUND_KIND[spec.task]
    eps = float(spec.param("epsilon"))
    a_vals, d_vals, n_vals = _chunk_axes(spec, plan(spec), index)
    best: dict = {}
    if not a_vals:
        return best
    if fast and _fast_ok(a_vals[-1], d_vals[-1], n_vals[-1]):
        _, _, _, res, flags, codes, a_col, d_col, n_col = _adn_arrays(a_vals, d_vals, n_vals)
        t1, t2 = codes[:, 1], codes[:, 2]
        mask = _filter_mask(spec, flags, codes) & _applies(kind, flags[:, 0], flags[:, 2], t1, t2)
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return best
        r = res[idx, 0] / _bound_array(kind, a_col[idx], d_col[idx], n_col[idx], t1[idx], t2[idx], eps)
        labels = np.array([_case_label(kind, int(x), int(y)) for x, y in zip(t1[idx], t2[idx])]) if kind in ("Thm1", "Thm2") else None
        groups = sorted(set(labels.tolist())) if labels is not None else ["all"]
        for case in groups:
            sel = np.flatnonzero(labels == case) if labels is not None else np.arange(idx.size)
            j = sel[int(np.argmax(r[sel]))]
            i = idx[j]
            _merge(best, case, float(r[j]), (int(a_col[i]), int(d_col[i]), int(n_col[i])), int(sel.size))
        return best

    for a in a_vals:
        for d in d_vals:
            for n in n_vals:
                p = ProgressionParams(a, d, n)
                rep = classify(p)
                info = rep.as_dict()
                if not all(f.test(info) for f in spec.filters):
                    continue
                c1, c2 = THM1_NAMES.index(info["thm1_case"]), THM2_NAMES.index(info["thm2_case"])
                if not _applies(kind, rep.admissible_paper, rep.conj1_applicable, c1, c2):
                    continue
                value = delta(p).delta / bound_float(kind, a, d, n, c1, c2, eps)
                _merge(best, _case_label(kind, c1, c2), value, (a, d, n), 1)
    return best


def _salie_chunk_best(spec: GridSpec, index: int, fast: bool = True) -> dict:
    pl = plan(spec)
    pts = _points(spec)[index * pl.points_per_chunk : (index + 1) * pl.points_per_chunk]
    rows, _ = _salie_rows(spec, pts)
    best: dict = {}
    for q, a, H, Kk, lam, mu, _, _, r in rows:
        _merge(best, "all", float(r), (q, a, H, Kk, float(lam), float(mu)), 1)
    return best


def _chunk_best(args) -> dict:
    spec, index, fast = args
    if spec.task in ADN_TASKS:
        return _adn_chunk_best(spec, index, fast)
    return _salie_chunk_best(spec, index, fast)


def _argmax_dict(task: Task, where: tuple) -> dict:
    if task is Task.SALIE_SCAN:
        q, a, H, Kk, lam, mu = where
        return {"q": str(q), "a": str(a), "H": str(H), "K": str(Kk), "lambda": repr(lam), "mu": repr(mu)}
    return dict(zip(("a", "d", "N"), (str(v) for v in where)))


def _exact(spec: GridSpec, where: tuple, value: float) -> str:
    if spec.task is Task.SALIE_SCAN:
        return repr(value)
    kind = BoundKind(BOUND_KIND[spec.task])
    v = ratio(ProgressionParams(*where), kind, float(spec.param("epsilon")))
    return mpmath.nstr(v, 25)


def compute_snapshot(spec: GridSpec, task: Task | str | None = None, *, jobs: int | None = None, fast: bool = True) -> dict:
    if task is not None and Task(task) is not spec.task:
        spec = spec.with_task(task)
    if spec.task not in SNAPSHOT_TASKS:
        raise SpecError("task", f"snapshots are defined for {[t.value for t in SNAPSHOT_TASKS]}")
    jobs = default_jobs() if jobs is None else max(1, jobs)
    args = [(spec, i, fast) for i in range(plan(spec).chunks)]
    if jobs > 1 and len(args) > 1:
        if spec.task in ADN_TASKS and fast:
            warm_up()
        with get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_chunk_best, args, chunksize=1)
    else:
        parts = [_chunk_best(a) for a in args]

    best: dict = {}
    for part in parts:  # index order, so the first maximum is kept
        for case in sorted(part):
            value, where, count = part[case]
            _merge(best, case, value, where, count)

    cases = {}
    for case in sorted(best):
        value, where, count = best[case]
        cases[case] = {"count": count, "max_ratio": _exact(spec, where, value), "argmax": _argmax_dict(spec.task, where)}
    top = max(cases.values(), key=lambda c: mpmath.mpf(c["max_ratio"]), default=None)
    return {
        "task": spec.task.value,
        "grid_hash": spec.grid_hash(),
        "epsilon": spec.param("epsilon"),
        "max_ratio": top["max_ratio"] if top else None,
        "argmax": top["argmax"] if top else None,
        "cases": cases,
        "version": __version__,
    }


def write_snapshot(snap: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(snap, indent=2, sort_keys=True) + "\n")


def load_snapshot(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def _close(a: str | None, b: str | None) -> bool:
    if a is None or b is None:
        return a is b
    x, y = mpmath.mpf(a), mpmath.mpf(b)
    return abs(x - y) <= REL_TOL * max(abs(x), abs(y))


def compare_snapshots(stored: dict, fresh: dict) -> list[str]:
    """Differences between a stored and a recomputed snapshot (empty if they agree)."""
    problems = []
    for key in ("task", "grid_hash"):
        if stored.get(key) != fresh.get(key):
            problems.append(f"{key}: stored {stored.get(key)!r}, computed {fresh.get(key)!r}")
    if not _close(stored.get("max_ratio"), fresh.get("max_ratio")):
        problems.append(f"max_ratio: stored {stored.get('max_ratio')}, computed {fresh.get('max_ratio')}")
    old, new = stored.get("cases", {}), fresh.get("cases", {})
    for case in sorted(set(old) | set(new)):
        if case not in old or case not in new:
            problems.append(f"cases.{case}: present in only one snapshot")
            continue
        o, n = old[case], new[case]
        if o["count"] != n["count"]:
            problems.append(f"cases.{case}.count: stored {o['count']}, computed {n['count']}")
        if o["argmax"] != n["argmax"]:
            problems.append(f"cases.{case}.argmax: stored {o['argmax']}, computed {n['argmax']}")
        if not _close(o["max_ratio"], n["max_ratio"]):
            problems.append(f"cases.{case}.max_ratio: stored {o['max_ratio']}, computed {n['max_ratio']}")
    return problems
