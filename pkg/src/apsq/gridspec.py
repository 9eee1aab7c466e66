"""Sweep grid files.

A grid file is plain ``key=value`` lines; ``#`` starts a comment::

    task=Delta
    a=0..5000
    d=1..60
    N=1..60
    N.step=geometric 1.5
    filter=admissible_paper
    filter=thm1_case=Case3

Axes take ``lo..hi`` (with an optional ``<axis>.step`` of ``linear k`` or
``geometric r``), a comma list, or a single integer.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from apsq.errors import SpecError


class Task(str, enum.Enum):
    DELTA = "Delta"
    RATIO_THM1 = "RatioThm1"
    RATIO_THM2 = "RatioThm2"
    RATIO_COR1 = "RatioCor1"
    RATIO_CONJ1 = "RatioConj1"
    FAMILY_SCAN = "FamilyScan"
    SALIE_SCAN = "SalieScan"
    HUXLEY_SCAN = "HuxleyScan"
    POISSON_SCAN = "PoissonScan"


ADN_TASKS = {Task.DELTA, Task.RATIO_THM1, Task.RATIO_THM2, Task.RATIO_COR1, Task.RATIO_CONJ1}

REQUIRED_AXES = {
    **{t: ("a", "d", "N") for t in ADN_TASKS},
    Task.FAMILY_SCAN: ("dprime", "X"),
    Task.SALIE_SCAN: ("q", "a", "H", "K"),
    Task.HUXLEY_SCAN: ("a", "d", "N"),
    Task.POISSON_SCAN: ("d", "M", "A", "h"),
}

# non-axis keys each task understands, with defaults
TASK_PARAMS = {
    **{t: {"epsilon": "0.05"} for t in ADN_TASKS},
    Task.FAMILY_SCAN: {},
    Task.SALIE_SCAN: {"lambda": "0", "mu": "0", "epsilon": "0.05", "include_squares": "false"},
    Task.HUXLEY_SCAN: {"curve": "parabola", "eps": "0.25"},
    Task.POISSON_SCAN: {"kmax": "10000"},
}

AXIS_MINIMUM = {"d": 1, "N": 1, "dprime": 1, "X": 1, "q": 3, "H": 1, "K": 1, "M": 1}

BOOL_FIELDS = {
    "admissible_paper",
    "contains_square",
    "conj1_applicable",
    "conj2_applicable",
    "note_range",
    "thm1_boundary",
}
ENUM_FIELDS = {"thm1_case": ("Case1", "Case2", "Case3", "NotApplicable"), "thm2_case": ("Case1", "Case2", "NotApplicable")}


@dataclass(frozen=True)
class Axis:
    name: str
    lo: int
    hi: int
    kind: str = "linear"  # linear | geometric | list
    step: Fraction = Fraction(1)
    listed: tuple[int, ...] = ()

    def values(self) -> list[int]:
        if self.kind == "list":
            return sorted(set(self.listed))
        out = []
        v = self.lo
        while v <= self.hi:
            out.append(v)
            if self.kind == "linear":
                v += int(self.step)
            else:
                nxt = v * self.step
                v = max(v + 1, -(-nxt.numerator // nxt.denominator))
        return out

    def canonical(self) -> str:
        if self.kind == "list":
            return f"{self.name}=" + ",".join(str(v) for v in self.values())
        return f"{self.name}={self.lo}..{self.hi}\n{self.name}.step={self.kind} {self.step}"


@dataclass(frozen=True)
class Filter:
    field: str
    op: str  # "is" | "not" | "==" | "!="
    value: str = ""

    def canonical(self) -> str:
        if self.op == "is":
            return self.field
        if self.op == "not":
            return "!" + self.field
        return f"{self.field}{'=' if self.op == '==' else '!='}{self.value}"

    def test(self, report: dict) -> bool:
        v = report[self.field]
        if self.op == "is":
            return bool(v)
        if self.op == "not":
            return not v
        if self.op == "==":
            return v == self.value
        return v != self.value


@dataclass(frozen=True)
class GridSpec:
    task: Task
    axes: dict = field(default_factory=dict)
    filters: tuple = ()
    params: dict = field(default_factory=dict)

    def axis_values(self, name: str) -> list[int]:
        return self.axes[name].values()

    def param(self, key: str) -> str:
        return self.params.get(key, TASK_PARAMS[self.task].get(key, ""))

    def float_list(self, key: str) -> list[float]:
        return sorted({float(x) for x in self.param(key).split(",") if x.strip()})

    def canonical(self) -> str:
        lines = [f"task={self.task.value}"]
        lines += [self.axes[k].canonical() for k in sorted(self.axes)]
        lines += [f"filter={f.canonical()}" for f in self.filters]
        merged = {**TASK_PARAMS[self.task], **self.params}
        lines += [f"{k}={merged[k]}" for k in sorted(merged)]
        return "\n".join(lines) + "\n"

    def grid_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def with_task(self, task: Task | str) -> "GridSpec":
        task = Task(task)
        return parse_gridspec(self.canonical().replace(f"task={self.task.value}", f"task={task.value}", 1))


def _parse_int(text: str, path: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise SpecError(path, f"expected an integer, got {text.strip()!r}") from None


def _parse_axis(name: str, text: str, step: str | None) -> Axis:
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = _parse_int(lo_s, name + ".lo"), _parse_int(hi_s, name + ".hi")
        if lo > hi:
            raise SpecError(name, f"lo ({lo}) must not exceed hi ({hi})")
        kind, amount = "linear", Fraction(1)
        if step is not None:
            parts = step.split()
            if len(parts) != 2 or parts[0] not in ("linear", "geometric"):
                raise SpecError(name + ".step", "expected 'linear <k>' or 'geometric <ratio>'")
            kind = parts[0]
            try:
                amount = Fraction(parts[1])
            except (ValueError, ZeroDivisionError):
                raise SpecError(name + ".step", f"bad number {parts[1]!r}") from None
            if kind == "linear" and (amount.denominator != 1 or amount < 1):
                raise SpecError(name + ".step", "linear step must be a positive integer")
            if kind == "geometric" and amount <= 1:
                raise SpecError(name + ".step", "geometric ratio must be > 1")
            if kind == "geometric" and lo < 1:
                raise SpecError(name + ".lo", "geometric axes must start at >= 1")
        axis = Axis(name, lo, hi, kind, amount)
    else:
        if step is not None:
            raise SpecError(name + ".step", "step given for a list axis")
        vals = tuple(_parse_int(v, name) for v in text.split(",") if v.strip())
        if not vals:
            raise SpecError(name, "empty axis")
        axis = Axis(name, min(vals), max(vals), "list", Fraction(1), vals)
    low = AXIS_MINIMUM.get(name, 0)
    if axis.lo < low:
        raise SpecError(name + ".lo", f"must be >= {low}")
    return axis


def _parse_filter(text: str, path: str) -> Filter:
    text = text.strip()
    for op, sym in (("!=", "!="), ("==", "=")):
        if sym in text:
            name, value = (s.strip() for s in text.split(sym, 1))
            if name not in ENUM_FIELDS:
                raise SpecError(path, f"unknown enum field {name!r}")
            if value not in ENUM_FIELDS[name]:
                raise SpecError(path, f"{name} has no value {value!r}")
            return Filter(name, op, value)
    neg = text.startswith("!")
    name = text[1:].strip() if neg else text
    if name not in BOOL_FIELDS:
        raise SpecError(path, f"unknown boolean field {name!r}")
    return Filter(name, "not" if neg else "is")


def parse_gridspec(text: str) -> GridSpec:
    raw: dict[str, str] = {}
    filters: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}", "expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "filter":
            filters.append(value)
        elif key in raw:
            raise SpecError(key, f"duplicate key on line {lineno}")
        else:
            raw[key] = value

    if "task" not in raw:
        raise SpecError("task", "missing task= line")
    try:
        task = Task(raw.pop("task"))
    except ValueError:
        raise SpecError("task", f"unknown task; choose from {[t.value for t in Task]}") from None

    axes = {}
    for name in REQUIRED_AXES[task]:
        if name not in raw:
            raise SpecError(name, f"task {task.value} needs axis {name!r}")
        axes[name] = _parse_axis(name, raw.pop(name), raw.pop(name + ".step", None))

    params = {}
    known = TASK_PARAMS[task]
    for key, value in raw.items():
        if key not in known:
            raise SpecError(key, f"unknown key for task {task.value}")
        params[key] = value
    for key in ("epsilon", "lambda", "mu", "eps"):
        if key in known:
            for part in params.get(key, known[key]).split(","):
                try:
                    Fraction(part.strip())
                except ValueError:
                    raise SpecError(key, f"bad number {part.strip()!r}") from None
    if "curve" in known:
        for c in params.get("curve", known["curve"]).split(","):
            if c.strip() not in ("parabola", "root"):
                raise SpecError("curve", f"unknown curve {c.strip()!r}")
    if "kmax" in known:
        _parse_int(params.get("kmax", known["kmax"]), "kmax")

    if filters and task not in ADN_TASKS:
        raise SpecError("filter", f"task {task.value} takes no regime filters")
    parsed = tuple(_parse_filter(f, f"filter[{i}]") for i, f in enumerate(filters))
    return GridSpec(task, axes, parsed, params)


def load_gridspec(path: str | Path) -> GridSpec:
    return parse_gridspec(Path(path).read_text())
