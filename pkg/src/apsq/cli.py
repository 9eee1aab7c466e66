"""Command-line front end: ``apsq <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error (bad arguments,
malformed grid spec, unmet hypotheses).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from apsq import __version__
from apsq.analytic import AnalyticSetup, Curve, huxley_count, huxley_hypotheses, huxley_lower_bound, huxley_setup, poisson_check
from apsq.delta import ProgressionParams, delta
from apsq.errors import InvalidArgument, RegimeMismatch, SpecError
from apsq.expsums import GaussSumArgs, SalieParams, conjecture3_bound, gauss_sum_closed, gauss_sum_direct, salie_sum
from apsq.families import certify_epsilons, family_instance, lower_bound_witness, valid_n_range, with_n
from apsq.gridspec import Task, load_gridspec
from apsq.regimes import classify
from apsq.snapshot import compare_snapshots, compute_snapshot, load_snapshot, write_snapshot
from apsq.sweep import default_jobs, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _b(v: bool) -> str:
    return "true" if v else "false"


def _cmd_delta(args) -> int:
    p = ProgressionParams(args.a, args.d, args.N)
    r = delta(p)
    if args.json:
        print(json.dumps({"a": str(p.a), "d": str(p.d), "N": str(p.N), "delta": str(r.delta), "n": str(r.n_star), "m": str(r.m_star), "algorithm": r.algorithm.value}))
    else:
        print(f"delta={r.delta} n={r.n_star} m={r.m_star}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    rep = classify(ProgressionParams(args.a, args.d, args.N))
    for k, v in rep.as_dict().items():
        print(f"{k}={_b(v) if isinstance(v, bool) else v}")
    return EXIT_OK


def _cmd_family(args) -> int:
    inst = family_instance(args.dprime, args.x)
    rng = valid_n_range(inst)
    print(f"d={inst.d} a={inst.a} A={inst.A} n_range={rng.n_min}..{rng.n_max} theorem_applies={_b(rng.theorem_applies)}")
    if args.scan_n:
        ns = list(rng)
    elif args.n is not None:
        ns = [args.n]
    else:
        return EXIT_OK
    status = EXIT_OK
    for n in ns:
        if args.verify:
            res, ok = lower_bound_witness(inst, n)
            eps_ok = certify_epsilons(with_n(inst, n)).all_ok
            print(f"N={n} d={inst.d} a={inst.a} delta={res.delta} bound_ok={_b(ok)} eps_ok={_b(eps_ok)}")
            if not (ok and eps_ok):
                status = EXIT_FAIL
        else:
            res = delta(ProgressionParams(inst.a, inst.d, n))
            print(f"N={n} d={inst.d} a={inst.a} delta={res.delta}")
    return status


def _cmd_salie(args) -> int:
    s = SalieParams(args.a, args.q, args.H, args.K, args.lam, args.mu, args.epsilon)
    v = salie_sum(s)
    b = conjecture3_bound(s)
    print(f"abs_sum={abs(v):.12g} bound={b:.12g} ratio={abs(v) / b:.12g} error_bound={v.abs_error_bound:.3g}")
    return EXIT_OK


def _cmd_gauss(args) -> int:
    g = GaussSumArgs(args.a, args.b, args.q)
    direct = gauss_sum_direct(g)
    print(f"direct={direct.re:.12g}{direct.im:+.12g}i abs={abs(direct):.12g}")
    if args.q % 2 == 1 and math.gcd(args.a, args.q) == 1:
        closed = gauss_sum_closed(g)
        agree = abs(complex(direct) - complex(closed)) <= 1e-9 * math.sqrt(args.q)
        print(f"closed={closed.re:.12g}{closed.im:+.12g}i agree={_b(agree)}")
        return EXIT_OK if agree else EXIT_FAIL
    return EXIT_OK


def _cmd_huxley(args) -> int:
    h = huxley_setup(Curve(args.curve), ProgressionParams(args.a, args.d, args.n), args.eps)
    bad = huxley_hypotheses(h)
    if bad:
        raise RegimeMismatch("; ".join(bad))
    count = huxley_count(h)
    lb = huxley_lower_bound(h)
    ok = count >= lb
    print(f"curve={h.curve.value} M={h.M} C={h.C} Delta={float(h.Delta):.12g} eps={float(h.eps):.12g} count={count} lower_bound={float(lb):.12g} ok={_b(ok)}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_poisson(args) -> int:
    A = args.A if args.A is not None else math.isqrt(args.a)
    s = AnalyticSetup(max(args.a, 1), args.d, 1, A, args.m_window, 0.25)
    lhs, rhs, tail = poisson_check(s, args.h, args.kmax)
    diff = abs(complex(lhs) - complex(rhs))
    budget = tail + lhs.abs_error_bound + rhs.abs_error_bound
    ok = diff <= budget
    print(f"lhs={lhs.re:.12g}{lhs.im:+.12g}i rhs={rhs.re:.12g}{rhs.im:+.12g}i abs_diff={diff:.3g} tail_bound={budget:.3g} ok={_b(ok)}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_sweep(args) -> int:
    spec = load_gridspec(args.spec)
    summary = run_sweep(
        spec,
        args.out,
        jobs=args.jobs,
        fmt="jsonl" if args.json else "csv",
        checkpoint=args.checkpoint,
        max_chunks=args.max_chunks,
        fresh=args.fresh,
    )
    print(
        f"task={spec.task.value} grid_hash={summary.grid_hash[:16]} chunks={summary.chunks_done}/{summary.chunks_total} "
        f"rows={summary.rows} failures={summary.failures} complete={_b(summary.complete)}"
    )
    return EXIT_FAIL if summary.failures else EXIT_OK


def _cmd_snapshot(args) -> int:
    spec = load_gridspec(args.grid)
    task = Task(args.task) if args.task else spec.task
    store = Path(args.store) if args.store else Path(args.grid).with_name(f"{Path(args.grid).stem}.{task.value}.json")
    if args.check and not store.exists():
        raise InvalidArgument(f"no stored snapshot at {store}")
    snap = compute_snapshot(spec, task, jobs=args.jobs)
    if args.write:
        write_snapshot(snap, store)
        print(f"wrote {store} max_ratio={snap['max_ratio']}")
        return EXIT_OK
    if args.check:
        problems = compare_snapshots(load_snapshot(store), snap)
        for p in problems:
            print(f"mismatch {p}")
        print(f"check {store}: {'ok' if not problems else 'FAILED'}")
        return EXIT_FAIL if problems else EXIT_OK
    print(json.dumps(snap, indent=2, sort_keys=True))
    return EXIT_OK


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _pos(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apsq", description="Squares near arithmetic progressions: exact computations and sweeps.")
    parser.add_argument("--version", action="version", version=f"apsq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("delta", help="closest approach of a + nd to a square")
    p.add_argument("--a", type=_nonneg, required=True)
    p.add_argument("--d", type=_pos, required=True)
    p.add_argument("--N", type=_pos, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("classify", help="regime report")
    p.add_argument("--a", type=_nonneg, required=True)
    p.add_argument("--d", type=_pos, required=True)
    p.add_argument("--N", type=_pos, required=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("family", help="extremal family instance and lower-bound check")
    p.add_argument("--dprime", type=_pos, required=True)
    p.add_argument("--x", type=_pos, required=True)
    p.add_argument("--n", type=_pos)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--scan-n", action="store_true", help="every N in the valid range")
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("salie", help="twisted incomplete Salie sum against its conjectured bound")
    p.add_argument("--q", type=_pos, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--H", type=_pos, required=True)
    p.add_argument("--K", type=_pos, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.set_defaults(func=_cmd_salie)

    p = sub.add_parser("gauss", help="quadratic Gauss sum G(a, b; q)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--q", type=_pos, required=True)
    p.set_defaults(func=_cmd_gauss)

    p = sub.add_parser("huxley", help="near-integer count against the Huxley lower bound")
    p.add_argument("--curve", choices=[c.value for c in Curve], required=True)
    p.add_argument("--a", type=_nonneg, required=True)
    p.add_argument("--d", type=_pos, required=True)
    p.add_argument("--n", type=_pos, required=True)
    p.add_argument("--eps", required=True, help="decimal or fraction, e.g. 0.25 or 1/4")
    p.set_defaults(func=_cmd_huxley)

    p = sub.add_parser("poisson", help="both sides of the Poisson summation identity")
    p.add_argument("--a", type=_nonneg, required=True)
    p.add_argument("--d", type=_pos, required=True)
    p.add_argument("--m-window", type=_pos, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--kmax", type=_pos, required=True)
    p.add_argument("--A", type=int, help="window centre (default floor(sqrt(a)))")
    p.set_defaults(func=_cmd_poisson)

    p = sub.add_parser("sweep", help="run a grid sweep to CSV or JSONL")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=_pos, default=None, help="worker processes (default $APSQ_JOBS or 1)")
    p.add_argument("--checkpoint", help="checkpoint file (default OUT.ckpt)")
    p.add_argument("--json", action="store_true", help="write JSONL instead of CSV")
    p.add_argument("--max-chunks", type=_pos, help="stop after this many chunks; rerun to resume")
    p.add_argument("--fresh", action="store_true", help="ignore an existing checkpoint")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("snapshot", help="max-ratio regression snapshot")
    p.add_argument("--task", choices=[t.value for t in Task])
    p.add_argument("--grid", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--write", action="store_true")
    mode.add_argument("--check", action="store_true")
    p.add_argument("--store", help="snapshot file (default GRID_STEM.TASK.json beside the grid)")
    p.add_argument("--jobs", type=_pos, default=None)
    p.set_defaults(func=_cmd_snapshot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", None) is None and args.command in ("sweep", "snapshot"):
            args.jobs = default_jobs()
        return args.func(args)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (InvalidArgument, RegimeMismatch, SpecError) as exc:
        print(f"apsq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"apsq: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
