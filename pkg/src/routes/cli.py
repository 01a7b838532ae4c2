"""Command-line entry point: `tvr <command> ...`.

Exit codes: 0 ok, 1 usage or configuration error, 2 invalid input,
3 computation error. With --json-errors the failure is written to stderr as
one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

from pydantic import ValidationError

from src.arith.precision import PrecisionPolicy
from src.arith.weights import check_order
from src.config import Settings, get_settings, load_env
from src.config.settings import DEFAULT_DILATIONS
from src.services.coloring import brute_force_admissible, build_context, enumerate_admissible
from src.services.convergence import (
    aggregate_s_r,
    growth_constant,
    liminf_limsup_tail,
    log_points,
    s_r,
    series_to_csv,
    zero_orders,
)
from src.services.estimator import estimator_report
from src.services.fitting import fit, fit_constant, model_curve
from src.services.optimizer import optimize_triangulation
from src.services.polytope import build_polytope, polytope_report
from src.services.tv_engine import TVRecord, TVSeries, tv_invariant, tv_sequence
from src.triangulation.examples import EXAMPLES, list_examples
from src.triangulation.gluing import GluingTable, load_triangulation
from src.triangulation.homology import homology_z2
from src.triangulation.moves import orientation_check
from src.triangulation.skeleton import compute_skeleton
from src.utils.errors import MalformedInput, MissingTarget, TVError
from src.utils.logs import configure_logging
from src.utils.series_io import append_record, atomic_write_text, read_series

logger = logging.getLogger(__name__)

_MODES = {"auto": None, "integer": True, "general": False}


class UsageError(Exception):
    """Bad flag combination; exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# Helpers ------------------------------------------------------------------------------
def load_input(spec: str) -> Tuple[GluingTable, str]:
    """A triangulation file path or the name of a bundled example, with a display label."""
    path = Path(spec)
    if path.exists():
        return load_triangulation(path), path.stem
    if spec in EXAMPLES:
        ex = EXAMPLES[spec]
        return ex.load(), ex.label
    raise MalformedInput(f"{spec!r} is neither a file nor a bundled triangulation ({', '.join(sorted(EXAMPLES))})")


def _settings(args: argparse.Namespace) -> Settings:
    return get_settings(
        {
            "initial_bits": getattr(args, "bits", None),
            "tau": getattr(args, "tau", None),
            "zero_threshold": getattr(args, "zero_threshold", None),
            "max_bits": getattr(args, "max_bits", None),
            "threads": getattr(args, "threads", None),
            "seed": getattr(args, "seed", None),
            "mc_samples": getattr(args, "mc_samples", None),
            "optimize_steps": getattr(args, "steps", None),
            "log_level": getattr(args, "log_level", None),
        }
    )


def _policy(settings: Settings) -> PrecisionPolicy:
    try:
        return settings.precision_policy()
    except ValueError as e:
        raise UsageError(str(e)) from e


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _appender(path: str) -> Callable[[TVRecord], None]:
    def write(rec: TVRecord) -> None:
        append_record(path, rec)

    return write


def _odd_range(args: argparse.Namespace) -> List[int]:
    if args.r is not None:
        orders = list(args.r)
    elif args.r_min is None or args.r_max is None:
        raise UsageError("give --r or both --r-min and --r-max")
    else:
        check_order(args.r_min)
        check_order(args.r_max)
        orders = list(range(args.r_min, args.r_max + 1, 2))
    for r in orders:
        check_order(r)
    return orders


def _rows_to_csv(rows: Sequence[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _json_lines(rows: Sequence[Dict[str, Any]]) -> str:
    return "".join(json.dumps(row) + "\n" for row in rows)


# Commands -------------------------------------------------------------------------------
def cmd_info(args: argparse.Namespace, settings: Settings) -> int:
    reports = []
    for spec in args.inputs:
        T, label = load_input(spec)
        S = compute_skeleton(T)
        h = homology_z2(S)
        v, e, f, n = S.counts()
        reports.append(
            {
                "input": spec,
                "label": label,
                "v": v,
                "e": e,
                "f": f,
                "n": n,
                "euler": e == n + v,
                "h1": h.h1_z2_rank,
                "fastpath": h.integer_fast_path_allowed,
                "dim": build_polytope(S).dim,
                "orientable": orientation_check(T),
            }
        )
    if args.format == "json":
        _emit(_json_lines(reports), args.out)
    else:
        lines = [
            f"{r['input']}: v={r['v']} e={r['e']} f={r['f']} n={r['n']} "
            f"euler={'ok' if r['euler'] else 'FAIL'} h1={r['h1']} "
            f"fastpath={'yes' if r['fastpath'] else 'no'} dim={r['dim']} "
            f"orientable={'yes' if r['orientable'] else 'no'}\n"
            for r in reports
        ]
        _emit("".join(lines), args.out)
    return 0


def cmd_tv(args: argparse.Namespace, settings: Settings) -> int:
    T, _label = load_input(args.input)
    rec = tv_invariant(T, args.r, _policy(settings), integer_only=_MODES[args.mode], threads=settings.threads)
    if args.format == "csv":
        _emit(_rows_to_csv([rec.to_dict()]), args.out)
    else:
        _emit(rec.to_json_line() + "\n", args.out)
    return 0


def cmd_sequence(args: argparse.Namespace, settings: Settings) -> int:
    T, label = load_input(args.input)
    resume: Optional[TVSeries] = None
    if args.resume:
        if not args.out or args.format != "json":
            raise UsageError("--resume needs a JSON-lines --out file")
        if Path(args.out).exists():
            resume = read_series(args.out, label, args.target)
    elif args.out and args.format == "json" and Path(args.out).exists():
        # Start afresh; records are appended one by one below.
        Path(args.out).unlink()

    on_record = _appender(args.out) if args.out and args.format == "json" else None
    series = tv_sequence(
        T,
        args.r_min,
        args.r_max,
        _policy(settings),
        threads=settings.threads,
        integer_only=_MODES[args.mode],
        resume=resume,
        on_record=on_record,
        label=label,
    )
    series.target_limit = args.target
    if args.format == "csv":
        _emit(series_to_csv(series), args.out)
    elif not args.out:
        sys.stdout.write("".join(rec.to_json_line() + "\n" for rec in series.records))
    return 0


def cmd_count(args: argparse.Namespace, settings: Settings) -> int:
    T, _label = load_input(args.input)
    S = compute_skeleton(T)
    rows = []
    for r in _odd_range(args):
        ctx = build_context(S, r, _MODES[args.mode])
        stats = enumerate_admissible(ctx, lambda _c: None)
        row: Dict[str, Any] = {"r": r, "adm": stats.admissible_count, "nodes": stats.nodes_visited}
        if args.oracle:
            row["oracle"] = len(brute_force_admissible(ctx))
            row["match"] = row["oracle"] == stats.admissible_count
        rows.append(row)
    _emit(_rows_to_csv(rows) if args.format == "csv" else _json_lines(rows), args.out)
    if args.oracle and not all(row["match"] for row in rows):
        logger.error("backtracking count disagrees with the exhaustive filter")
        return 3
    return 0


def cmd_polytope(args: argparse.Namespace, settings: Settings) -> int:
    rows = []
    for spec in args.inputs:
        T, _label = load_input(spec)
        report = polytope_report(compute_skeleton(T), args.dilations, settings.mc_samples, settings.seed)
        rows.append({"input": spec, **report})
    _emit(_json_lines(rows), args.out)
    return 0


def cmd_optimize(args: argparse.Namespace, settings: Settings) -> int:
    T, _label = load_input(args.input)
    best, report = optimize_triangulation(
        T,
        steps=settings.optimize_steps,
        seed=settings.seed,
        mc_samples=settings.mc_samples,
        size_cap=args.size_cap,
        size_cap_factor=settings.size_cap_factor,
    )
    if args.out:
        atomic_write_text(args.out, best.dumps())
    sys.stdout.write(json.dumps(report.to_dict()) + "\n")
    return 0


def cmd_ratios(args: argparse.Namespace, settings: Settings) -> int:
    r_list = _odd_range(args)
    rows = []
    for spec in args.inputs:
        T, _label = load_input(spec)
        for row in estimator_report(T, r_list, integer_only=_MODES[args.mode]):
            rows.append({"input": spec, **row.to_dict()})
    _emit(_rows_to_csv(rows) if args.format == "csv" else _json_lines(rows), args.out)
    return 0


def _gnuplot_rows(series: TVSeries, curve: Callable[[float], float]) -> str:
    s_values = dict(s_r(series))
    lines = ["# r log_quantity model s_r"]
    for r, lq in log_points(series):
        lines.append(f"{r} {lq!r} {curve(r)!r} {s_values[r]!r}")
    return "\n".join(lines) + "\n"


def cmd_fit(args: argparse.Namespace, settings: Settings) -> int:
    if args.target is None:
        raise MissingTarget("fit needs --target")
    series_list = [read_series(path, target=args.target) for path in args.series]

    if args.aggregate or len(series_list) > 1:
        curve = aggregate_s_r(series_list, args.target)
        sys.stdout.write(json.dumps(curve.to_dict()) + "\n")
        if args.out:
            lines = ["# r max median"]
            lines += [f"{r} {mx!r} {md!r}" for r, mx, md in zip(curve.orders, curve.maximum, curve.median)]
            atomic_write_text(args.out, "\n".join(lines) + "\n")
        return 0

    series = series_list[0]
    points = log_points(series)
    result = fit(points, args.model)
    payload = {
        **result.to_dict(),
        "constant_rss": fit_constant(points).rss,
        "zero_orders": zero_orders(series),
        "s_r": [[r, value] for r, value in s_r(series)],
        "growth_constant": growth_constant(series),
        "tail_range": liminf_limsup_tail(series, min(5, len(points))) if points else None,
    }
    sys.stdout.write(json.dumps(payload) + "\n")
    if args.out:
        atomic_write_text(args.out, _gnuplot_rows(series, lambda x: model_curve(result, [x])[0]))
    return 0


def cmd_examples(args: argparse.Namespace, settings: Settings) -> int:
    if args.out:
        target = Path(args.out)
        for ex in list_examples():
            atomic_write_text(target / f"{ex.name}.json", ex.load().dumps())
    for ex in list_examples():
        v, e, f, n = ex.counts
        sys.stdout.write(f"{ex.name}\t{ex.label}\tn={n} v={v} e={e} h1={ex.h1_z2_rank}\t{ex.description}\n")
    return 0


# Parser -------------------------------------------------------------------------------
def _add_common(p: argparse.ArgumentParser, formats: Tuple[str, ...] = ("json", "csv")) -> None:
    p.add_argument("--out", help="Output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--json-errors", action="store_true", help="Report failures as JSON on stderr")
    p.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")


def _add_precision(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", type=int, help="Starting mantissa width (power of two)")
    p.add_argument("--tau", type=float, help="Relative agreement threshold")
    p.add_argument("--zero-threshold", type=float, help="Zero declaration threshold")
    p.add_argument("--max-bits", type=int, help="Precision cap")
    p.add_argument("--threads", type=int, help="Worker processes")
    p.add_argument("--mode", choices=tuple(_MODES), default="auto", help="Coloring enumeration mode")


def _add_range(p: argparse.ArgumentParser, single: bool = False) -> None:
    if single:
        p.add_argument("--r", type=int, required=True)
        return
    p.add_argument("--r", type=int, nargs="+", help="Explicit list of orders")
    p.add_argument("--r-min", type=int)
    p.add_argument("--r-max", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tvr", description="Turaev-Viro invariants of closed 3-manifold triangulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="Skeleton, homology and fast-path report")
    p.add_argument("inputs", nargs="+")
    _add_common(p, formats=("text", "json"))
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("tv", help="TV_r for a single r")
    p.add_argument("input")
    _add_range(p, single=True)
    _add_precision(p)
    _add_common(p)
    p.set_defaults(handler=cmd_tv)

    p = sub.add_parser("sequence", help="TV_r for every odd r in a range, as JSON lines")
    p.add_argument("input")
    p.add_argument("--r-min", type=int, default=3)
    p.add_argument("--r-max", type=int, required=True)
    p.add_argument("--resume", action="store_true", help="Continue an existing --out file")
    p.add_argument("--target", type=float, help="Target limit for the CSV s_r column")
    _add_precision(p)
    _add_common(p)
    p.set_defaults(handler=cmd_sequence)

    p = sub.add_parser("count", help="Admissible colorings and search-tree size")
    p.add_argument("input")
    _add_range(p)
    p.add_argument("--mode", choices=tuple(_MODES), default="auto")
    p.add_argument("--oracle", action="store_true", help="Cross-check against the exhaustive filter")
    _add_common(p)
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("polytope", help="Admissibility polytope volume by Ehrhart fit and Monte-Carlo")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--dilations", type=int, nargs="+", default=list(DEFAULT_DILATIONS))
    p.add_argument("--mc-samples", type=int)
    p.add_argument("--seed", type=int)
    _add_common(p)
    p.set_defaults(handler=cmd_polytope)

    p = sub.add_parser("optimize", help="Random Pachner walk towards a small, low-volume triangulation")
    p.add_argument("input")
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mc-samples", type=int)
    p.add_argument("--size-cap", type=int, help="Largest tetrahedron count the walk may reach")
    _add_common(p)
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("ratios", help="Estimator accuracy and search-tree overhead per r")
    p.add_argument("inputs", nargs="+")
    _add_range(p)
    p.add_argument("--mode", choices=tuple(_MODES), default="auto")
    _add_common(p)
    p.set_defaults(handler=cmd_ratios)

    p = sub.add_parser("fit", help="Fit (2pi/r) log TV_r and report S_r")
    p.add_argument("series", nargs="+", help="JSON-lines series files")
    p.add_argument("--target", type=float)
    p.add_argument("--model", type=int, choices=(1, 2), default=1)
    p.add_argument("--aggregate", action="store_true", help="Per-r max and median of S_r across the files")
    _add_common(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("examples", help="List bundled triangulations; --out DIR writes them")
    _add_common(p)
    p.set_defaults(handler=cmd_examples)

    return parser


def _report_failure(args: Optional[argparse.Namespace], payload: Dict[str, Any], text: str) -> None:
    if args is not None and getattr(args, "json_errors", False):
        sys.stderr.write(json.dumps(payload) + "\n")
    else:
        sys.stderr.write(f"tvr: {text}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_env()
    args = build_parser().parse_args(argv)
    try:
        settings = _settings(args)
        configure_logging(settings.log_level)
        return args.handler(args, settings)
    except ValidationError as e:
        _report_failure(args, {"error": "ValidationError", "message": str(e)}, f"invalid configuration: {e}")
        return 1
    except UsageError as e:
        _report_failure(args, {"error": "UsageError", "message": str(e)}, str(e))
        return 1
    except TVError as e:
        _report_failure(args, e.to_dict(), e.message)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
