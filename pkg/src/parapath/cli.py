"""Command-line entry point: ``parapath <command> ...``.

Exit codes: 0 success, 1 a bench self-check failed, 2 invalid input (the
error class name is printed), 3 path cap exceeded, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import math
import random
import sys
import time
from pathlib import Path as FsPath

from . import gadgets
from .errors import DimensionMismatch, GppError, NoFeasiblePath, TooManyPaths, ZeroLiquidation
from .io import (
    FormatError,
    dumps,
    instance_from_json,
    instance_to_json,
    table_from_json,
    table_to_json,
)
from .oracle import (
    DEFAULT_CAP,
    best_path,
    best_path_budgeted,
    enumerate_paths,
    path_function,
)
from .pgpp import build_table, query
from .piecewise import AnnotatedPL, fold_envelope
from .random_instances import random_affine_instance
from .rational import Q, fmt, rational, to_float
from .solver import solve_scalar_linear, solve_scalar_linear_budgeted

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_CAP, EXIT_IO = 0, 1, 2, 3, 4


class CliIOError(Exception):
    pass


# ---------------------------------------------------------------- file helpers


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else FsPath(path).read_text()
    except OSError as exc:
        raise CliIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        FsPath(path).write_text(text)
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _rational_arg(text: str):
    try:
        return rational(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _range_arg(text: str):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected LO:HI")
    lo, hi = _rational_arg(lo), _rational_arg(hi)
    if not lo < hi:
        raise argparse.ArgumentTypeError("LO must be below HI")
    return lo, hi


def _elements_arg(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _result(path, cost) -> str:
    return json.dumps({"path": list(path), "cost": fmt(cost)}) + "\n"


# ---------------------------------------------------------------- commands


def _load_durations(path, edge_count: int) -> dict:
    if path is None:
        return {e: 1 for e in range(edge_count)}
    doc = _read_json(path)
    if isinstance(doc, list):
        items = enumerate(doc)
    elif isinstance(doc, dict):
        try:
            items = ((int(k), v) for k, v in doc.items())
            items = list(items)
        except ValueError as exc:
            raise FormatError("duration keys must be edge ids") from exc
    else:
        raise FormatError("durations must be a list or an object keyed by edge id")
    out = {}
    for e, d in items:
        if isinstance(d, bool) or not isinstance(d, int):
            raise FormatError(f"duration of edge {e} must be an integer")
        out[e] = d
    return out


def cmd_solve(args) -> int:
    inst = instance_from_json(_read_json(args.input))
    x0 = args.x0 if args.x0 is not None else inst.x0
    if args.budget is not None:
        durations = _load_durations(args.durations, len(inst.dag.edges))
        if args.oracle:
            found = best_path_budgeted(inst, x0, durations, args.budget, args.cap)
            if found is None:
                raise NoFeasiblePath(f"no path fits within budget {args.budget}", args.budget)
            path, cost = found
        else:
            path, cost = solve_scalar_linear_budgeted(inst, x0, durations, args.budget)
    elif args.oracle:
        path, cost = best_path(inst, x0, args.cap)
    else:
        path, cost = solve_scalar_linear(inst, x0)
    _write_text(None, _result(path, cost))
    return EXIT_OK


def cmd_preprocess(args) -> int:
    inst = instance_from_json(_read_json(args.input))
    table = build_table(inst, args.cap)
    _write_text(args.output, dumps(table_to_json(table)))
    return EXIT_OK


def cmd_query(args) -> int:
    table = table_from_json(_read_json(args.table))
    path, value = query(table, args.x0)
    _write_text(None, _result(path, value))
    return EXIT_OK


def cmd_gadget(args) -> int:
    if args.family == "set-partition":
        inst = gadgets.set_partition_gadget(args.elements, args.epsilon, args.delta, args.last_edge)
    elif args.family == "product-partition":
        inst = gadgets.product_partition_gadget(args.elements)
    else:
        if args.n < 1:
            raise ValueError("-n must be positive")
        inst = gadgets.lowerbound_instance(args.n)
    _write_text(args.output, dumps(instance_to_json(inst)))
    return EXIT_OK


def sample_grid(lo, hi, samples: int) -> list:
    """``samples`` evenly spaced exact points from ``lo`` to ``hi`` inclusive."""
    if samples == 1:
        return [lo]
    step = (hi - lo) / (samples - 1)
    return [lo + step * i for i in range(samples)]


def plot_series(args) -> tuple:
    """``(xs, curves, envelope)``; ``curves`` maps a column label to exact values."""
    xs = sample_grid(args.x_range[0], args.x_range[1], args.samples)
    curves = {}
    if args.table is not None:
        table = table_from_json(_read_json(args.table))
        envelope = [query(table, x)[1] for x in xs]
        return xs, curves, envelope
    inst = instance_from_json(_read_json(args.input))
    if inst.k != 1:
        raise DimensionMismatch("plots need a scalar instance", inst.k)
    if inst.liquidation[0] == 0:
        raise ZeroLiquidation("L = 0: the envelope is undefined", "L")
    sign = 1 if inst.liquidation[0] > 0 else -1
    fns = []
    for path in enumerate_paths(inst.dag, args.cap):
        fn = path_function(inst, path)
        fns.append(fn)
        curves["path:" + "-".join(map(str, path))] = [fn(x) for x in xs]
    env = fold_envelope([AnnotatedPL.uniform(f, i) for i, f in enumerate(fns)], sign < 0)
    envelope = [env.fn(x) for x in xs]
    return xs, curves, envelope


def render_csv(xs, curves, envelope) -> str:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", *curves, "envelope"])
    cols = list(curves.values())
    for i, x in enumerate(xs):
        w.writerow([fmt(x), *(fmt(c[i]) for c in cols), fmt(envelope[i])])
    return buf.getvalue()


def _num(q) -> str:
    return format(to_float(q), ".12g")


def render_svg(xs, curves, envelope, width: int = 800, height: int = 500) -> str:
    """A self-contained SVG 1.1 chart: grey path curves, envelope on top in red."""
    margin = 40
    every = [v for c in curves.values() for v in c] + list(envelope)
    y_lo, y_hi = min(every), max(every)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1, y_hi + 1
    x_lo, x_hi = xs[0], xs[-1]
    if x_lo == x_hi:
        x_hi = x_lo + 1
    sx = Q(width - 2 * margin) / (x_hi - x_lo)
    sy = Q(height - 2 * margin) / (y_hi - y_lo)

    def pts(values) -> str:
        return " ".join(
            f"{_num(margin + (x - x_lo) * sx)},{_num(height - margin - (y - y_lo) * sy)}"
            for x, y in zip(xs, values)
        )

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black" stroke-width="1"/>',
    ]
    for label, values in curves.items():
        lines.append(
            f'<polyline fill="none" stroke="#999999" stroke-width="1" points="{pts(values)}">'
            f"<title>{label}</title></polyline>"
        )
    lines.append(
        f'<polyline fill="none" stroke="#d62728" stroke-width="2.5" points="{pts(envelope)}">'
        "<title>envelope</title></polyline>"
    )
    for x, anchor, text in ((margin, "start", x_lo), (width - margin, "end", x_hi)):
        lines.append(
            f'<text x="{x}" y="{height - margin / 2}" font-size="12" '
            f'text-anchor="{anchor}">x = {fmt(text)}</text>'
        )
    lines.append(
        f'<text x="{margin / 4}" y="{margin - 6}" font-size="12">'
        f"y in [{_num(y_lo)}, {_num(y_hi)}]</text>"
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_plot(args) -> int:
    if args.samples < 1:
        raise ValueError("--samples must be positive")
    fmt_name = args.format or ("svg" if str(args.output).lower().endswith(".svg") else "csv")
    xs, curves, envelope = plot_series(args)
    text = render_csv(xs, curves, envelope) if fmt_name == "csv" else render_svg(xs, curves, envelope)
    _write_text(args.output, text)
    return EXIT_OK


def quasi_poly_bound(vertices: int) -> float:
    """``(8 v) ** log2(v)``, the entry bound for a DAG with ``v`` vertices."""
    return (8 * vertices) ** math.log2(vertices)


def bench_row(family: str, n: int, seed: int, cap: int) -> dict:
    if family == "lowerbound":
        inst = gadgets.lowerbound_instance(n)
    else:
        rng = random.Random(seed * 1_000_003 + n)
        inst = random_affine_instance(rng, vertices=n, edges=2 * n)
    paths = len(enumerate_paths(inst.dag, cap))
    start = time.perf_counter()
    table = build_table(inst, cap)
    elapsed = time.perf_counter() - start
    return {
        "n": n,
        "vertices": inst.dag.vertex_count,
        "paths": paths,
        "pieces": len(table),
        "optimal_paths": len({e.path for e in table.entries}),
        "linear_pieces": sum(len(e.pieces) for e in table.entries),
        "wall_time_s": elapsed,
    }


BENCH_COLUMNS = ["n", "vertices", "paths", "pieces", "optimal_paths", "linear_pieces"]


def cmd_bench(args) -> int:
    first = 1 if args.family == "lowerbound" else 2
    if args.n_max < first:
        raise ValueError(f"--n-max must be at least {first}")
    rows = [bench_row(args.family, n, args.seed, args.cap) for n in range(first, args.n_max + 1)]
    worst = 0.0
    for r in rows:
        if args.family == "lowerbound" and r["optimal_paths"] != 2 ** r["n"]:
            raise AssertionError(f"n={r['n']}: {r['optimal_paths']} optimal paths, expected {2 ** r['n']}")
        if r["pieces"] > r["paths"] and args.family == "random":
            raise AssertionError(f"n={r['n']}: {r['pieces']} pieces exceed {r['paths']} paths")
        bound = quasi_poly_bound(r["vertices"])
        if r["pieces"] > bound:
            raise AssertionError(f"n={r['n']}: {r['pieces']} pieces exceed bound {bound:.6g}")
        worst = max(worst, r["pieces"] / bound)
    cols = BENCH_COLUMNS + (["wall_time_s"] if args.timing else [])
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([f"{r[c]:.6f}" if c == "wall_time_s" else r[c] for c in cols])
    _write_text(args.output, buf.getvalue())
    print(f"max pieces / bound = {worst:.6g}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parapath", description="Parametric path optimisation over DAGs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="optimal path for one start value")
    s.add_argument("--input", required=True)
    s.add_argument("--x0", type=_rational_arg)
    s.add_argument("--budget", type=int)
    s.add_argument("--durations", help="JSON list or {edge id: duration}; unit durations if omitted")
    s.add_argument("--oracle", action="store_true", help="exhaustive search (any weight kind)")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("preprocess", help="build the x0 -> optimal path table")
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("query", help="look up a start value in a table")
    s.add_argument("--table", required=True)
    s.add_argument("--x0", type=_rational_arg, required=True)
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("gadget", help="generate a reduction or lower-bound instance")
    s.add_argument("family", choices=["set-partition", "product-partition", "lowerbound"])
    s.add_argument("--elements", type=_elements_arg)
    s.add_argument("--epsilon", type=_rational_arg, default=Q(0))
    s.add_argument("--delta", type=_rational_arg, default=Q(0))
    s.add_argument("--last-edge", choices=["abs", "square"], default="abs")
    s.add_argument("-n", type=int)
    s.add_argument("--output")
    s.set_defaults(func=cmd_gadget)

    s = sub.add_parser("plot", help="sample every path cost and the envelope")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--table")
    s.add_argument("--output", required=True, help="file ending in .svg or .csv, or - for stdout")
    s.add_argument("--format", choices=["csv", "svg"])
    s.add_argument("--x-range", type=_range_arg, default=(Q(0), Q(1)))
    s.add_argument("--samples", type=int, default=201)
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_plot)

    s = sub.add_parser("bench", help="table size per n")
    s.add_argument("what", choices=["pieces"])
    s.add_argument("--family", choices=["lowerbound", "random"], required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timing", action="store_true", help="append a wall_time_s column")
    s.add_argument("--output")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_bench)
    return p


def _check_gadget_args(parser, args) -> None:
    if args.command != "gadget":
        return
    if args.family == "lowerbound" and args.n is None:
        parser.error("gadget lowerbound needs -n")
    if args.family != "lowerbound" and args.elements is None:
        parser.error(f"gadget {args.family} needs --elements")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_gadget_args(parser, args)
    try:
        return args.func(args)
    except TooManyPaths as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_CAP
    except GppError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CliIOError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"error: InvalidArgument: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"error: CheckFailed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
