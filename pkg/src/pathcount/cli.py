"""Command line front-end: ``pathcount count|gen|bench``.

Only the answer goes to stdout.  Diagnostics and errors go to stderr; errors
are printed as ``error: <tag>: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .dispatch import DEFAULT_TIMEOUT, SolveConfig, solve_with_report
from .errors import Cancelled, InstanceError, MemoryBudgetExceeded, PathCountError
from .fbs import DEFAULT_EFFORT, DEFAULT_STATE_CAP
from .gen import FAMILIES, GenSpec, LengthPolicy, generate_instance
from .instance import Kind, load_instance, parse_instance, serialize_instance

EXIT_INPUT = 2
EXIT_TIMEOUT = 3
EXIT_MEMORY = 4


def _fail(exc: Exception, code: int) -> int:
    tag = getattr(exc, "tag", type(exc).__name__)
    print(f"error: {tag}: {exc}", file=sys.stderr)
    return code


def cmd_count(args) -> int:
    try:
        inst = parse_instance(sys.stdin) if args.instance == "-" else load_instance(args.instance)
    except InstanceError as exc:
        return _fail(exc, EXIT_INPUT)
    except OSError as exc:
        return _fail(exc, EXIT_INPUT)
    config = SolveConfig(
        algo=args.algo,
        timeout=args.timeout if args.timeout > 0 else None,
        order_effort=args.order_effort,
        state_cap=args.state_cap if args.state_cap > 0 else None,
        workers=args.workers,
        debug=args.debug,
    )
    try:
        result = solve_with_report(inst, config)
    except Cancelled as exc:
        return _fail(exc, EXIT_TIMEOUT)
    except MemoryBudgetExceeded as exc:
        return _fail(exc, EXIT_MEMORY)
    except PathCountError as exc:
        return _fail(exc, 1)
    logging.getLogger(__name__).info(
        "%s solved by %s in %.3f s", inst.kind.value, result.strategy.value, result.elapsed
    )
    print(result.value)
    return 0


def cmd_gen(args) -> int:
    spec = GenSpec(
        family=args.family,
        n=args.n,
        rows=args.rows,
        cols=args.cols,
        cliques=args.cliques,
        clique_size=args.clique_size,
        bridges=args.bridges,
        seed=args.seed,
        kind=Kind.PCA if args.pca else Kind.PCS,
        length=LengthPolicy(args.ratio),
        perturb=args.perturb,
    )
    try:
        text = serialize_instance(generate_instance(spec))
    except PathCountError as exc:
        return _fail(exc, EXIT_INPUT)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench_run(args) -> int:
    solvers = harness.load_solvers(args.solvers)
    records = harness.run_benchmarks(args.dir, solvers, args.budget, args.parallelism)
    harness.write_records(records, args.out)
    solved = sum(r.solved for r in records)
    print(f"{len(records)} runs, {solved} solved -> {args.out}", file=sys.stderr)
    return 0


def cmd_bench_report(args) -> int:
    records = harness.read_records(args.runs)
    instances = None
    if args.instances:
        instances = {p.name: load_instance(p) for p in harness.list_benchmarks(args.instances)}
    report = harness.build_report(records, args.budget, instances)
    harness.write_report(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathcount", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count paths of one instance file")
    p.add_argument("instance", help="extended-DIMACS file, or - for stdin")
    p.add_argument("--algo", choices=("auto", "bt", "fbs"), default="auto")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds; 0 disables")
    p.add_argument("--order-effort", type=int, default=DEFAULT_EFFORT)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP, help="0 disables")
    p.add_argument("--workers", type=int, default=1, help="processes for all-pairs backtracking")
    p.add_argument("--debug", action="store_true", help="run both algorithms and compare")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=0, help="complete graph size")
    p.add_argument("--rows", type=int, default=0)
    p.add_argument("--cols", type=int, default=0)
    p.add_argument("--cliques", type=int, default=0)
    p.add_argument("--clique-size", type=int, default=0)
    p.add_argument("--bridges", type=int, default=1)
    p.add_argument("--ratio", type=float, default=LengthPolicy().ratio, help="length decay ratio")
    p.add_argument("--perturb", action="store_true", help="remove/rewire a few edges")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--pcs", action="store_true", help="single pair (default)")
    kind.add_argument("--pca", action="store_true", help="all pairs")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    bench = sub.add_parser("bench", help="benchmark harness").add_subparsers(dest="bench", required=True)
    p = bench.add_parser("run", help="run solvers over a directory of instances")
    p.add_argument("dir")
    p.add_argument("--solvers", required=True, help="TOML file with [solvers.<name>] command entries")
    p.add_argument("--budget", type=float, default=harness.DEFAULT_BUDGET)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", default="runs.csv")
    p.set_defaults(func=cmd_bench_run)

    p = bench.add_parser("report", help="score a runs.csv file")
    p.add_argument("runs")
    p.add_argument("--budget", type=float, default=harness.DEFAULT_BUDGET)
    p.add_argument("--instances", help="instance directory, enables parameter correlations")
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=cmd_bench_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)
