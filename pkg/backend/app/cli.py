"""Command-line entry point: ``tspr solve | bench | check | serve``."""

import argparse
import logging
import random
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import SchedulingError
from app.core.logging import configure_logging
from app.modules.bench.bounds import BoundsCatalog
from app.modules.bench.harness import BenchConfig, load_manifest, run_benchmark
from app.modules.bench.parsers import FORMATS, format_solution, load_instance, parse_solution
from app.modules.bench.report import render_report, render_runs, write_reports
from app.modules.scheduling.evolve import evolve_run
from app.modules.scheduling.graph import evaluate
from app.modules.scheduling.monitor import make_clock
from app.modules.scheduling.params import EvolveConfig, apply_overrides

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_ERROR = 2


def _overrides(pairs: Sequence[str]) -> dict[str, str]:
    result = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"expected key=value, got {pair!r}")
        result[key.strip()] = value.strip()
    return result


def _evolve_config(params: Sequence[str]) -> EvolveConfig:
    return apply_overrides(EvolveConfig(), _overrides(params))


def _catalog() -> BoundsCatalog:
    path = settings.bounds_catalog
    if not path.is_file():
        logger.warning("bounds catalog %s not found, continuing without bounds", path)
        return BoundsCatalog()
    return BoundsCatalog.load(path)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.file, args.format)
    config = _evolve_config(args.params)
    known_lb = args.lb
    if known_lb is None and (entry := _catalog().get(inst.name)) is not None:
        known_lb = entry.lb
    result = evolve_run(
        inst,
        config,
        args.time_limit,
        random.Random(args.seed),
        known_lb,
        clock=make_clock(args.clock, settings.work_rate),
        seed=args.seed,
    )
    # header lines are comments so the output doubles as a `check` solution file
    print(f"# makespan {result.evaluation.makespan}")
    print(f"# time_to_best {result.stats.time_to_best:.3f}")
    print(format_solution(result.best))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = BenchConfig(
        evolve=_evolve_config(args.params),
        base_seed=settings.default_seed,
        runs=args.runs,
        workers=args.jobs,
        clock=args.clock,
        work_rate=settings.work_rate,
    )
    reports = run_benchmark(load_manifest(args.manifest), config, _catalog())
    if args.out is None:
        sys.stdout.write(render_report(reports))
        sys.stdout.write("\n")
        sys.stdout.write(render_runs(reports))
    else:
        for path in write_reports(reports, args.out):
            logger.info("wrote %s", path)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    inst = load_instance(args.file, args.format)
    solution = parse_solution(args.solution.read_text(encoding="utf-8"), inst)
    ev = evaluate(inst, solution)
    print(f"feasible {'true' if ev.feasible else 'false'}")
    print(f"makespan {ev.makespan if ev.feasible else 'NA'}")
    return EXIT_OK if ev.feasible else EXIT_INFEASIBLE


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tspr", description="Job-shop scheduling by tabu search and path relinking."
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance file")
    solve.add_argument("file", type=Path)
    solve.add_argument("--format", choices=FORMATS, default="auto")
    solve.add_argument("--time-limit", type=float, default=60.0, help="seconds (default: %(default)s)")
    solve.add_argument("--seed", type=int, default=settings.default_seed)
    solve.add_argument("--lb", type=int, default=None, help="stop as soon as this makespan is reached")
    solve.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    solve.add_argument("--clock", choices=("wall", "work"), default=settings.clock)
    solve.set_defaults(handler=cmd_solve)

    bench = sub.add_parser("bench", help="run a benchmark manifest")
    bench.add_argument("manifest", type=Path)
    bench.add_argument("--out", type=Path, default=None, help="report CSV path (default: stdout)")
    bench.add_argument("--runs", type=int, default=None, help="override runs for every instance")
    bench.add_argument("--jobs", type=int, default=settings.bench_workers, help="worker processes")
    bench.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    bench.add_argument("--clock", choices=("wall", "work"), default=settings.clock)
    bench.set_defaults(handler=cmd_bench)

    check = sub.add_parser("check", help="verify a solution file against an instance")
    check.add_argument("file", type=Path)
    check.add_argument("solution", type=Path)
    check.add_argument("--format", choices=FORMATS, default="auto")
    check.set_defaults(handler=cmd_check)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=settings.app_port)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (SchedulingError, ValidationError, ValueError, OSError) as exc:
        print(f"tspr: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
