"""Benchmark manifests and seeded, repeated solver runs.

A manifest is a plain-text table, one instance per line::

    # path            format  lb    ub    time_limit  runs  seed
    instances/ft06    std     55    55    60          10    0
    instances/ta01    ta      -     -     -           1

``-`` leaves a column unspecified: bounds fall back to the catalog, the time
limit to :func:`default_time_limit`, the seed to the configured base seed.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import BudgetExhaustedError, ManifestError, SchedulingError
from app.modules.bench.bounds import BoundsCatalog, compute_re, default_time_limit, instance_group
from app.modules.bench.parsers import FORMATS, InstanceFormat, load_instance
from app.modules.scheduling.evolve import evolve_run
from app.modules.scheduling.model import Instance
from app.modules.scheduling.monitor import ClockKind, make_clock
from app.modules.scheduling.params import EvolveConfig
from app.worker.pool import run_ordered

logger = logging.getLogger(__name__)

_UNSET = "-"

RunOutcome = Literal["ok", "budget_exhausted"]


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: Path
    fmt: InstanceFormat = "auto"
    lb: int | None = Field(default=None, gt=0)
    ub: int | None = Field(default=None, gt=0)
    time_limit: float | None = Field(default=None, gt=0)
    runs: int = Field(default=1, ge=0)
    seed: int | None = None


class BenchConfig(BaseModel):
    evolve: EvolveConfig = Field(default_factory=EvolveConfig)
    base_seed: int = 0
    runs: int | None = Field(default=None, ge=1)  # overrides every manifest line
    workers: int = Field(default=1, ge=1)
    clock: ClockKind = "wall"
    work_rate: float = Field(default=2000.0, gt=0)


def parse_manifest(text: str, base_dir: Path | None = None) -> list[ManifestEntry]:
    base_dir = base_dir or Path.cwd()
    columns = ("path", "fmt", "lb", "ub", "time_limit", "runs", "seed")
    entries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if not 6 <= len(tokens) <= 7:
            raise ManifestError(
                f"manifest line {line_no}: expected 6 or 7 columns "
                f"(path format lb ub time_limit runs [seed]), got {len(tokens)}"
            )
        values = {
            key: token for key, token in zip(columns, tokens) if token != _UNSET
        }
        if values.get("fmt", "auto") not in FORMATS:
            raise ManifestError(f"manifest line {line_no}: unknown format {values['fmt']!r}")
        path = Path(values.pop("path"))
        values["path"] = path if path.is_absolute() else base_dir / path
        try:
            entries.append(ManifestEntry.model_validate(values))
        except ValueError as exc:
            raise ManifestError(f"manifest line {line_no}: {exc}") from exc
    return entries


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    return parse_manifest(path.read_text(encoding="utf-8"), base_dir=path.parent)


@dataclass(frozen=True, slots=True)
class RunTask:
    instance: Instance
    config: EvolveConfig
    time_limit: float
    seed: int
    known_lb: int | None
    clock: ClockKind
    work_rate: float


@dataclass(frozen=True, slots=True)
class RunRecord:
    """One run; ``best`` is None when the budget ran out before two members existed."""

    instance: str
    seed: int
    best: int | None
    time_to_best: float | None
    relinks: int = 0
    repairs: int = 0
    infeasible_moves: int = 0
    outcome: RunOutcome = "ok"

    @property
    def finished(self) -> bool:
        return self.outcome == "ok"


@dataclass(slots=True)
class RunReport:
    instance_name: str
    size: str
    group: str
    lb: int | None
    ub: int | None
    runs: int
    exhausted: int
    best: int | None
    m_av: float | None
    t_av: float | None
    re: Fraction | None
    seeds: list[int] = field(default_factory=list)
    records: list[RunRecord] = field(default_factory=list)


def execute_run(task: RunTask) -> RunRecord:
    """One seeded solver run; module-level so worker processes can import it."""
    try:
        result = evolve_run(
            task.instance,
            task.config,
            task.time_limit,
            random.Random(task.seed),
            task.known_lb,
            clock=make_clock(task.clock, task.work_rate),
            seed=task.seed,
        )
    except BudgetExhaustedError as exc:
        logger.warning("%s seed %d: %s", task.instance.name, task.seed, exc)
        return RunRecord(
            instance=task.instance.name,
            seed=task.seed,
            best=None,
            time_to_best=None,
            outcome="budget_exhausted",
        )
    logger.info(
        "%s seed %d: best %d at %.2fs",
        task.instance.name,
        task.seed,
        result.stats.best_makespan,
        result.stats.time_to_best,
    )
    return RunRecord(
        instance=task.instance.name,
        seed=task.seed,
        best=result.stats.best_makespan,
        time_to_best=result.stats.time_to_best,
        relinks=result.stats.relinks,
        repairs=result.stats.repairs,
        infeasible_moves=result.stats.infeasible_moves,
    )


def aggregate(
    instance: Instance, lb: int | None, ub: int | None, seeds: list[int], records: list[RunRecord]
) -> RunReport:
    """Best, M_av and T_av over the finished runs; exhausted runs are only counted."""
    finished = [r for r in records if r.finished]
    best = min((r.best for r in finished if r.best is not None), default=None)
    return RunReport(
        instance_name=instance.name,
        size=instance.size,
        group=instance_group(instance.name),
        lb=lb,
        ub=ub,
        runs=len(records),
        exhausted=len(records) - len(finished),
        best=best,
        m_av=float(np.mean([r.best for r in finished])) if finished else None,
        t_av=float(np.mean([r.time_to_best for r in finished])) if finished else None,
        re=compute_re(best, lb) if best is not None and lb is not None else None,
        seeds=seeds,
        records=records,
    )


def run_benchmark(
    manifest: list[ManifestEntry],
    config: BenchConfig | None = None,
    catalog: BoundsCatalog | None = None,
) -> list[RunReport]:
    """Run every manifest line ``runs`` times with seeds ``seed, seed+1, ...``.

    Reports come back in manifest order; per-run records in seed order.
    """
    config = config or BenchConfig()
    catalog = catalog or BoundsCatalog()

    plans: list[tuple[Instance, int | None, int | None, list[int]]] = []
    tasks: list[RunTask] = []
    for entry in manifest:
        if not entry.path.is_file():
            raise ManifestError(f"instance file not found: {entry.path}")
        try:
            instance = load_instance(entry.path, entry.fmt)
        except SchedulingError as exc:
            raise ManifestError(f"{entry.path}: {exc}") from exc

        known = catalog.get(instance.name)
        lb = entry.lb if entry.lb is not None else (known.lb if known else None)
        ub = entry.ub if entry.ub is not None else (known.ub if known else None)
        if lb is None:
            logger.warning("%s: no lower bound known, relative error unavailable", instance.name)
        time_limit = entry.time_limit or default_time_limit(instance.name)
        runs = config.runs if config.runs is not None else entry.runs
        base = entry.seed if entry.seed is not None else config.base_seed
        seeds = [base + i for i in range(runs)]

        plans.append((instance, lb, ub, seeds))
        tasks.extend(
            RunTask(instance, config.evolve, time_limit, seed, lb, config.clock, config.work_rate)
            for seed in seeds
        )

    logger.info("bench: %d instances, %d runs", len(plans), len(tasks))
    records = run_ordered(execute_run, tasks, config.workers)

    reports = []
    offset = 0
    for instance, lb, ub, seeds in plans:
        chunk = records[offset : offset + len(seeds)]
        offset += len(seeds)
        reports.append(aggregate(instance, lb, ub, seeds, chunk))
    return reports


def mean_relative_error(reports: list[RunReport]) -> dict[str, tuple[int, Fraction]]:
    """Per instance group: how many instances had a relative error, and its mean."""
    groups: dict[str, list[Fraction]] = {}
    for report in reports:
        if report.re is not None:
            groups.setdefault(report.group, []).append(report.re)
    return {group: (len(values), sum(values, Fraction(0)) / len(values)) for group, values in groups.items()}
