"""CSV rendering of bench results."""

import csv
import io
from collections import Counter
from pathlib import Path

from app.modules.bench.bounds import GROUPS, format_percent
from app.modules.bench.harness import RunReport, mean_relative_error

REPORT_HEADER = ("instance", "size", "lb", "ub", "best", "m_av", "t_av_s", "re", "runs", "seed0")
RUNS_HEADER = ("instance", "seed", "best", "time_to_best_s", "relinks", "repairs", "infeasible_moves", "outcome")
MRE_HEADER = ("group", "instances", "mre")
UB_HEADER = ("group", "instances", "better", "equal", "worse")
UB_GAP_HEADER = ("direction", "units", "instances")

NA = "NA"
ALL = "all"
GAP_BUCKETS = 10  # gaps above this many units share one ">10" bucket


def _num(value: int | float | None) -> str:
    if value is None:
        return NA
    if isinstance(value, int):
        return str(value)
    return f"{value:.3f}"


def _render(header: tuple[str, ...], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _group_order(groups: set[str] | dict[str, object]) -> list[str]:
    return [g for g in GROUPS if g in groups] + sorted(g for g in groups if g not in GROUPS)


def render_report(reports: list[RunReport]) -> str:
    rows = [
        [
            r.instance_name,
            r.size,
            _num(r.lb),
            _num(r.ub),
            _num(r.best),
            _num(r.m_av),
            _num(r.t_av),
            format_percent(r.re),
            str(r.runs),
            str(r.seeds[0]) if r.seeds else NA,
        ]
        for r in reports
    ]
    return _render(REPORT_HEADER, rows)


def render_runs(reports: list[RunReport]) -> str:
    rows = [
        [
            record.instance,
            str(record.seed),
            _num(record.best),
            _num(record.time_to_best),
            str(record.relinks),
            str(record.repairs),
            str(record.infeasible_moves),
            record.outcome,
        ]
        for report in reports
        for record in report.records
    ]
    return _render(RUNS_HEADER, rows)


def render_mre(reports: list[RunReport]) -> str:
    summary = mean_relative_error(reports)
    rows = [[group, str(summary[group][0]), format_percent(summary[group][1])] for group in _group_order(summary)]
    return _render(MRE_HEADER, rows)


def _compared(reports: list[RunReport]) -> list[RunReport]:
    return [r for r in reports if r.best is not None and r.ub is not None]


def render_ub_summary(reports: list[RunReport]) -> str:
    """Instances whose best beats, ties or misses the known upper bound, per group and overall."""
    tallies: dict[str, Counter] = {}
    for report in _compared(reports):
        verdict = "better" if report.best < report.ub else "equal" if report.best == report.ub else "worse"
        for group in (report.group, ALL):
            tallies.setdefault(group, Counter())[verdict] += 1

    rows = []
    for group in _group_order({g for g in tallies if g != ALL}) + ([ALL] if ALL in tallies else []):
        tally = tallies[group]
        rows.append(
            [group, str(sum(tally.values())), str(tally["better"]), str(tally["equal"]), str(tally["worse"])]
        )
    return _render(UB_HEADER, rows)


def render_ub_gaps(reports: list[RunReport]) -> str:
    """How many instances beat (or miss) the upper bound by 1, 2, ... units."""
    gaps: Counter = Counter()
    for report in _compared(reports):
        diff = report.ub - report.best
        if diff == 0:
            continue
        direction = "better" if diff > 0 else "worse"
        units = abs(diff)
        gaps[direction, str(units) if units <= GAP_BUCKETS else f">{GAP_BUCKETS}"] += 1

    buckets = [str(units) for units in range(1, GAP_BUCKETS + 1)] + [f">{GAP_BUCKETS}"]
    rows = [
        [direction, bucket, str(gaps[direction, bucket])]
        for direction in ("better", "worse")
        for bucket in buckets
        if gaps[direction, bucket]
    ]
    return _render(UB_GAP_HEADER, rows)


def write_reports(reports: list[RunReport], out: Path) -> list[Path]:
    """Write ``out`` plus the ``.runs``, ``.mre``, ``.ub`` and ``.ubgap`` tables next to it."""
    out.parent.mkdir(parents=True, exist_ok=True)
    targets = [
        (out, render_report(reports)),
        (out.with_name(f"{out.stem}.runs{out.suffix}"), render_runs(reports)),
        (out.with_name(f"{out.stem}.mre{out.suffix}"), render_mre(reports)),
        (out.with_name(f"{out.stem}.ub{out.suffix}"), render_ub_summary(reports)),
        (out.with_name(f"{out.stem}.ubgap{out.suffix}"), render_ub_gaps(reports)),
    ]
    for path, text in targets:
        path.write_text(text, encoding="utf-8")
    return [path for path, _ in targets]
