from fractions import Fraction

import pytest

from app.core.config import DEFAULT_BOUNDS_CATALOG
from app.core.errors import ContractViolation, InstanceError, ManifestError, ParseError, SolutionError
from app.modules.bench.bounds import (
    BoundsCatalog,
    BoundsEntry,
    compute_re,
    default_time_limit,
    format_percent,
    instance_group,
    normalize_name,
)
from app.modules.bench.harness import BenchConfig, RunRecord, RunReport, load_manifest, parse_manifest, run_benchmark
from app.modules.bench.parsers import (
    format_solution,
    load_instance,
    parse_instance,
    parse_solution,
    parse_standard,
    parse_taillard,
)
from app.modules.bench.report import (
    MRE_HEADER,
    REPORT_HEADER,
    RUNS_HEADER,
    UB_GAP_HEADER,
    UB_HEADER,
    render_mre,
    render_report,
    render_runs,
    render_ub_gaps,
    render_ub_summary,
    write_reports,
)
from app.modules.scheduling.model import Solution
from app.modules.scheduling.params import EvolveConfig, RelinkConfig

FAST = EvolveConfig(population_size=4, relink=RelinkConfig(si=20, li=80))


# ── Parsers ──────────────────────────────────────────────────────


def test_parse_standard_minimal():
    inst = parse_standard("1 1\n0 5")
    assert (inst.n_jobs, inst.n_machines) == (1, 1)
    assert inst.op_duration == (5,)


def test_parse_standard_ft06(ft06):
    assert ft06.name == "ft06"
    assert ft06.size == "6x6"
    assert ft06.routes()[0][:2] == [(2, 1), (0, 3)]


def test_parse_standard_truncated_job_line():
    with pytest.raises(ParseError) as info:
        parse_standard("2 2\n0 1 1 2\n0 3 1\n")
    assert info.value.line == 3


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("2 2\n0 1 1 2\n0 x 1 2\n", 3, 3),
        ("2 2\n0 1 5 2\n1 1 0 2\n", 2, 5),
        ("2 2\n0 1 1 -2\n1 1 0 2\n", 2, 7),
        ("2 2\n0 1 1 2\n", 3, 1),
        ("2 2\n0 1 1 2\n1 3 1 4\n", 3, 5),
    ],
)
def test_parse_standard_reports_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_standard(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(info.value)


def test_parse_errors_are_instance_errors():
    with pytest.raises(InstanceError):
        parse_standard("")


def test_parse_taillard_reports_repeated_machine_on_its_row():
    with pytest.raises(ParseError) as info:
        parse_taillard("2 2\n1 2\n3 4\n1 2\n2 2\n")
    assert (info.value.line, info.value.column) == (5, 3)
    assert "machine 2 more than once" in str(info.value)


def test_parse_taillard_minimal():
    inst = parse_taillard("1 1\n7\n1\n")
    assert inst.op_machine == (0,)
    assert inst.op_duration == (7,)


def test_taillard_and_standard_twins_agree(data_dir):
    std = load_instance(data_dir / "toy_std.txt", "std")
    ta = load_instance(data_dir / "toy_ta.txt", "ta")
    assert std.routes() == ta.routes()
    assert load_instance(data_dir / "toy_ta.txt").routes() == std.routes()


@pytest.mark.parametrize(
    "text",
    [
        "2 2\n1 2\n3 4\n1 2\n",
        "1 2\n1 2\n1 3\n",
        "1 2\n1 2 3\n1 2\n",
    ],
)
def test_parse_taillard_rejects_bad_shapes(text):
    with pytest.raises(ParseError):
        parse_taillard(text)


def test_unknown_format():
    with pytest.raises(InstanceError):
        parse_instance("1 1\n0 5", "xml")  # type: ignore[arg-type]


def test_solution_file_round_trip(toy):
    sol = Solution.from_lists([[0, 3], [2, 1]])
    assert parse_solution(format_solution(sol), toy) == sol
    with pytest.raises(SolutionError):
        parse_solution("0 3\n", toy)
    with pytest.raises(SolutionError):
        parse_solution("0 3\n2 a\n", toy)


# ── Bounds and relative error ───────────────────────────────────


def test_compute_re():
    assert compute_re(55, 55) == 0
    assert compute_re(1153, 1152) == Fraction(100, 1152)
    assert format_percent(compute_re(1153, 1152)) == "0.087"
    assert format_percent(compute_re(55, 55)) == "0.000"
    assert format_percent(None) == "NA"
    with pytest.raises(ContractViolation):
        compute_re(10, 0)


def test_compute_re_is_monotone():
    values = [compute_re(best, 100) for best in range(100, 120)]
    assert values == sorted(values)
    assert all(v >= 0 for v in values)


def test_format_percent_rounds_half_up():
    assert format_percent(Fraction(1, 2000)) == "0.001"
    assert format_percent(Fraction(2, 3), places=2) == "0.67"


def test_bounds_entry_invariants():
    assert BoundsEntry(instance_name="X", lb=5, ub=5).optimal
    assert not BoundsEntry(instance_name="X", lb=4, ub=5).optimal
    with pytest.raises(ValueError):
        BoundsEntry(instance_name="X", lb=6, ub=5)


def test_packaged_catalog():
    catalog = BoundsCatalog.load(DEFAULT_BOUNDS_CATALOG)
    assert len(catalog) == 205
    assert catalog.get("ft6").lb == 55
    assert catalog.get("FT06") == catalog.get("ft06")
    assert catalog.get("la29").ub == 1152
    assert catalog.get("yn1").lb == 826
    assert catalog.get("TA01").optimal
    assert not catalog.get("SWV15").optimal
    assert catalog.get("nope") is None
    assert "orb7" in catalog
    orb = [line.split(",") for line in DEFAULT_BOUNDS_CATALOG.read_text().splitlines() if line.startswith("ORB")]
    assert len(orb) == 10
    assert {row[1] for row in orb} == {"10x10"}


def test_name_normalisation():
    assert normalize_name("ft6") == "FT06"
    assert normalize_name("dmu080") == "DMU80"
    assert normalize_name("weird-name") == "WEIRD-NAME"


@pytest.mark.parametrize(
    "name, group",
    [("FT10", "FT/ORB"), ("orb03", "FT/ORB"), ("LA29", "LA"), ("abz7", "ABZ/YN"), ("YN04", "ABZ/YN"),
     ("SWV01", "SWV"), ("ta50", "TA"), ("DMU41", "DMU"), ("toy", "other")],
)
def test_instance_groups(name, group):
    assert instance_group(name) == group


@pytest.mark.parametrize(
    "name, hours",
    [("FT06", 1), ("SWV11", 1), ("SWV12", 2), ("SWV15", 2), ("DMU55", 1), ("DMU56", 2), ("DMU65", 2),
     ("DMU66", 4), ("DMU70", 4), ("DMU71", 5), ("DMU80", 5), ("TA50", 1), ("toy", 1)],
)
def test_default_time_limits(name, hours):
    assert default_time_limit(name) == hours * 3600


# ── Manifest and harness ────────────────────────────────────────


def test_parse_manifest(tmp_path):
    entries = parse_manifest(
        "# path format lb ub time runs seed\n"
        "ft06.txt std 55 55 1.5 3 7\n"
        "\n"
        "ta.txt - - - - 1   # trailing comment\n",
        base_dir=tmp_path,
    )
    assert len(entries) == 2
    assert entries[0].path == tmp_path / "ft06.txt"
    assert (entries[0].fmt, entries[0].lb, entries[0].time_limit, entries[0].runs, entries[0].seed) == (
        "std", 55, 1.5, 3, 7
    )
    assert (entries[1].fmt, entries[1].lb, entries[1].time_limit, entries[1].seed) == ("auto", None, None, None)


@pytest.mark.parametrize("line", ["ft06.txt std 55", "ft06.txt xml - - - 1", "ft06.txt std - - -1 1"])
def test_parse_manifest_rejects(line, tmp_path):
    with pytest.raises(ManifestError):
        parse_manifest(line, base_dir=tmp_path)


def test_empty_manifest():
    assert run_benchmark([]) == []
    assert render_report([]) == ",".join(REPORT_HEADER) + "\n"


def test_missing_instance_file(tmp_path):
    manifest = parse_manifest("missing.txt std - - 1 1", base_dir=tmp_path)
    with pytest.raises(ManifestError):
        run_benchmark(manifest)
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nothing.txt")


def _manifest(tmp_path, data_dir, lines):
    for name in ("ft06.txt", "la01.txt", "toy_std.txt"):
        (tmp_path / name).write_text((data_dir / name).read_text())
    path = tmp_path / "bench.txt"
    path.write_text("\n".join(lines) + "\n")
    return load_manifest(path)


def test_run_benchmark_aggregates(tmp_path, data_dir):
    manifest = _manifest(tmp_path, data_dir, ["ft06.txt std - - 1 3 10", "toy_std.txt std - - 5 2"])
    config = BenchConfig(evolve=FAST, clock="work", work_rate=2000.0, base_seed=100)
    reports = run_benchmark(manifest, config, BoundsCatalog.load(DEFAULT_BOUNDS_CATALOG))

    ft06, toy = reports
    assert ft06.seeds == [10, 11, 12]
    assert ft06.lb == 55
    assert ft06.best == min(r.best for r in ft06.records)
    assert ft06.best <= ft06.m_av
    assert ft06.m_av == pytest.approx(sum(r.best for r in ft06.records) / 3)
    assert ft06.re == compute_re(ft06.best, 55)
    assert toy.seeds == [100, 101]
    assert toy.lb is None and toy.re is None
    assert toy.best == 8


def test_runs_override(tmp_path, data_dir):
    manifest = _manifest(tmp_path, data_dir, ["toy_std.txt std 8 8 5 5"])
    reports = run_benchmark(manifest, BenchConfig(evolve=FAST, clock="work", runs=1))
    assert reports[0].runs == 1
    assert format_percent(reports[0].re) == "0.000"


def test_bench_output_is_byte_identical(tmp_path, data_dir):
    manifest = _manifest(tmp_path, data_dir, ["ft06.txt std 55 55 1 2 0", "la01.txt std - - 1 1 3"])
    config = BenchConfig(evolve=FAST, clock="work", work_rate=2000.0)
    catalog = BoundsCatalog.load(DEFAULT_BOUNDS_CATALOG)

    first = write_reports(run_benchmark(manifest, config, catalog), tmp_path / "a" / "report.csv")
    second = write_reports(run_benchmark(manifest, config, catalog), tmp_path / "b" / "report.csv")

    assert [p.name for p in first] == ["report.csv", "report.runs.csv", "report.mre.csv", "report.ub.csv", "report.ubgap.csv"]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
    lines = [p.read_text().splitlines() for p in first]
    assert lines[0][0] == ",".join(REPORT_HEADER)
    assert lines[1][0] == ",".join(RUNS_HEADER)
    assert lines[2][0] == ",".join(MRE_HEADER)
    assert len(lines[1]) == 1 + 3
    assert lines[2][1].startswith("FT/ORB,1,")
    assert lines[2][2].startswith("LA,1,")
    assert lines[3][0] == ",".join(UB_HEADER)
    assert lines[3][-1].startswith("all,2,0,")
    assert lines[4][0] == ",".join(UB_GAP_HEADER)
    assert all(row.startswith("worse,") for row in lines[4][1:])


def test_exhausted_run_does_not_abort_the_bench(tmp_path, data_dir):
    manifest = _manifest(tmp_path, data_dir, ["ft06.txt std 55 55 1 1 0", "la01.txt std - - 0.001 1 0"])
    config = BenchConfig(evolve=FAST, clock="work", work_rate=2000.0)
    ft06, la01 = run_benchmark(manifest, config, BoundsCatalog.load(DEFAULT_BOUNDS_CATALOG))

    assert ft06.exhausted == 0
    assert ft06.best is not None and ft06.best >= 55
    assert (la01.runs, la01.exhausted) == (1, 1)
    assert (la01.best, la01.m_av, la01.t_av, la01.re) == (None, None, None, None)
    assert la01.records[0].outcome == "budget_exhausted"
    assert not la01.records[0].finished

    runs = render_runs([ft06, la01]).splitlines()
    assert runs[1].endswith(",ok")
    assert runs[2] == "la01,0,NA,NA,0,0,0,budget_exhausted"
    assert render_report([la01]).splitlines()[1] == "la01,10x5,666,666,NA,NA,NA,NA,1,0"
    assert render_mre([ft06, la01]).splitlines()[1:] == [f"FT/ORB,1,{format_percent(ft06.re)}"]


def _report(name, group, ub, best):
    records = [RunRecord(instance=name, seed=0, best=best, time_to_best=1.0 if best is not None else None)]
    return RunReport(
        instance_name=name,
        size="10x10",
        group=group,
        lb=None,
        ub=ub,
        runs=1,
        exhausted=0,
        best=best,
        m_av=best,
        t_av=1.0,
        re=None,
        seeds=[0],
        records=records,
    )


UB_REPORTS = [
    _report("DMU41", "DMU", 3248, 3200),
    _report("FT10", "FT/ORB", 930, 930),
    _report("SWV06", "SWV", 1672, 1671),
    _report("LA29", "LA", 1152, 1153),
    _report("TA50", "TA", 1924, 1923),
    _report("TOY", "other", None, 8),
    _report("SWV07", "SWV", 1594, None),
]


def test_ub_summary_counts_per_group_and_overall():
    assert render_ub_summary(UB_REPORTS).splitlines() == [
        ",".join(UB_HEADER),
        "FT/ORB,1,0,1,0",
        "LA,1,0,0,1",
        "SWV,1,1,0,0",
        "TA,1,1,0,0",
        "DMU,1,1,0,0",
        "all,5,3,1,1",
    ]


def test_ub_gaps_bucket_by_units():
    assert render_ub_gaps(UB_REPORTS).splitlines() == [
        ",".join(UB_GAP_HEADER),
        "better,1,2",
        "better,>10,1",
        "worse,1,1",
    ]


def test_ub_tables_without_upper_bounds_are_empty():
    assert render_ub_summary(UB_REPORTS[-2:]) == ",".join(UB_HEADER) + "\n"
    assert render_ub_gaps([]) == ",".join(UB_GAP_HEADER) + "\n"


FT_ORB = ["ft06", "ft10", "ft20", *(f"orb{index:02d}" for index in range(1, 11))]


@pytest.mark.slow
def test_ft_orb_group_is_solved_to_optimality(tmp_path, data_dir):
    missing = [name for name in FT_ORB if not (data_dir / f"{name}.txt").is_file()]
    if missing:
        pytest.skip(f"not in tests/data: {', '.join(missing)}")
    manifest = tmp_path / "bench.txt"
    manifest.write_text("".join(f"{data_dir / name}.txt std - - 600 1 0\n" for name in FT_ORB))
    reports = run_benchmark(load_manifest(manifest), BenchConfig(), BoundsCatalog.load(DEFAULT_BOUNDS_CATALOG))
    assert render_mre(reports).splitlines()[1] == "FT/ORB,13,0.000"
