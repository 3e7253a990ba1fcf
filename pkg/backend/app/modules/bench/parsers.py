"""Readers for the two public instance layouts.

``std`` is the OR-Library layout: a header ``n m`` followed by one line per
job holding ``m`` ``(machine, duration)`` pairs, machines 0-indexed.
``ta`` is Taillard's layout: a header ``n m`` (extra fields ignored), an n×m
duration matrix, then an n×m machine matrix with machines 1-indexed. Label
lines such as ``Times`` or ``Machines`` are skipped.
"""

from pathlib import Path
from typing import Literal

from app.core.errors import InstanceError, ParseError, SolutionError
from app.modules.scheduling.model import Instance, Solution, build_instance, validate_solution

InstanceFormat = Literal["auto", "std", "ta"]
FORMATS: tuple[str, ...] = ("auto", "std", "ta")


def _rows(text: str) -> list[tuple[int, list[tuple[int, str]]]]:
    """Non-empty, non-comment lines as ``(line_no, [(column, token), ...])``."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = []
        column = 0
        for token in line.split():
            column = line.index(token, column)
            tokens.append((column + 1, token))
            column += len(token)
        rows.append((line_no, tokens))
    return rows


def _int(token: str, line: int, column: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {token!r}", line, column) from None


def _header(row: tuple[int, list[tuple[int, str]]]) -> tuple[int, int]:
    line_no, tokens = row
    if len(tokens) < 2:
        raise ParseError("header must hold the job and machine counts", line_no)
    n = _int(tokens[0][1], line_no, tokens[0][0], "job count")
    m = _int(tokens[1][1], line_no, tokens[1][0], "machine count")
    if n < 1 or m < 1:
        raise ParseError(f"need at least one job and one machine, got {n} {m}", line_no)
    return n, m


def parse_standard(text: str, name: str = "") -> Instance:
    rows = _rows(text)
    if not rows:
        raise ParseError("empty instance", 1)
    n, m = _header(rows[0])
    jobs = rows[1:]
    if len(jobs) < n:
        last = jobs[-1][0] + 1 if jobs else rows[0][0] + 1
        raise ParseError(f"expected {n} job lines, found {len(jobs)}", last)
    if len(jobs) > n:
        raise ParseError(f"unexpected data after {n} job lines", jobs[n][0])

    routes = []
    for line_no, tokens in jobs:
        if len(tokens) != 2 * m:
            raise ParseError(
                f"expected {m} (machine, duration) pairs, got {len(tokens)} values",
                line_no,
                tokens[2 * m][0] if len(tokens) > 2 * m else tokens[-1][0],
            )
        route = []
        visited: set[int] = set()
        for k in range(0, 2 * m, 2):
            (mcol, mtok), (dcol, dtok) = tokens[k], tokens[k + 1]
            machine = _int(mtok, line_no, mcol, "machine")
            duration = _int(dtok, line_no, dcol, "duration")
            if not 0 <= machine < m:
                raise ParseError(f"machine {machine} outside [0, {m})", line_no, mcol)
            if machine in visited:
                raise ParseError(f"job visits machine {machine} more than once", line_no, mcol)
            visited.add(machine)
            if duration < 0:
                raise ParseError(f"negative duration {duration}", line_no, dcol)
            route.append((machine, duration))
        routes.append(route)
    try:
        return build_instance(n, m, routes, name=name)
    except ParseError:
        raise
    except InstanceError as exc:
        raise ParseError(str(exc), jobs[0][0]) from exc


def _is_label(tokens: list[tuple[int, str]]) -> bool:
    try:
        int(tokens[0][1])
    except ValueError:
        return True
    return False


def parse_taillard(text: str, name: str = "") -> Instance:
    rows = [row for row in _rows(text) if not _is_label(row[1])]
    if not rows:
        raise ParseError("empty instance", 1)
    n, m = _header(rows[0])
    body = rows[1:]
    if len(body) != 2 * n:
        where = body[-1][0] if body else rows[0][0]
        raise ParseError(
            f"expected two {n}x{m} matrices ({2 * n} rows), found {len(body)} rows", where
        )

    def matrix(block: list[tuple[int, list[tuple[int, str]]]], what: str) -> list[list[int]]:
        values = []
        for line_no, tokens in block:
            if len(tokens) != m:
                raise ParseError(f"{what} row must hold {m} values, got {len(tokens)}", line_no)
            values.append([_int(tok, line_no, col, what) for col, tok in tokens])
        return values

    durations = matrix(body[:n], "duration")
    machines = matrix(body[n:], "machine")

    routes = []
    for j in range(n):
        route = []
        visited: set[int] = set()
        line_no, tokens = body[n + j]
        for k in range(m):
            machine, duration = machines[j][k], durations[j][k]
            if not 1 <= machine <= m:
                raise ParseError(f"machine {machine} outside [1, {m}]", line_no, tokens[k][0])
            if machine in visited:
                raise ParseError(f"job visits machine {machine} more than once", line_no, tokens[k][0])
            visited.add(machine)
            if duration < 0:
                raise ParseError(f"negative duration {duration}", body[j][0], body[j][1][k][0])
            route.append((machine - 1, duration))
        routes.append(route)
    try:
        return build_instance(n, m, routes, name=name)
    except InstanceError as exc:
        raise ParseError(str(exc), body[n][0]) from exc


def parse_instance(text: str, fmt: InstanceFormat = "auto", name: str = "") -> Instance:
    """Parse ``text`` in ``fmt``; ``auto`` tries the standard layout first."""
    if fmt == "std":
        return parse_standard(text, name)
    if fmt == "ta":
        return parse_taillard(text, name)
    if fmt != "auto":
        raise InstanceError(f"unknown instance format {fmt!r}, expected one of {FORMATS}")
    try:
        return parse_standard(text, name)
    except ParseError as std_error:
        try:
            return parse_taillard(text, name)
        except ParseError:
            raise std_error from None


def load_instance(path: str | Path, fmt: InstanceFormat = "auto") -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), fmt, name=path.stem)


def parse_solution(text: str, inst: Instance) -> Solution:
    """One line per machine listing its operation ids in processing order."""
    rows = _rows(text)
    if len(rows) != inst.n_machines:
        raise SolutionError(f"expected {inst.n_machines} machine lines, found {len(rows)}")
    perm = []
    for line_no, tokens in rows:
        try:
            perm.append(tuple(int(token) for _, token in tokens))
        except ValueError:
            raise SolutionError(f"line {line_no}: operation ids must be integers") from None
    solution = Solution(tuple(perm))
    validate_solution(inst, solution)
    return solution


def format_solution(solution: Solution) -> str:
    return "\n".join(" ".join(str(op) for op in ops) for ops in solution.perm)
