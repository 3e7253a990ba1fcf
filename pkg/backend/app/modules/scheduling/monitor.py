"""Clocks, deadlines and run-wide search bookkeeping.

The wall clock measures real seconds. The work clock counts tabu-search
iterations and converts them to virtual seconds, which makes budgets, traces
and time-to-best figures reproducible from the seed alone.
"""

import time
from dataclasses import dataclass, field
from typing import Literal, Protocol

ClockKind = Literal["wall", "work"]


class Clock(Protocol):
    def now(self) -> float: ...

    def tick(self, work: int = 1) -> None: ...


class WallClock:
    def __init__(self) -> None:
        self._origin = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._origin

    def tick(self, work: int = 1) -> None:
        pass


class WorkClock:
    def __init__(self, rate: float) -> None:
        if rate <= 0:
            raise ValueError("work rate must be positive")
        self._rate = rate
        self._work = 0

    def now(self) -> float:
        return self._work / self._rate

    def tick(self, work: int = 1) -> None:
        self._work += work


def make_clock(kind: ClockKind, work_rate: float) -> Clock:
    return WorkClock(work_rate) if kind == "work" else WallClock()


@dataclass(slots=True)
class Deadline:
    """A budget on ``clock``; ``limit=None`` never expires."""

    clock: Clock
    limit: float | None = None

    def expired(self) -> bool:
        return self.limit is not None and self.clock.now() >= self.limit


@dataclass(slots=True)
class SearchMonitor:
    """Incumbent, time-to-best, best-over-time trace and work counters of one run."""

    clock: Clock
    trace_interval: float = 1.0
    best_makespan: int | None = None
    time_to_best: float = 0.0
    trace: list[tuple[float, int]] = field(default_factory=list)
    tabu_runs: int = 0
    ts_iterations: int = 0
    infeasible_moves: int = 0
    relinks: int = 0
    repairs: int = 0
    infeasible_snapshots: int = 0
    restarts: int = 0
    _last_sample: float = 0.0

    def observe(self, makespan: int) -> bool:
        """Record a makespan seen anywhere in the run; True if it is a new incumbent."""
        now = self.clock.now()
        if self.best_makespan is None or makespan < self.best_makespan:
            self.best_makespan = makespan
            self.time_to_best = now
            self.trace.append((now, makespan))
            self._last_sample = now
            return True
        if now - self._last_sample >= self.trace_interval:
            self.trace.append((now, self.best_makespan))
            self._last_sample = now
        return False
