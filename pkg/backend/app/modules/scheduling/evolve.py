"""Population loop: pair selection, two-way relinking and replacement.

Every member is a tabu-search local optimum and no two members are equal.
Each iteration relinks one unprocessed pair in both directions, adds the two
reference solutions, then drops the two weakest of the enlarged pool.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import NamedTuple

from app.core.errors import BudgetExhaustedError, ContractViolation
from app.modules.scheduling.graph import Evaluator, ScheduleEval, repair
from app.modules.scheduling.model import Instance, Solution, random_solution, solutions_equal
from app.modules.scheduling.monitor import Clock, Deadline, SearchMonitor, WallClock
from app.modules.scheduling.params import EvolveConfig
from app.modules.scheduling.relink import path_relinking
from app.modules.scheduling.tabu import tabu_search

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Member:
    solution: Solution
    evaluation: ScheduleEval
    birth: int
    start_makespan: int | None = None  # repaired random start, before tabu search

    @property
    def makespan(self) -> int:
        return self.evaluation.makespan


@dataclass(slots=True)
class Population:
    members: list[Member]
    best: Member
    next_birth: int = 0

    def spawn(self, solution: Solution, evaluation: ScheduleEval) -> Member:
        member = Member(solution, evaluation, self.next_birth)
        self.next_birth += 1
        return member

    def consider(self, member: Member) -> bool:
        """Promote ``member`` to the incumbent if it is strictly better."""
        if member.makespan < self.best.makespan:
            self.best = member
            return True
        return False

    def member(self, birth: int) -> Member:
        for m in self.members:
            if m.birth == birth:
                return m
        raise KeyError(birth)


@dataclass(slots=True)
class PairSet:
    """Unordered pairs of live members (by birth id) not relinked yet."""

    pairs: set[tuple[int, int]] = field(default_factory=set)

    @classmethod
    def full(cls, members: list[Member]) -> "PairSet":
        pair_set = cls()
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                pair_set.add(a.birth, b.birth)
        return pair_set

    def add(self, a: int, b: int) -> None:
        if a != b:
            self.pairs.add((min(a, b), max(a, b)))

    def purge(self, birth: int) -> None:
        self.pairs = {pair for pair in self.pairs if birth not in pair}

    def pop_random(self, rng: random.Random) -> tuple[int, int]:
        pair = rng.choice(sorted(self.pairs))
        self.pairs.discard(pair)
        return pair

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(slots=True)
class RunStats:
    seed: int | None
    iterations: int = 0
    relinks: int = 0
    repairs: int = 0
    restarts: int = 0
    tabu_runs: int = 0
    ts_iterations: int = 0
    infeasible_moves: int = 0
    infeasible_snapshots: int = 0
    best_makespan: int = 0
    time_to_best: float = 0.0
    elapsed: float = 0.0
    population_size: int = 0
    trace: list[tuple[float, int]] = field(default_factory=list)


class EvolveResult(NamedTuple):
    best: Solution
    evaluation: ScheduleEval
    stats: RunStats


def _reached(makespan: int, known_lb: int | None) -> bool:
    return known_lb is not None and makespan <= known_lb


def _fill(
    inst: Instance,
    members: list[Member],
    target: int,
    next_birth: int,
    cutoff: int,
    deadline: Deadline,
    rng: random.Random,
    known_lb: int | None,
    config: EvolveConfig,
    monitor: SearchMonitor | None,
) -> int:
    """Append improved, non-duplicate random solutions until ``target`` members."""
    seen = {m.solution.perm for m in members}
    evaluator = Evaluator(inst)
    duplicates = 0
    while len(members) < target and not deadline.expired():
        drawn = random_solution(inst, rng)
        start = repair(inst, drawn, evaluator)
        start_makespan = evaluator.evaluate(start).makespan
        if start is not drawn and monitor is not None:
            monitor.repairs += 1
        improved, evaluation = tabu_search(
            inst, start, cutoff, deadline, rng, known_lb, config=config.tabu, monitor=monitor
        )
        if improved.perm in seen:
            duplicates += 1
            if duplicates >= config.max_duplicate_draws:
                logger.info(
                    "%s: %d duplicate local optima in a row, keeping %d members",
                    inst.name or "instance",
                    duplicates,
                    len(members),
                )
                break
            continue
        duplicates = 0
        seen.add(improved.perm)
        members.append(Member(improved, evaluation, next_birth, start_makespan))
        next_birth += 1
        if _reached(evaluation.makespan, known_lb):
            break
    return next_birth


def init_population(
    inst: Instance,
    p: int,
    cutoff: int,
    deadline: Deadline,
    rng: random.Random,
    known_lb: int | None = None,
    *,
    config: EvolveConfig | None = None,
    monitor: SearchMonitor | None = None,
) -> Population:
    """Build up to ``p`` distinct tabu-search local optima from random starts."""
    if p < 2:
        raise ContractViolation(f"population size must be at least 2, got {p}")
    config = config or EvolveConfig()
    members: list[Member] = []
    next_birth = _fill(
        inst, members, p, 0, cutoff, deadline, rng, known_lb, config, monitor
    )
    if not members:
        raise BudgetExhaustedError("budget exhausted in init: no member was built")
    best = min(members, key=lambda m: (m.makespan, m.birth))
    if len(members) < 2 and deadline.expired() and not _reached(best.makespan, known_lb):
        raise BudgetExhaustedError("budget exhausted in init: fewer than two members")
    logger.info(
        "%s: population of %d built, best %d",
        inst.name or "instance",
        len(members),
        best.makespan,
    )
    return Population(members=members, best=best, next_birth=next_birth)


def _replace(population: Population, products: list[Member], pairs: PairSet) -> None:
    """Add ``products`` and drop as many members: redundant copies, then worst, then oldest."""
    pool = population.members + products
    for product in products:
        for other in pool:
            if other is not product:
                pairs.add(product.birth, other.birth)

    redundant: set[int] = set()
    first_seen: set[tuple[tuple[int, ...], ...]] = set()
    for member in sorted(pool, key=lambda m: m.birth):
        if member.solution.perm in first_seen:
            redundant.add(member.birth)
        else:
            first_seen.add(member.solution.perm)

    ranked = sorted(
        pool,
        key=lambda m: (m.birth in redundant, m.makespan, -m.birth),
        reverse=True,
    )
    dropped = {m.birth for m in ranked[: len(products)]}
    population.members = [m for m in pool if m.birth not in dropped]
    for birth in dropped:
        pairs.purge(birth)


def _restart(
    inst: Instance,
    population: Population,
    config: EvolveConfig,
    deadline: Deadline,
    rng: random.Random,
    known_lb: int | None,
    monitor: SearchMonitor,
) -> PairSet:
    keep = min(population.members, key=lambda m: (m.makespan, m.birth))
    population.members = [keep]
    population.next_birth = _fill(
        inst,
        population.members,
        config.population_size,
        population.next_birth,
        config.improver_cutoff,
        deadline,
        rng,
        known_lb,
        config,
        monitor,
    )
    for member in population.members:
        population.consider(member)
    monitor.restarts += 1
    logger.info("%s: pair set exhausted, restarted around %d", inst.name or "instance", keep.makespan)
    return PairSet.full(population.members)


def evolve_run(
    inst: Instance,
    config: EvolveConfig,
    time_limit: float,
    rng: random.Random,
    known_lb: int | None = None,
    *,
    clock: Clock | None = None,
    seed: int | None = None,
) -> EvolveResult:
    """Run the relinking loop until ``time_limit`` seconds pass or ``known_lb`` is met."""
    if time_limit <= 0:
        raise ContractViolation(f"time limit must be positive, got {time_limit}")
    clock = clock or WallClock()
    deadline = Deadline(clock, clock.now() + time_limit)
    monitor = SearchMonitor(clock, trace_interval=config.trace_interval)

    population = init_population(
        inst,
        config.population_size,
        config.improver_cutoff,
        deadline,
        rng,
        known_lb,
        config=config,
        monitor=monitor,
    )
    pairs = PairSet.full(population.members)
    iterations = 0

    while not deadline.expired() and not _reached(population.best.makespan, known_lb):
        if len(population.members) < 2:
            break
        if not pairs:
            pairs = _restart(inst, population, config, deadline, rng, known_lb, monitor)
            continue

        first, second = (population.member(b) for b in pairs.pop_random(rng))
        products: list[Member] = []
        for initiating, guiding in ((first, second), (second, first)):
            if solutions_equal(initiating.solution, guiding.solution):
                continue
            if products and deadline.expired():
                break
            solution, evaluation = path_relinking(
                inst,
                initiating.solution,
                guiding.solution,
                deadline,
                rng,
                known_lb,
                config=config.relink,
                tabu=config.tabu,
                monitor=monitor,
            )
            product = population.spawn(solution, evaluation)
            products.append(product)
            if population.consider(product):
                logger.debug("new best %d after %d iterations", product.makespan, iterations)
            if _reached(product.makespan, known_lb):
                break

        iterations += 1
        if products:
            _replace(population, products, pairs)

    best = population.best
    stats = RunStats(
        seed=seed,
        iterations=iterations,
        relinks=monitor.relinks,
        repairs=monitor.repairs,
        restarts=monitor.restarts,
        tabu_runs=monitor.tabu_runs,
        ts_iterations=monitor.ts_iterations,
        infeasible_moves=monitor.infeasible_moves,
        infeasible_snapshots=monitor.infeasible_snapshots,
        best_makespan=best.makespan,
        time_to_best=monitor.time_to_best,
        elapsed=clock.now(),
        population_size=len(population.members),
        trace=list(monitor.trace),
    )
    logger.info(
        "%s: best %d after %d iterations (%.2fs to best)",
        inst.name or "instance",
        best.makespan,
        iterations,
        stats.time_to_best,
    )
    return EvolveResult(best.solution, best.evaluation, stats)
