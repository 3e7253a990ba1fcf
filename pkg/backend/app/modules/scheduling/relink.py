"""Path relinking between two machine-permutation solutions.

The path walks from the initiating solution toward the guiding one by swaps
that put one more guiding element in place. Snapshots taken along the way are
repaired when cyclic, polished by a slight tabu search, and the most promising
one is finished by a strong tabu search to become the reference solution.
"""

import logging
import math
import random
from dataclasses import dataclass, field

from app.core.errors import ContractViolation
from app.modules.scheduling.graph import ScheduleEval, is_feasible, repair
from app.modules.scheduling.model import Instance, Solution
from app.modules.scheduling.monitor import Deadline, SearchMonitor
from app.modules.scheduling.params import RelinkConfig, TabuConfig
from app.modules.scheduling.tabu import tabu_search

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PathParams:
    alpha: int
    beta: int
    si: int
    li: int

    def __post_init__(self) -> None:
        if self.alpha < 1 or self.beta < 1 or self.si < 1 or self.li < self.si:
            raise ContractViolation(f"invalid path parameters {self}")

    @classmethod
    def for_distance(cls, dis: int, config: RelinkConfig) -> "PathParams":
        """alpha = ceil(dis/5), beta = max(ceil(dis/10), 2) unless fixed by ``config``."""
        alpha = config.alpha or max(1, math.ceil(dis / config.alpha_divisor))
        beta = config.beta or max(math.ceil(dis / config.beta_divisor), config.beta_floor)
        return cls(alpha=alpha, beta=beta, si=config.si, li=config.li)


@dataclass(slots=True)
class PathSet:
    candidates: list[Solution] = field(default_factory=list)
    steps: int = 0


def distance(a: Solution, b: Solution) -> int:
    """Number of machine positions holding different operations."""
    if len(a.perm) != len(b.perm) or any(
        len(x) != len(y) for x, y in zip(a.perm, b.perm)
    ):
        raise ContractViolation("distance between solutions of different shapes")
    return sum(x != y for ops_a, ops_b in zip(a.perm, b.perm) for x, y in zip(ops_a, ops_b))


def path_step(current: Solution, guiding: Solution, rng: random.Random) -> Solution:
    """Put one randomly chosen misplaced guiding element into its guiding position."""
    mismatched = [
        (machine, index)
        for machine, (ops_c, ops_g) in enumerate(zip(current.perm, guiding.perm))
        for index, (x, y) in enumerate(zip(ops_c, ops_g))
        if x != y
    ]
    if not mismatched:
        raise ContractViolation("path_step called on identical solutions")
    machine, i = rng.choice(mismatched)
    perm = list(current.perm[machine])
    j = perm.index(guiding.perm[machine][i])
    perm[i], perm[j] = perm[j], perm[i]
    machines = list(current.perm)
    machines[machine] = tuple(perm)
    return Solution(tuple(machines))


def _walk(current: Solution, guiding: Solution, steps: int, rng: random.Random) -> tuple[Solution, int]:
    taken = 0
    while taken < steps and current.perm != guiding.perm:
        current = path_step(current, guiding, rng)
        taken += 1
    return current, taken


def build_path(
    initiating: Solution, guiding: Solution, params: PathParams, rng: random.Random
) -> PathSet:
    """Snapshot after alpha swaps, then every beta swaps while more than alpha away."""
    if distance(initiating, guiding) == 0:
        raise ContractViolation("build_path needs distinct endpoints")

    path = PathSet()
    current, taken = _walk(initiating, guiding, params.alpha, rng)
    path.steps += taken
    path.candidates.append(current)
    while distance(current, guiding) > params.alpha:
        current, taken = _walk(current, guiding, params.beta, rng)
        path.steps += taken
        path.candidates.append(current)
    return path


def path_relinking(
    inst: Instance,
    initiating: Solution,
    guiding: Solution,
    deadline: Deadline,
    rng: random.Random,
    known_lb: int | None = None,
    *,
    config: RelinkConfig | None = None,
    tabu: TabuConfig | None = None,
    monitor: SearchMonitor | None = None,
) -> tuple[Solution, ScheduleEval]:
    """Reference solution of the path from ``initiating`` toward ``guiding``."""
    config = config or RelinkConfig()
    dis = distance(initiating, guiding)
    if dis == 0:
        raise ContractViolation("path relinking needs distinct endpoints")
    params = PathParams.for_distance(dis, config)

    if dis <= 2 * params.alpha:
        # too close for a path: one midpoint snapshot
        midpoint, _ = _walk(initiating, guiding, math.ceil(dis / 2), rng)
        candidates = [midpoint]
    else:
        candidates = build_path(initiating, guiding, params, rng).candidates

    best: tuple[Solution, ScheduleEval] | None = None
    for snapshot in candidates:
        if best is not None and deadline.expired():
            break
        if not is_feasible(inst, snapshot):
            snapshot = repair(inst, snapshot)
            if monitor is not None:
                monitor.infeasible_snapshots += 1
                monitor.repairs += 1
        polished = tabu_search(
            inst, snapshot, params.si, deadline, rng, known_lb, config=tabu, monitor=monitor
        )
        # strict comparison keeps the earliest snapshot on ties
        if best is None or polished[1].makespan < best[1].makespan:
            best = polished
        if known_lb is not None and best[1].makespan <= known_lb:
            break

    assert best is not None
    reference = tabu_search(
        inst, best[0], params.li, deadline, rng, known_lb, config=tabu, monitor=monitor
    )
    if monitor is not None:
        monitor.relinks += 1
    logger.debug(
        "relinked distance %d over %d snapshots (alpha=%d beta=%d) -> %d",
        dis,
        len(candidates),
        params.alpha,
        params.beta,
        reference[1].makespan,
    )
    return reference
