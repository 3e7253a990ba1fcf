"""Problem data and the machine-permutation encoding of a schedule.

Operations are numbered densely and job-major: job 0's operations come first,
in route order, then job 1's, and so on. The dummy source and sink of the
disjunctive graph are never stored; ``graph`` treats them implicitly.
"""

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from app.core.errors import ContractViolation, InstanceError, SolutionError

Route = Sequence[tuple[int, int]]


@dataclass(frozen=True, slots=True)
class Instance:
    """Immutable job-shop instance. Safe to share between workers."""

    n_jobs: int
    n_machines: int
    op_machine: tuple[int, ...]
    op_duration: tuple[int, ...]
    job_of: tuple[int, ...]
    job_pred: tuple[int | None, ...]
    job_succ: tuple[int | None, ...]
    ops_of_job: tuple[tuple[int, ...], ...]
    machine_ops: tuple[tuple[int, ...], ...]
    name: str = ""

    @property
    def total_ops(self) -> int:
        return len(self.op_machine)

    @property
    def size(self) -> str:
        return f"{self.n_jobs}x{self.n_machines}"

    def routes(self) -> list[list[tuple[int, int]]]:
        """Read the job routes back as ``(machine, duration)`` lists."""
        return [
            [(self.op_machine[op], self.op_duration[op]) for op in ops]
            for ops in self.ops_of_job
        ]


@dataclass(frozen=True, slots=True)
class Solution:
    """Per-machine operation order. May encode a cyclic (infeasible) schedule."""

    perm: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, perm: Iterable[Iterable[int]]) -> "Solution":
        return cls(tuple(tuple(ops) for ops in perm))

    def to_lists(self) -> list[list[int]]:
        return [list(ops) for ops in self.perm]

    @property
    def n_machines(self) -> int:
        return len(self.perm)


def build_instance(
    n_jobs: int,
    n_machines: int,
    job_routes: Sequence[Route],
    *,
    allow_repeats: bool = False,
    name: str = "",
) -> Instance:
    """Assemble an :class:`Instance` from per-job ``(machine, duration)`` routes.

    A job visiting the same machine twice is rejected unless ``allow_repeats``
    is set (benchmark instances never do it).
    """
    if n_jobs < 1 or n_machines < 1:
        raise InstanceError(f"need at least one job and one machine, got {n_jobs}x{n_machines}")
    if len(job_routes) != n_jobs:
        raise InstanceError(f"expected {n_jobs} job routes, got {len(job_routes)}")

    op_machine: list[int] = []
    op_duration: list[int] = []
    job_of: list[int] = []
    job_pred: list[int | None] = []
    job_succ: list[int | None] = []
    ops_of_job: list[tuple[int, ...]] = []
    machine_ops: list[list[int]] = [[] for _ in range(n_machines)]

    for job, route in enumerate(job_routes):
        if not route:
            raise InstanceError(f"job {job} has an empty route")
        seen: set[int] = set()
        ops: list[int] = []
        for machine, duration in route:
            if not 0 <= machine < n_machines:
                raise InstanceError(f"job {job}: machine {machine} outside [0, {n_machines})")
            if duration < 0:
                raise InstanceError(f"job {job}: negative duration {duration}")
            if machine in seen and not allow_repeats:
                raise InstanceError(f"job {job} visits machine {machine} more than once")
            seen.add(machine)

            op = len(op_machine)
            op_machine.append(machine)
            op_duration.append(duration)
            job_of.append(job)
            job_pred.append(ops[-1] if ops else None)
            job_succ.append(None)
            if ops:
                job_succ[ops[-1]] = op
            machine_ops[machine].append(op)
            ops.append(op)
        ops_of_job.append(tuple(ops))

    return Instance(
        n_jobs=n_jobs,
        n_machines=n_machines,
        op_machine=tuple(op_machine),
        op_duration=tuple(op_duration),
        job_of=tuple(job_of),
        job_pred=tuple(job_pred),
        job_succ=tuple(job_succ),
        ops_of_job=tuple(ops_of_job),
        machine_ops=tuple(tuple(ops) for ops in machine_ops),
        name=name,
    )


def solutions_equal(a: Solution, b: Solution) -> bool:
    """Position-by-position equality on every machine."""
    if len(a.perm) != len(b.perm):
        raise ContractViolation(
            f"solutions cover {len(a.perm)} and {len(b.perm)} machines"
        )
    return a.perm == b.perm


def random_solution(inst: Instance, rng: random.Random) -> Solution:
    """Uniformly random permutation on every machine."""
    perm = []
    for ops in inst.machine_ops:
        order = list(ops)
        rng.shuffle(order)
        perm.append(tuple(order))
    return Solution(tuple(perm))


def validate_solution(inst: Instance, sol: Solution) -> None:
    """Raise :class:`SolutionError` unless every machine holds exactly its operations."""
    if len(sol.perm) != inst.n_machines:
        raise SolutionError(
            f"solution lists {len(sol.perm)} machines, instance has {inst.n_machines}"
        )
    for machine, ops in enumerate(sol.perm):
        expected = inst.machine_ops[machine]
        if len(ops) != len(expected) or set(ops) != set(expected):
            raise SolutionError(
                f"machine {machine}: expected a permutation of {sorted(expected)}, got {list(ops)}"
            )
