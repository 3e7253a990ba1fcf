"""Disjunctive-graph evaluation of a machine-permutation solution.

Conjunctive arcs follow each job's route, disjunctive arcs follow the order
fixed on every machine. Heads come out of the Kahn pass itself and tails out
of one reverse sweep over the same order; a solution whose arcs contain a
cycle is reported as infeasible rather than raised.
"""

import heapq
import logging
from dataclasses import dataclass
from operator import add

from app.core.errors import ContractViolation
from app.modules.scheduling.model import Instance, Solution

logger = logging.getLogger(__name__)

NONE = -1  # missing predecessor or successor


@dataclass(frozen=True, slots=True)
class ScheduleEval:
    """Semi-active schedule implied by a solution.

    When ``feasible`` is false only ``feasible`` and ``position`` may be read.
    """

    feasible: bool
    start: tuple[int, ...]
    head: tuple[int, ...]
    tail: tuple[int, ...]
    makespan: int
    critical_ops: tuple[int, ...]
    position: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class CriticalBlock:
    machine: int
    ops: tuple[int, ...]


class Evaluator:
    """Flat arc arrays of one instance plus link buffers reused across calls.

    A tabu run creates one and evaluates every accepted move with it. Each
    solution passed in must hold every operation exactly once.
    """

    __slots__ = ("inst", "n_ops", "dur", "jpred", "jsucc", "_job_indegree", "mpred", "msucc", "position")

    def __init__(self, inst: Instance) -> None:
        n_ops = inst.total_ops
        self.inst = inst
        self.n_ops = n_ops
        self.dur = list(inst.op_duration)
        self.jpred = [NONE if op is None else op for op in inst.job_pred]
        self.jsucc = [NONE if op is None else op for op in inst.job_succ]
        self._job_indegree = [int(op != NONE) for op in self.jpred]
        self.mpred = [NONE] * n_ops
        self.msucc = [NONE] * n_ops
        self.position = [0] * n_ops

    def link(self, sol: Solution) -> None:
        """Load the machine arcs and in-machine positions of ``sol``."""
        mpred = self.mpred
        msucc = self.msucc
        position = self.position
        for ops in sol.perm:
            prev = NONE
            for index, op in enumerate(ops):
                position[op] = index
                mpred[op] = prev
                if prev != NONE:
                    msucc[prev] = op
                prev = op
            if prev != NONE:
                msucc[prev] = NONE

    def forward(self) -> tuple[list[int], list[int]]:
        """Kahn order of the linked solution and the heads along it.

        The order is shorter than ``n_ops`` iff the solution is cyclic; heads
        are only meaningful when it is not.
        """
        jsucc = self.jsucc
        msucc = self.msucc
        dur = self.dur
        indegree = [j + (m != NONE) for j, m in zip(self._job_indegree, self.mpred)]
        head = [0] * self.n_ops
        order = [op for op, degree in enumerate(indegree) if not degree]
        push = order.append
        for op in order:  # grows while iterated
            finish = head[op] + dur[op]
            nxt = jsucc[op]
            if nxt != NONE:
                if finish > head[nxt]:
                    head[nxt] = finish
                indegree[nxt] -= 1
                if not indegree[nxt]:
                    push(nxt)
            nxt = msucc[op]
            if nxt != NONE:
                if finish > head[nxt]:
                    head[nxt] = finish
                indegree[nxt] -= 1
                if not indegree[nxt]:
                    push(nxt)
        return order, head

    def is_feasible(self, sol: Solution) -> bool:
        self.link(sol)
        return len(self.forward()[0]) == self.n_ops

    def evaluate(self, sol: Solution) -> ScheduleEval:
        """Start times, heads, tails, makespan and one critical path of ``sol``."""
        self.link(sol)
        order, head = self.forward()
        position = tuple(self.position)

        if len(order) < self.n_ops:
            if logger.isEnabledFor(logging.DEBUG):
                scheduled = set(order)
                op_machine = self.inst.op_machine
                machines = sorted({op_machine[op] for op in range(self.n_ops) if op not in scheduled})
                logger.debug("cyclic solution; machines on the cycle residue: %s", machines)
            return ScheduleEval(
                feasible=False,
                start=(),
                head=(),
                tail=(),
                makespan=0,
                critical_ops=(),
                position=position,
            )

        dur = self.dur
        jsucc = self.jsucc
        msucc = self.msucc
        tail = [0] * self.n_ops
        for op in reversed(order):
            best = 0
            nxt = jsucc[op]
            if nxt != NONE:
                best = tail[nxt] + dur[nxt]
            nxt = msucc[op]
            if nxt != NONE:
                value = tail[nxt] + dur[nxt]
                if value > best:
                    best = value
            tail[op] = best

        finish = list(map(add, head, dur))
        makespan = max(finish)
        last = finish.index(makespan)  # lowest id among the last finishers

        heads = tuple(head)
        return ScheduleEval(
            feasible=True,
            start=heads,
            head=heads,
            tail=tuple(tail),
            makespan=makespan,
            critical_ops=tuple(self._backtrack(last, head)),
            position=position,
        )

    def _backtrack(self, last: int, head: list[int]) -> list[int]:
        # Every op has at most one predecessor of each kind: prefer the machine arc.
        dur = self.dur
        jpred = self.jpred
        mpred = self.mpred
        path = [last]
        op = last
        while True:
            prev = mpred[op]
            if prev != NONE and head[prev] + dur[prev] == head[op]:
                op = prev
            else:
                prev = jpred[op]
                if prev != NONE and head[prev] + dur[prev] == head[op]:
                    op = prev
                else:
                    break
            path.append(op)
        path.reverse()
        return path


def evaluate(inst: Instance, sol: Solution) -> ScheduleEval:
    return Evaluator(inst).evaluate(sol)


def critical_blocks(inst: Instance, ev: ScheduleEval, sol: Solution) -> list[CriticalBlock]:
    """Split the critical path into maximal same-machine runs, in path order."""
    if not ev.feasible:
        raise ContractViolation("critical_blocks needs a feasible evaluation")

    blocks: list[CriticalBlock] = []
    run: list[int] = []
    position = ev.position
    op_machine = inst.op_machine
    for op in ev.critical_ops:
        if run:
            prev = run[-1]
            if op_machine[prev] == op_machine[op] and position[op] == position[prev] + 1:
                run.append(op)
                continue
            blocks.append(CriticalBlock(op_machine[prev], tuple(run)))
        run = [op]
    if run:
        blocks.append(CriticalBlock(op_machine[run[0]], tuple(run)))
    return blocks


def is_feasible(inst: Instance, sol: Solution) -> bool:
    return Evaluator(inst).is_feasible(sol)


def repair(inst: Instance, sol: Solution, evaluator: Evaluator | None = None) -> Solution:
    """Return ``sol`` if it is acyclic, otherwise a feasible reordering of it.

    The decoder repeatedly schedules, among the operations whose job
    predecessor is already placed, the one sitting earliest in its machine's
    input permutation (ties: lower machine, then lower id) and appends it to
    that machine. Appending in a job-respecting global order cannot close a
    cycle.
    """
    evaluator = evaluator or Evaluator(inst)
    if evaluator.is_feasible(sol):
        return sol

    position = evaluator.position
    op_machine = inst.op_machine
    job_succ = inst.job_succ

    ready = [(position[ops[0]], op_machine[ops[0]], ops[0]) for ops in inst.ops_of_job]
    heapq.heapify(ready)
    out: list[list[int]] = [[] for _ in range(inst.n_machines)]
    while ready:
        _, machine, op = heapq.heappop(ready)
        out[machine].append(op)
        nxt = job_succ[op]
        if nxt is not None:
            heapq.heappush(ready, (position[nxt], op_machine[nxt], nxt))
    return Solution.from_lists(out)
