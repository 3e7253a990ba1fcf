"""Tabu search over critical-block reinsertion moves.

Neighbourhood: inside every critical block of two or more operations, an
interior operation may jump to the block front or to the block rear, the first
operation may jump to the rear and the last to the front. A move is skipped
when head/tail bounds cannot rule out a cycle; a move that still produces a
cycle after being applied is rejected and made tabu.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import StrEnum
from typing import NamedTuple

from app.core.errors import ContractViolation
from app.modules.scheduling.graph import Evaluator, ScheduleEval, critical_blocks, repair
from app.modules.scheduling.model import Instance, Solution
from app.modules.scheduling.monitor import Deadline, SearchMonitor
from app.modules.scheduling.params import TabuConfig

logger = logging.getLogger(__name__)


class BlockEdge(StrEnum):
    FRONT = "front"
    REAR = "rear"

    @property
    def opposite(self) -> "BlockEdge":
        return BlockEdge.REAR if self is BlockEdge.FRONT else BlockEdge.FRONT


def tabu_key(op: int, target: BlockEdge) -> int:
    """Dense integer for ``(op, target)``."""
    return 2 * op + (target is BlockEdge.REAR)


class Move(NamedTuple):
    """Reinsert ``op`` at ``insert_pos`` of its machine, jumping over ``jumped``."""

    machine: int
    op: int
    target: BlockEdge
    from_pos: int
    insert_pos: int
    estimate: int = 0
    jumped: tuple[int, ...] = ()

    @property
    def key(self) -> int:
        return tabu_key(self.op, self.target)

    def inverse(self) -> "Move":
        return Move(
            machine=self.machine,
            op=self.op,
            target=self.target.opposite,
            from_pos=self.insert_pos,
            insert_pos=self.from_pos,
            jumped=self.jumped,
        )


@dataclass(slots=True)
class TabuState:
    tenure_base: int
    tenure_spread: int
    best_makespan: int
    tabu_until: dict[int, int] = field(default_factory=dict)
    history: dict[int, int] = field(default_factory=dict)
    iter: int = 0
    stagnation: int = 0

    def is_tabu(self, move: Move) -> bool:
        return self.tabu_until.get(move.key, -1) > self.iter

    def expiry(self, move: Move) -> int:
        return self.tabu_until.get(move.key, -1)

    def _forbid(self, key: int, tenure: int) -> None:
        self.tabu_until[key] = self.iter + tenure
        self.history[key] = self.history.get(key, 0) + 1

    def forbid_reversal(self, move: Move, rng: random.Random) -> None:
        """Forbid putting ``move.op`` back behind (or before) the ops it jumped."""
        tenure = self.tenure_base + rng.randint(0, self.tenure_spread)
        self._forbid(tabu_key(move.op, move.target.opposite), tenure)
        for other in move.jumped:
            self._forbid(tabu_key(other, move.target), tenure)

    def forbid(self, move: Move, rng: random.Random) -> None:
        self._forbid(move.key, self.tenure_base + rng.randint(0, self.tenure_spread))


def generate_moves(inst: Instance, sol: Solution, ev: ScheduleEval) -> list[Move]:
    """Block-boundary reinsertion moves of the current critical path, estimated."""
    position = ev.position
    moves: list[Move] = []
    seen: set[tuple[int, int, int]] = set()

    for block in critical_blocks(inst, ev, sol):
        ops = block.ops
        if len(ops) < 2:
            continue
        machine = block.machine
        perm = sol.perm[machine]
        front = position[ops[0]]
        rear = position[ops[-1]]

        for op in ops:
            from_pos = position[op]
            for target, insert_pos in ((BlockEdge.FRONT, front), (BlockEdge.REAR, rear)):
                if insert_pos == from_pos:
                    continue
                # an adjacent exchange is reachable from either of its two ops
                if abs(insert_pos - from_pos) == 1:
                    key = (machine, min(from_pos, insert_pos), max(from_pos, insert_pos))
                else:
                    key = (machine, from_pos, insert_pos)
                if key in seen:
                    continue
                seen.add(key)

                if target is BlockEdge.FRONT:
                    jumped = perm[insert_pos:from_pos]
                else:
                    jumped = perm[from_pos + 1 : insert_pos + 1]
                if not _precedence_safe(inst, ev, op, target, jumped):
                    continue
                estimate = _segment_estimate(inst, ev, perm, op, from_pos, insert_pos)
                moves.append(Move(machine, op, target, from_pos, insert_pos, estimate, jumped))
    return moves


def _precedence_safe(
    inst: Instance,
    ev: ScheduleEval,
    op: int,
    target: BlockEdge,
    jumped: tuple[int, ...],
) -> bool:
    """Conservative test that reinsertion cannot close a cycle through job arcs.

    Moving ``op`` in front of ``w`` closes a cycle only if some path leads from
    ``w``'s job successor to ``op``'s job predecessor; such a path forces
    ``head[jp] >= head[js] + dur[js]``. The rear case is the mirror image on
    tails.
    """
    dur = inst.op_duration
    job_pred = inst.job_pred
    job_succ = inst.job_succ
    head = ev.head
    tail = ev.tail

    if target is BlockEdge.FRONT:
        jp = job_pred[op]
        if jp is None:
            return True
        for other in jumped:
            js = job_succ[other]
            if js is None:
                continue
            if js == op or js == jp or head[jp] >= head[js] + dur[js]:
                return False
        return True

    js = job_succ[op]
    if js is None:
        return True
    for other in jumped:
        jp = job_pred[other]
        if jp is None:
            continue
        if jp == op or jp == js or tail[js] >= tail[jp] + dur[jp]:
            return False
    return True


def _segment_estimate(
    inst: Instance,
    ev: ScheduleEval,
    perm: tuple[int, ...],
    op: int,
    from_pos: int,
    insert_pos: int,
) -> int:
    lo = min(from_pos, insert_pos)
    hi = max(from_pos, insert_pos)
    segment = list(perm[lo : hi + 1])
    segment.remove(op)
    segment.insert(insert_pos - lo, op)

    dur = inst.op_duration
    job_pred = inst.job_pred
    job_succ = inst.job_succ
    head = ev.head
    tail = ev.tail

    heads: list[int] = []
    ready = head[perm[lo - 1]] + dur[perm[lo - 1]] if lo > 0 else 0
    for x in segment:
        jp = job_pred[x]
        r = head[jp] + dur[jp] if jp is not None else 0
        if ready > r:
            r = ready
        heads.append(r)
        ready = r + dur[x]

    estimate = 0
    pending = tail[perm[hi + 1]] + dur[perm[hi + 1]] if hi + 1 < len(perm) else 0
    for index in range(len(segment) - 1, -1, -1):
        x = segment[index]
        js = job_succ[x]
        q = tail[js] + dur[js] if js is not None else 0
        if pending > q:
            q = pending
        pending = q + dur[x]
        length = heads[index] + pending
        if length > estimate:
            estimate = length
    return estimate


def estimate_move(inst: Instance, ev: ScheduleEval, sol: Solution, move: Move) -> int:
    """Makespan bound of ``move`` recomputing heads/tails on the reordered segment only."""
    return _segment_estimate(inst, ev, sol.perm[move.machine], move.op, move.from_pos, move.insert_pos)


def apply_move(sol: Solution, move: Move) -> Solution:
    """Copy of ``sol`` with ``move.op`` reinserted; other machines are shared."""
    perm = list(sol.perm[move.machine])
    if not (0 <= move.from_pos < len(perm) and 0 <= move.insert_pos < len(perm)):
        raise ContractViolation(f"move positions out of range for machine {move.machine}")
    if perm[move.from_pos] != move.op:
        raise ContractViolation(
            f"operation {move.op} is not at position {move.from_pos} of machine {move.machine}"
        )
    perm.pop(move.from_pos)
    perm.insert(move.insert_pos, move.op)
    machines = list(sol.perm)
    machines[move.machine] = tuple(perm)
    return Solution(tuple(machines))


def tabu_search(
    inst: Instance,
    start: Solution,
    cutoff: int,
    deadline: Deadline,
    rng: random.Random,
    known_lb: int | None = None,
    *,
    config: TabuConfig | None = None,
    monitor: SearchMonitor | None = None,
) -> tuple[Solution, ScheduleEval]:
    """Improve ``start`` until ``cutoff`` iterations pass without a new best.

    Also stops at ``known_lb`` or when ``deadline`` expires. Returns the best
    solution visited. Only the chosen move is evaluated in full; the next
    candidate is tried only when it turns out cyclic.
    """
    if cutoff < 1:
        raise ContractViolation(f"tabu cutoff must be positive, got {cutoff}")
    evaluator = Evaluator(inst)
    current_eval = evaluator.evaluate(start)
    if not current_eval.feasible:
        raise ContractViolation("tabu search needs a feasible start; repair it first")

    config = config or TabuConfig()
    state = TabuState(
        tenure_base=config.base_for(inst.n_jobs, inst.n_machines),
        tenure_spread=config.tenure_spread,
        best_makespan=current_eval.makespan,
    )
    current = start
    best, best_eval = start, current_eval
    if monitor is not None:
        monitor.tabu_runs += 1
        monitor.observe(best_eval.makespan)

    tick = deadline.clock.tick
    while state.stagnation < cutoff:
        if known_lb is not None and state.best_makespan <= known_lb:
            break
        if deadline.expired():
            break
        state.iter += 1
        tick()
        current, current_eval = _step(evaluator, current, current_eval, state, rng, monitor)

        if current_eval.makespan < state.best_makespan:
            best, best_eval = current, current_eval
            state.best_makespan = current_eval.makespan
            state.stagnation = 0
        else:
            state.stagnation += 1
        if monitor is not None:
            monitor.ts_iterations += 1
            monitor.observe(current_eval.makespan)

    return best, best_eval


def _step(
    evaluator: Evaluator,
    current: Solution,
    ev: ScheduleEval,
    state: TabuState,
    rng: random.Random,
    monitor: SearchMonitor | None,
) -> tuple[Solution, ScheduleEval]:
    for move in _ranked(generate_moves(evaluator.inst, current, ev), state, rng):
        candidate = apply_move(current, move)
        candidate_eval = evaluator.evaluate(candidate)
        if candidate_eval.feasible:
            state.forbid_reversal(move, rng)
            return candidate, candidate_eval
        logger.debug("rejected cyclic move of op %d to block %s", move.op, move.target)
        state.forbid(move, rng)
        if monitor is not None:
            monitor.infeasible_moves += 1
    return _perturb(evaluator, current, ev, rng, monitor)


def _ranked(moves: list[Move], state: TabuState, rng: random.Random) -> list[Move]:
    """Admissible moves by estimate, then the tabu ones by earliest expiry."""
    tabu_until = state.tabu_until.get
    history = state.history.get
    now = state.iter
    best = state.best_makespan
    admissible = []
    blocked = []
    for move in moves:
        key = move.key
        tie = rng.random()
        hits = history(key, 0)
        expiry = tabu_until(key, -1)
        if expiry <= now or move.estimate < best:
            admissible.append(((move.estimate, hits, tie), move))
        else:
            blocked.append(((expiry, move.estimate, hits, tie), move))
    admissible.sort(key=lambda item: item[0])
    blocked.sort(key=lambda item: item[0])
    return [move for _, move in admissible] + [move for _, move in blocked]


def _perturb(
    evaluator: Evaluator,
    current: Solution,
    ev: ScheduleEval,
    rng: random.Random,
    monitor: SearchMonitor | None,
) -> tuple[Solution, ScheduleEval]:
    """Swap the last critical op with its machine predecessor or successor, then repair.

    Used when no move is usable; the neighbour need not be critical.
    """
    inst = evaluator.inst
    last = ev.critical_ops[-1]
    machine = inst.op_machine[last]
    perm = list(current.perm[machine])
    pos = ev.position[last]
    choices = [i for i in (pos - 1, pos) if i >= 0 and i + 1 < len(perm)]
    if not choices:
        return current, ev
    i = rng.choice(choices)
    perm[i], perm[i + 1] = perm[i + 1], perm[i]
    machines = list(current.perm)
    machines[machine] = tuple(perm)
    swapped = Solution(tuple(machines))
    fixed = repair(inst, swapped, evaluator)
    if fixed is not swapped and monitor is not None:
        monitor.repairs += 1
    return fixed, evaluator.evaluate(fixed)
