import random

import pytest

from app.core.errors import ContractViolation
from app.modules.scheduling.graph import critical_blocks, evaluate, repair
from app.modules.scheduling.model import Solution, build_instance, random_solution
from app.modules.scheduling.monitor import Deadline, SearchMonitor, WorkClock
from app.modules.scheduling.params import TabuConfig
from app.modules.scheduling.tabu import (
    BlockEdge,
    Move,
    TabuState,
    apply_move,
    estimate_move,
    generate_moves,
    tabu_search,
)
from tests.oracles import bellman_makespan, random_instance


def _start(inst, seed):
    return repair(inst, random_solution(inst, random.Random(seed)))


def test_moves_stay_inside_critical_blocks(la01):
    for seed in range(20):
        sol = _start(la01, seed)
        ev = evaluate(la01, sol)
        block_ops = {
            op: block for block in critical_blocks(la01, ev, sol) if len(block.ops) > 1 for op in block.ops
        }
        for move in generate_moves(la01, sol, ev):
            block = block_ops[move.op]
            assert move.machine == block.machine
            if move.target is BlockEdge.FRONT:
                assert move.insert_pos == ev.position[block.ops[0]]
                assert move.op != block.ops[0]
            else:
                assert move.insert_pos == ev.position[block.ops[-1]]
                assert move.op != block.ops[-1]


def test_generated_moves_keep_the_schedule_acyclic(la01):
    for seed in range(20):
        sol = _start(la01, seed)
        ev = evaluate(la01, sol)
        for move in generate_moves(la01, sol, ev):
            assert bellman_makespan(la01, apply_move(sol, move)) is not None


def test_estimate_on_a_single_machine_is_the_total_load():
    inst = build_instance(3, 1, [[(0, 4)], [(0, 2)], [(0, 7)]])
    sol = Solution.from_lists([[0, 1, 2]])
    ev = evaluate(inst, sol)
    move = Move(machine=0, op=2, target=BlockEdge.FRONT, from_pos=2, insert_pos=0, jumped=(0, 1))
    assert estimate_move(inst, ev, sol, move) == 13
    assert evaluate(inst, apply_move(sol, move)).makespan == 13


def test_estimate_of_a_shortening_swap(toy):
    sol = Solution.from_lists([[3, 0], [2, 1]])
    ev = evaluate(toy, sol)
    move = Move(machine=0, op=0, target=BlockEdge.FRONT, from_pos=1, insert_pos=0, jumped=(3,))
    assert estimate_move(toy, ev, sol, move) == evaluate(toy, apply_move(sol, move)).makespan == 8


def test_two_op_block_gives_one_swap():
    inst = build_instance(2, 1, [[(0, 3)], [(0, 4)]])
    sol = Solution.from_lists([[0, 1]])
    moves = generate_moves(inst, sol, evaluate(inst, sol))
    assert [(move.op, move.target) for move in moves] == [(0, BlockEdge.REAR)]
    assert apply_move(sol, moves[0]).perm == ((1, 0),)


def test_three_op_block_gives_four_moves():
    inst = build_instance(3, 1, [[(0, 2)], [(0, 3)], [(0, 4)]])
    sol = Solution.from_lists([[0, 1, 2]])
    moves = generate_moves(inst, sol, evaluate(inst, sol))
    assert len(moves) == 4
    assert {(move.op, move.target) for move in moves} == {
        (1, BlockEdge.FRONT),
        (1, BlockEdge.REAR),
        (0, BlockEdge.REAR),
        (2, BlockEdge.FRONT),
    }
    assert {move.estimate for move in moves} == {9}


def test_estimate_is_exact_when_the_segment_surroundings_keep_their_times():
    rng = random.Random(404)
    checked = 0
    for _ in range(300):
        inst = random_instance(rng, 3, 3)
        sol = _start(inst, rng.randrange(10**6))
        ev = evaluate(inst, sol)
        dur = inst.op_duration
        for move in generate_moves(inst, sol, ev):
            nxt = apply_move(sol, move)
            nev = evaluate(inst, nxt)
            perm = nxt.perm[move.machine]
            lo, hi = sorted((move.from_pos, move.insert_pos))
            segment = perm[lo : hi + 1]
            before = [perm[lo - 1]] if lo > 0 else []
            after = [perm[hi + 1]] if hi + 1 < len(perm) else []
            heads_kept = all(
                nev.head[op] == ev.head[op]
                for op in before + [inst.job_pred[x] for x in segment if inst.job_pred[x] is not None]
            )
            tails_kept = all(
                nev.tail[op] == ev.tail[op]
                for op in after + [inst.job_succ[x] for x in segment if inst.job_succ[x] is not None]
            )
            if not (heads_kept and tails_kept):
                continue
            longest = max(nev.head[x] + dur[x] + nev.tail[x] for x in segment)
            assert move.estimate == estimate_move(inst, ev, sol, move) == longest
            assert move.estimate <= nev.makespan
            checked += 1
    assert checked > 0


def test_apply_move_reinserts():
    sol = Solution.from_lists([[0, 1, 2, 3]])
    move = Move(machine=0, op=3, target=BlockEdge.FRONT, from_pos=3, insert_pos=1)
    assert apply_move(sol, move).perm == ((0, 3, 1, 2),)
    back = Move(machine=0, op=0, target=BlockEdge.REAR, from_pos=0, insert_pos=2)
    assert apply_move(sol, back).perm == ((1, 2, 0, 3),)
    assert apply_move(apply_move(sol, move), move.inverse()) == sol
    assert apply_move(apply_move(sol, back), back.inverse()) == sol


def test_apply_move_rejects_wrong_position():
    sol = Solution.from_lists([[0, 1, 2]])
    with pytest.raises(ContractViolation):
        apply_move(sol, Move(machine=0, op=2, target=BlockEdge.FRONT, from_pos=1, insert_pos=0))
    with pytest.raises(ContractViolation):
        apply_move(sol, Move(machine=0, op=2, target=BlockEdge.FRONT, from_pos=2, insert_pos=5))


def test_reversal_is_tabu_for_the_moved_and_jumped_ops():
    state = TabuState(tenure_base=5, tenure_spread=0, best_makespan=100)
    move = Move(machine=0, op=4, target=BlockEdge.FRONT, from_pos=3, insert_pos=1, jumped=(2, 3))
    state.forbid_reversal(move, random.Random(0))

    assert state.is_tabu(Move(0, 4, BlockEdge.REAR, 1, 3))
    assert state.is_tabu(Move(0, 2, BlockEdge.FRONT, 2, 1))
    assert not state.is_tabu(Move(0, 4, BlockEdge.FRONT, 1, 0))
    state.iter = 5
    assert not state.is_tabu(Move(0, 4, BlockEdge.REAR, 1, 3))


def test_tenure_default_grows_with_size():
    assert TabuConfig().base_for(10, 5) == 18
    assert TabuConfig(tenure_base=3).base_for(10, 5) == 3


def test_tabu_search_never_worsens_the_start(la01):
    deadline = Deadline(WorkClock(1000.0))
    for seed in range(100):
        start = _start(la01, seed)
        best, ev = tabu_search(la01, start, 200, deadline, random.Random(seed))
        assert ev.feasible
        assert ev.makespan <= evaluate(la01, start).makespan
        assert ev.makespan == bellman_makespan(la01, best)


def test_tabu_search_stops_at_the_lower_bound(la01):
    clock = WorkClock(1000.0)
    monitor = SearchMonitor(clock)
    _, ev = tabu_search(
        la01, _start(la01, 1), 10_000, Deadline(clock), random.Random(1), known_lb=10**6, monitor=monitor
    )
    assert monitor.ts_iterations == 0
    assert ev.makespan <= 10**6


def test_tabu_search_honours_the_deadline(la01):
    clock = WorkClock(100.0)
    deadline = Deadline(clock, 0.5)
    tabu_search(la01, _start(la01, 2), 10**9, deadline, random.Random(2))
    assert clock.now() == pytest.approx(0.5)


def test_tabu_search_is_seeded(ft06):
    deadline = Deadline(WorkClock(1000.0))
    a = tabu_search(ft06, _start(ft06, 4), 300, deadline, random.Random(9))
    b = tabu_search(ft06, _start(ft06, 4), 300, deadline, random.Random(9))
    assert a[0] == b[0]


def test_tabu_search_rejects_infeasible_start(toy):
    with pytest.raises(ContractViolation):
        tabu_search(toy, Solution.from_lists([[3, 0], [1, 2]]), 10, Deadline(WorkClock(1.0)), random.Random(0))
    with pytest.raises(ContractViolation):
        tabu_search(toy, Solution.from_lists([[0, 3], [2, 1]]), 0, Deadline(WorkClock(1.0)), random.Random(0))


@pytest.mark.slow
def test_tabu_search_reaches_ft06_optimum_from_some_start(ft06):
    deadline = Deadline(WorkClock(1000.0))
    best = min(
        tabu_search(ft06, _start(ft06, seed), 2000, deadline, random.Random(seed), known_lb=55)[1].makespan
        for seed in range(10)
    )
    assert best == 55
