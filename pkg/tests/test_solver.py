import pytest
from conftest import act, toy_instance

from macroforge.planner.core.algebra import normalize
from macroforge.planner.core.state_space import ball, wrong
from macroforge.planner.domains.blocksworld import blocksworld_filter, random_blocksworld
from macroforge.planner.domains.hanoi import (
    HanoiConfig,
    gen_hanoi,
    hanoi_filter,
    oracle_subtow_pos,
)
from macroforge.planner.models.instance import NO_FILTER
from macroforge.planner.models.plan import IterationStats
from macroforge.planner.models.state import SolverState, Step
from macroforge.planner.nodes.select_improvement import select_improvement
from macroforge.planner.solver.expansion import expanded_length, plan_length
from macroforge.planner.solver.search import bfs_plan
from macroforge.planner.solver.solve import baseline_reach, solve_mph
from macroforge.planner.solver.validate import validate
from macroforge.planner.solver.width import verify_mph_width
from macroforge.planner.utils.errors import InputError, InvariantViolation
from macroforge.planner.utils.settings import EngineSettings


def hanoi(k):
    return gen_hanoi(HanoiConfig(ndisks=k))


def goal_test(instance):
    return lambda s: all(s[v] == x for v, x in instance.goal)


def test_solved_instance_needs_no_steps():
    instance = toy_instance([2], [1], {0: 1}, [act({0: 1}, {0: 0})])
    for run in (solve_mph, baseline_reach):
        outcome = run(instance, 1)
        assert outcome.solved and outcome.exit_code == 0
        assert outcome.plan.top == []
        assert outcome.plan.trace == [instance.init]
        assert validate(instance, outcome.plan, strict=True)


def test_width_must_be_positive(hanoi2):
    with pytest.raises(InputError):
        solve_mph(hanoi2, 0)


def test_two_disks_in_one_macro(hanoi2):
    outcome = solve_mph(hanoi2, 7, hanoi_filter(2))
    assert outcome.solved
    assert len(outcome.plan.top) == 1
    macro = outcome.plan.library[outcome.plan.top[0]]
    assert macro.conditions == normalize(oracle_subtow_pos(2, 2, "p1", "p3")).conditions
    assert plan_length(outcome.plan.top, outcome.plan) == 3
    assert validate(hanoi2, outcome.plan, strict=True)
    [stats] = outcome.iterations
    assert stats.wrong_before == 3 and stats.wrong_after == 0
    assert stats.dominates_init
    assert stats.states == 9


def test_three_disks_in_one_macro(hanoi3):
    outcome = solve_mph(hanoi3, 7, hanoi_filter(3))
    assert outcome.solved
    assert len(outcome.plan.top) == 1
    assert plan_length(outcome.plan.top, outcome.plan) == 7
    assert len(bfs_plan(hanoi3, hanoi3.init, goal_test(hanoi3))) == 7
    assert validate(hanoi3, outcome.plan, strict=True)


@pytest.mark.slow
def test_three_disks_without_filter(hanoi3):
    outcome = solve_mph(hanoi3, 7, NO_FILTER)
    assert outcome.solved and len(outcome.plan.top) == 1
    macro = outcome.plan.library[outcome.plan.top[0]]
    assert macro.conditions == normalize(oracle_subtow_pos(3, 3, "p1", "p3")).conditions


@pytest.mark.parametrize(
    "k", [1, 2, 3, *(pytest.param(k, marks=pytest.mark.slow) for k in range(4, 11))]
)
def test_hanoi_width_seven(k):
    instance = hanoi(k)
    outcome = solve_mph(instance, 7, hanoi_filter(k))
    assert outcome.solved
    assert len(outcome.plan.top) == 1
    macro = outcome.plan.library[outcome.plan.top[0]]
    assert macro.conditions == normalize(oracle_subtow_pos(k, k, "p1", "p3")).conditions
    assert expanded_length(outcome.plan.top[0], outcome.plan) == 2**k - 1
    assert validate(instance, outcome.plan, strict=True)


def test_baseline_solves_when_the_ball_holds_everything(hanoi2):
    outcome = baseline_reach(hanoi2, 7, hanoi_filter(2))
    assert outcome.solved
    assert plan_length(outcome.plan.top, outcome.plan) == 3
    assert validate(hanoi2, outcome.plan, strict=True)


def test_baseline_gets_stuck_on_four_disks():
    instance = hanoi(4)
    outcome = baseline_reach(instance, 7, hanoi_filter(4))
    assert outcome.status == "unknown"
    assert outcome.exit_code == 2
    assert outcome.plan is None
    states = ball(instance, instance.init, 7, hanoi_filter(4))
    assert bfs_plan(instance, instance.init, goal_test(instance), set(states)) is None


def test_ball_cap_is_reported(hanoi2):
    outcome = solve_mph(hanoi2, 7, hanoi_filter(2), EngineSettings(ball_cap=2))
    assert outcome.status == "resource_exceeded"
    assert outcome.exit_code == 3
    assert "ball_cap=2" in outcome.detail


@pytest.mark.parametrize("seed", range(5))
def test_three_block_instances(seed):
    instance = random_blocksworld(3, seed)
    outcome = solve_mph(instance, 10, blocksworld_filter(3))
    assert outcome.solved
    assert validate(instance, outcome.plan, strict=True)


BLOCKSWORLD_CASES = [(3, seed) for seed in range(16)] + [
    (n, seed) for n in (4, 5) for seed in range(17)
]


@pytest.mark.slow
@pytest.mark.parametrize("nblocks, seed", BLOCKSWORLD_CASES)
def test_blocksworld_width_ten(nblocks, seed):
    instance = random_blocksworld(nblocks, seed)
    outcome = solve_mph(instance, 10, blocksworld_filter(nblocks))
    assert outcome.solved
    assert validate(instance, outcome.plan, strict=True)
    for stats in outcome.iterations:
        assert stats.dominates_init
        assert stats.wrong_after < stats.wrong_before
    if nblocks == 3:
        assert verify_mph_width(instance, 10, blocksworld_filter(3)).holds


def test_width_holds_on_two_disks(hanoi2):
    report = verify_mph_width(hanoi2, 7, hanoi_filter(2))
    assert report.holds
    assert report.checked >= 1


def test_width_fails_when_too_narrow(hanoi2):
    report = verify_mph_width(hanoi2, 1, hanoi_filter(2))
    assert not report.holds
    assert hanoi2.init in report.failures


def selection_state(init, current, target):
    instance = toy_instance([2, 2], init, {0: 1, 1: 1})
    return SolverState(
        instance=instance,
        width=1,
        current=current,
        candidates=[Step(target=target, actions=[0])],
        pending=IterationStats(source=current, wrong_before=len(wrong(current, instance))),
    )


def test_selected_step_dominates_init():
    update = select_improvement(selection_state((0, 0), (0, 0), (1, 0)))
    assert update["current"] == (1, 0)
    assert update["iterations"][-1].dominates_init


def test_step_away_from_init_is_rejected():
    # (0, 1) improves on (0, 0) but has lost v0, which init had right
    with pytest.raises(InvariantViolation, match="dominate"):
        select_improvement(selection_state((1, 0), (0, 0), (0, 1)))


def test_step_that_does_not_improve_is_rejected():
    with pytest.raises(InvariantViolation, match="improvement"):
        select_improvement(selection_state((0, 0), (1, 0), (0, 1)))
