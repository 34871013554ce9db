import pytest
from conftest import all_states, toy_instance
from hypothesis import given, settings
from hypothesis import strategies as st

from macroforge.planner.core.state_space import (
    ball,
    ball_size,
    canonical_key,
    dominates,
    hamming,
    is_goal_state,
    is_improvement,
    partial_to_mapping,
    restrict,
    state_from_mapping,
    state_to_mapping,
    wrong,
)
from macroforge.planner.domains.hanoi import HanoiConfig, gen_hanoi
from macroforge.planner.models.instance import StateFilter
from macroforge.planner.utils.errors import BallSizeExceeded, InputError


def goal_state(instance):
    return tuple(x for _, x in sorted(instance.goal))


def test_restrict(bw2, bw2_states):
    s1 = bw2_states[0]
    assert restrict(s1, []) == frozenset()
    assert restrict(s1, range(len(s1))) == frozenset(enumerate(s1))
    # arm and clear-b1
    assert restrict(s1, {0, 3}) == {(0, s1[0]), (3, s1[3])}
    with pytest.raises(InputError):
        restrict(s1, {99})


def test_goal_states(hanoi2):
    assert not is_goal_state(hanoi2.init, hanoi2)
    assert is_goal_state(goal_state(hanoi2), hanoi2)
    vacuous = toy_instance([2, 2], [0, 1], {})
    assert all(is_goal_state(s, vacuous) for s in all_states(vacuous))


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_hanoi_init_and_goal_differ_in_three_variables(k):
    instance = gen_hanoi(HanoiConfig(ndisks=k))
    assert hamming(instance.init, instance.init) == 0
    assert hamming(instance.init, goal_state(instance)) == 3
    # on-dk, clear-p1, clear-p3
    assert wrong(instance.init, instance) == {k - 1, 2 * k, 2 * k + 2}


def test_hamming_blocksworld(bw2_states):
    s1, s2, _ = bw2_states
    assert hamming(s1, s2) == 4
    with pytest.raises(InputError):
        hamming(s1, s1[:-1])


def test_ball_radius_zero_and_one(bw2, bw2_states):
    s1 = bw2_states[0]
    assert ball(bw2, s1, 0) == (s1,)
    states = ball(bw2, s1, 1)
    assert len(states) == 11
    assert states[0] == s1
    assert all(hamming(s1, t) <= 1 for t in states)


def test_ball_covers_whole_space(hanoi2):
    states = ball(hanoi2, hanoi2.init, 7)
    assert len(states) == 800 == len(set(states))


def test_ball_is_canonically_ordered(bw2, bw2_states):
    s1 = bw2_states[0]
    states = ball(bw2, s1, 2)
    keys = [canonical_key(s1, t) for t in states]
    assert keys == sorted(keys)


def test_ball_filter_and_universe_agree(hanoi2):
    from macroforge.planner.domains.hanoi import hanoi_consistent, hanoi_filter

    predicate_only = StateFilter(mode="predicate", name="p", predicate=hanoi_consistent)
    assert ball(hanoi2, hanoi2.init, 5, predicate_only) == ball(
        hanoi2, hanoi2.init, 5, hanoi_filter(2)
    )


def test_ball_cap(bw2, bw2_states):
    with pytest.raises(BallSizeExceeded) as info:
        ball(bw2, bw2_states[0], 1, cap=5)
    assert info.value.cap == 5
    assert "ball_cap=5" in str(info.value)


@settings(max_examples=60, deadline=None)
@given(
    sizes=st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4),
    k=st.integers(min_value=0, max_value=4),
    data=st.data(),
)
def test_ball_size_matches_enumeration(sizes, k, data):
    init = [data.draw(st.integers(min_value=0, max_value=size - 1)) for size in sizes]
    instance = toy_instance(sizes, init, {})
    states = ball(instance, instance.init, k)
    assert len(states) == ball_size(tuple(sizes), k)
    assert len(set(states)) == len(states)


def test_improvement():
    instance = toy_instance([2, 2], [0, 1], {0: 1, 1: 1})
    s = instance.init
    assert wrong(s, instance) == {0}
    assert not is_improvement(s, s, instance)
    assert is_improvement(s, (1, 1), instance)
    # fixes v0 but breaks v1
    assert not is_improvement(s, (1, 0), instance)


def test_dominates():
    instance = toy_instance([2, 2, 2], [0, 0, 0], {0: 1, 1: 1})
    init = instance.init
    assert dominates(init, init, instance)
    assert dominates((1, 0, 0), init, instance)
    assert not dominates(init, (1, 0, 0), instance)
    # differs on a variable outside the goal
    assert not dominates((0, 0, 1), init, instance)


def test_wrong_of_goal_and_vacuous_goal(hanoi2):
    assert wrong(goal_state(hanoi2), hanoi2) == frozenset()
    vacuous = toy_instance([3], [2], {})
    assert wrong((1,), vacuous) == frozenset()


def test_mapping_round_trip(hanoi2):
    table = hanoi2.variables
    mapping = state_to_mapping(table, hanoi2.init)
    assert mapping["on-d2"] == "p1"
    assert state_from_mapping(table, mapping) == hanoi2.init
    assert partial_to_mapping(table, hanoi2.goal)["on-d2"] == "p3"


def test_mapping_errors(hanoi2):
    table = hanoi2.variables
    mapping = state_to_mapping(table, hanoi2.init)
    with pytest.raises(InputError, match="on-d1"):
        state_from_mapping(table, {k: v for k, v in mapping.items() if k != "on-d1"})
    with pytest.raises(InputError, match="p9"):
        state_from_mapping(table, {**mapping, "on-d1": "p9"})
    with pytest.raises(InputError, match="on-d7"):
        state_from_mapping(table, {**mapping, "on-d7": "p1"})


@st.composite
def small_instances(draw):
    """A toy instance over at most three variables, with a possibly partial goal."""
    sizes = draw(st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=3))
    goal_vars = draw(st.sets(st.integers(min_value=0, max_value=len(sizes) - 1)))
    goal = {v: draw(st.integers(min_value=0, max_value=sizes[v] - 1)) for v in goal_vars}
    return toy_instance(sizes, [0] * len(sizes), goal)


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_domination_is_reflexive_and_transitive(instance):
    states = all_states(instance)
    below = {s: {t for t in states if dominates(s, t, instance)} for s in states}
    for s in states:
        assert s in below[s]
        for t in below[s]:
            assert below[t] <= below[s]


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_improvements_compose(instance):
    states = all_states(instance)
    better = {s: {t for t in states if is_improvement(s, t, instance)} for s in states}
    for s in states:
        assert s not in better[s]
        for t in better[s]:
            assert better[t] <= better[s]
            assert wrong(t, instance) < wrong(s, instance)
