from itertools import product

import pytest

from macroforge.planner.domains.blocksworld import (
    BlocksworldConfig,
    gen_blocksworld,
    towers_state,
)
from macroforge.planner.domains.hanoi import HanoiConfig, gen_hanoi
from macroforge.planner.models.action import Action
from macroforge.planner.models.instance import PlanningInstance, VariableTable


def toy_instance(sizes, init, goal, actions=()) -> PlanningInstance:
    """Variables v0, v1, ... with integer-named values."""
    table = VariableTable(
        names=tuple(f"v{i}" for i in range(len(sizes))),
        domains=tuple(tuple(str(x) for x in range(size)) for size in sizes),
    )
    return PlanningInstance(
        name="toy",
        variables=table,
        init=tuple(init),
        goal=frozenset(goal.items()),
        actions=tuple(a.model_copy(update={"id": i}) for i, a in enumerate(actions)),
    )


def act(pre: dict[int, int], post: dict[int, int], name: str = "") -> Action:
    pre_set = frozenset(pre.items())
    return Action(name=name, pre=pre_set, post=frozenset(post.items()) - pre_set)


def all_states(instance: PlanningInstance):
    return list(product(*(range(size) for size in instance.variables.sizes)))


@pytest.fixture
def bw2() -> PlanningInstance:
    """b1 on b2, goal both on the table."""
    cfg = BlocksworldConfig.from_towers(init=[["b1", "b2"]], goal=[["b1"], ["b2"]])
    return gen_blocksworld(cfg)


@pytest.fixture
def bw2_states():
    s1 = towers_state(2, [[0, 1]])
    s2 = towers_state(2, [[1]], held=0)
    s3 = towers_state(2, [[0], [1]])
    return s1, s2, s3


@pytest.fixture
def bw3_stack() -> PlanningInstance:
    """b1 on b2 on b3, goal b3 on b2 on b1."""
    cfg = BlocksworldConfig.from_towers(init=[["b1", "b2", "b3"]], goal=[["b3", "b2", "b1"]])
    return gen_blocksworld(cfg)


@pytest.fixture
def hanoi2() -> PlanningInstance:
    return gen_hanoi(HanoiConfig(ndisks=2))


@pytest.fixture
def hanoi3() -> PlanningInstance:
    return gen_hanoi(HanoiConfig(ndisks=3))
