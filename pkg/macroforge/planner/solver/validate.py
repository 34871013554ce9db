import logging
from collections.abc import Sequence
from typing import Protocol

from macroforge.planner.core.algebra import apply_action
from macroforge.planner.core.state_space import is_goal_state
from macroforge.planner.models.instance import PlanningInstance, State
from macroforge.planner.solver.expansion import DerivationSource, expand
from macroforge.planner.utils.errors import InputError

logger = logging.getLogger(__name__)


class ExpandablePlan(DerivationSource, Protocol):
    top: Sequence[int]


def validate(instance: PlanningInstance, plan: ExpandablePlan, strict: bool = False) -> bool:
    """Replay the expanded plan from init with the instance's own actions.

    Primitives are matched by name, so the check does not trust the plan's
    copy of their conditions. A name the instance does not know, or a
    derivation that cannot be expanded, fails the plan. In strict mode an
    inapplicable step fails the plan too; otherwise it is skipped, as
    applying an inapplicable action leaves the state unchanged.
    """
    try:
        s = _replay(instance, plan, strict)
    except InputError as e:
        logger.info(f"Plan does not expand against the instance: {e}")
        return False
    if s is None:
        return False
    reached = is_goal_state(s, instance)
    if not reached:
        logger.info("Plan ends outside the goal")
    return reached


def _replay(instance: PlanningInstance, plan: ExpandablePlan, strict: bool) -> State | None:
    by_name = {action.name: action for action in instance.actions}
    s = instance.init
    for position, action_id in enumerate(expand(plan.top, plan)):
        name = plan.name_of(action_id)
        action = by_name.get(name)
        if action is None:
            raise InputError(f"{name!r} is not an action of the instance", f"$.top[{position}]")
        if not all(s[v] == x for v, x in action.pre):
            if strict:
                logger.info(f"Step {position} ({name}) is not applicable")
                return None
            continue
        s = apply_action(s, action)
    return s
