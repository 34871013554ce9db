import logging

from macroforge.planner.core.state_space import (
    dominates,
    is_goal_state,
    is_improvement,
    wrong,
)
from macroforge.planner.models.state import SolverState
from macroforge.planner.utils.errors import InvariantViolation

logger = logging.getLogger(__name__)


def select_improvement(state: SolverState):
    """Take one step: goal states first, then fewest wrong goal variables,
    then ball order. Candidates already arrive in ball order."""
    instance, current = state.instance, state.current
    if not state.candidates:
        logger.info("No improvement reachable; giving up")
        return {
            "status": "unknown",
            "error_message": f"no improvement reachable within width {state.width}",
            "iterations": [*state.iterations, state.pending],
            "pending": None,
        }

    step = min(
        state.candidates,
        key=lambda c: (
            not is_goal_state(c.target, instance),
            len(wrong(c.target, instance)),
        ),
    )
    target = step.target
    wrong_after = wrong(target, instance)
    if not is_improvement(current, target, instance) or not (
        wrong_after < wrong(current, instance)
    ):
        raise InvariantViolation("chosen step is not an improvement of the current state")
    # with a partial goal only the wrong-variable half of domination carries over
    dominates_init = dominates(target, instance.init, instance)
    total_goal = len(instance.goal) == instance.n_vars
    if not wrong_after <= wrong(instance.init, instance) or (total_goal and not dominates_init):
        raise InvariantViolation("chosen step does not dominate the initial state")

    # the label is captured before the state advances
    stats = state.pending.model_copy(
        update={
            "target": target,
            "action": step.actions[-1] if step.actions else None,
            "wrong_after": len(wrong_after),
            "dominates_init": dominates_init,
        }
    )
    logger.info(
        f"Step with {len(step.actions)} action(s): "
        f"{stats.wrong_before} -> {stats.wrong_after} goal variables wrong"
    )
    return {
        "current": target,
        "top": [*state.top, *step.actions],
        "trace": [*state.trace, target],
        "iterations": [*state.iterations, stats],
        "candidates": [],
        "pending": None,
    }
