import logging

from macroforge.planner.core.state_space import is_goal_state, wrong
from macroforge.planner.models.state import SolverState

logger = logging.getLogger(__name__)


def check_goal(state: SolverState):
    if is_goal_state(state.current, state.instance):
        logger.info(f"Goal reached after {len(state.iterations)} iterations")
        return {"status": "solved"}
    logger.info(
        f"Iteration {len(state.iterations) + 1}: "
        f"{len(wrong(state.current, state.instance))} goal variables wrong"
    )
    return {}
