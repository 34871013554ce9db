import logging
import time

from macroforge.planner.core.macro_engine import compute_macros
from macroforge.planner.core.state_space import (
    ball,
    is_goal_state,
    is_improvement,
    wrong,
)
from macroforge.planner.models.plan import IterationStats
from macroforge.planner.models.state import SolverState, Step
from macroforge.planner.solver.search import bfs_tree, path_to
from macroforge.planner.utils.errors import ResourceError

logger = logging.getLogger(__name__)


def expand_neighbourhood(state: SolverState):
    """Build the ball around the current state and list what it can reach.

    Macro mode runs the fixed point and reads the direct edges of the current
    state (the fixed point is transitively closed); baseline mode searches
    the ball with primitive actions only.
    """
    instance, current = state.instance, state.current
    started = time.perf_counter()
    try:
        states = ball(
            instance, current, state.width, state.state_filter, state.settings.ball_cap
        )
        if state.mode == "macro":
            result = compute_macros(
                states,
                instance.actions,
                library=state.library,
                settings=state.settings,
            )
    except ResourceError as e:
        logger.error(f"Neighbourhood of width {state.width} too large: {e}")
        return {"status": "resource_exceeded", "error_message": str(e)}

    def wanted(t) -> bool:
        return is_goal_state(t, instance) or is_improvement(current, t, instance)

    wrong_before = len(wrong(current, instance))
    candidates: list[Step] = []
    if state.mode == "macro":
        graph = result.graph
        u = graph.index.get(current)
        if u is not None:
            for v in sorted(graph.out[u]):
                if wanted(graph.states[v]):
                    candidates.append(
                        Step(target=graph.states[v], actions=[graph.out[u][v]])
                    )
        pending = IterationStats(
            **result.stats.model_dump(), source=current, wrong_before=wrong_before
        )
    else:
        tree = bfs_tree(instance, current, set(states))
        for t in states:
            if t != current and t in tree and wanted(t):
                candidates.append(Step(target=t, actions=path_to(tree, t)))
        pending = IterationStats(
            iterations=1,
            states=len(states),
            edges=len(tree) - 1,
            wall_ms=(time.perf_counter() - started) * 1000,
            source=current,
            wrong_before=wrong_before,
        )
    logger.info(f"{len(candidates)} improvements reachable from {len(states)} states")
    return {"candidates": candidates, "pending": pending}
