import logging

from pydantic import BaseModel, Field

from macroforge.planner.core.macro_engine import compute_macros
from macroforge.planner.core.state_space import (
    ball,
    dominates,
    is_goal_state,
    is_improvement,
)
from macroforge.planner.models.instance import NO_FILTER, PlanningInstance, State, StateFilter
from macroforge.planner.solver.search import bfs_tree
from macroforge.planner.utils.settings import EngineSettings

logger = logging.getLogger(__name__)


class WidthReport(BaseModel):
    checked: int = Field(default=0, description="States whose ball was saturated")
    failures: list[State] = Field(default_factory=list, description="States with no step")
    complete: bool = Field(default=True, description="False when `limit` cut the sweep")

    @property
    def holds(self) -> bool:
        return self.complete and not self.failures


def verify_mph_width(
    instance: PlanningInstance,
    width: int,
    state_filter: StateFilter = NO_FILTER,
    limit: int = 1000,
    settings: EngineSettings = EngineSettings(),
) -> WidthReport:
    """Check the width promise state by state on a small instance.

    Every reachable non-goal state that dominates init must have a goal state
    or an improvement among its direct successors in the fixed point over its
    own ball.
    """
    report = WidthReport()
    for s in bfs_tree(instance, instance.init):
        if is_goal_state(s, instance) or not dominates(s, instance.init, instance):
            continue
        if report.checked >= limit:
            report.complete = False
            break
        report.checked += 1
        states = ball(instance, s, width, state_filter, settings.ball_cap)
        graph = compute_macros(states, instance.actions, settings=settings).graph
        u = graph.index.get(s)
        targets = graph.out[u] if u is not None else {}
        if not any(
            is_goal_state(graph.states[v], instance)
            or is_improvement(s, graph.states[v], instance)
            for v in targets
        ):
            report.failures.append(s)
    logger.info(
        f"Width {width}: {report.checked} states checked, {len(report.failures)} failures"
    )
    return report
