import logging
from typing import Literal

from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.graph import graph, recursion_limit
from macroforge.planner.models.instance import NO_FILTER, PlanningInstance, StateFilter
from macroforge.planner.models.plan import SolveOutcome, SuccinctPlan
from macroforge.planner.models.state import SolverState
from macroforge.planner.utils.errors import InputError
from macroforge.planner.utils.settings import EngineSettings

logger = logging.getLogger(__name__)


def solve_mph(
    instance: PlanningInstance,
    width: int,
    state_filter: StateFilter = NO_FILTER,
    settings: EngineSettings = EngineSettings(),
) -> SolveOutcome:
    """Repeatedly jump to an improvement reachable by a macro inside the ball."""
    return _solve(instance, width, state_filter, settings, "macro")


def baseline_reach(
    instance: PlanningInstance,
    width: int,
    state_filter: StateFilter = NO_FILTER,
    settings: EngineSettings = EngineSettings(),
) -> SolveOutcome:
    """Same loop, but only primitive paths that stay inside the ball count."""
    return _solve(instance, width, state_filter, settings, "baseline")


def _solve(
    instance: PlanningInstance,
    width: int,
    state_filter: StateFilter,
    settings: EngineSettings,
    mode: Literal["macro", "baseline"],
) -> SolveOutcome:
    if width < 1:
        raise InputError("width must be at least 1", "$.width")
    initial = SolverState(
        instance=instance,
        width=width,
        mode=mode,
        state_filter=state_filter,
        settings=settings,
        library=MacroLibrary.from_primitives(instance.actions),
        current=instance.init,
        trace=[instance.init],
    )
    logger.info(
        f"Solving {instance.name} ({mode}, width {width}, filter {state_filter.name})"
    )
    result = graph.invoke(initial, {"recursion_limit": recursion_limit(initial)})
    final = SolverState(**result) if isinstance(result, dict) else result

    if final.status != "solved":
        logger.info(f"{instance.name}: {final.status} ({final.error_message})")
        return SolveOutcome(
            status=final.status,
            iterations=final.iterations,
            detail=final.error_message,
        )
    plan = SuccinctPlan(
        library=final.library.restricted_to(final.top),
        top=final.top,
        trace=final.trace,
    )
    logger.info(f"{instance.name}: solved with {len(plan.top)} top-level actions")
    return SolveOutcome(status="solved", plan=plan, iterations=final.iterations)
