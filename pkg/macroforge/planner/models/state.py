from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.models.instance import (
    NO_FILTER,
    PlanningInstance,
    State,
    StateFilter,
)
from macroforge.planner.models.plan import IterationStats
from macroforge.planner.utils.settings import EngineSettings


class Step(BaseModel):
    """A reachable goal state or improvement and how to get there."""

    target: State
    actions: list[int] = Field(
        description="One macro label, or the primitive path for the baseline"
    )


class SolverState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    instance: PlanningInstance
    width: int = Field(ge=1, description="Hamming radius k")
    mode: Literal["macro", "baseline"] = Field(default="macro")
    state_filter: StateFilter = Field(default=NO_FILTER)
    settings: EngineSettings = Field(default_factory=EngineSettings)
    library: MacroLibrary = Field(
        default_factory=MacroLibrary,
        description="Shared across iterations so ids stay unique",
    )
    current: State = Field(default=(), description="State reached so far")
    top: list[int] = Field(default_factory=list, description="Top-level plan ids")
    trace: list[State] = Field(default_factory=list, description="Visited states")
    # Written by expand_neighbourhood, consumed by select_improvement
    candidates: list[Step] = Field(default_factory=list)
    pending: Optional[IterationStats] = Field(default=None)
    iterations: list[IterationStats] = Field(default_factory=list)
    status: Literal["running", "solved", "unknown", "resource_exceeded"] = Field(
        default="running"
    )
    error_message: str = Field(default="", description="Why the loop stopped early")
