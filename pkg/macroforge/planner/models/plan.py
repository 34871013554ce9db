from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.models.instance import State


class MacroStats(BaseModel):
    """Counters of one compute_macros run."""

    iterations: int = Field(default=0, description="Worklist items or literal passes")
    states: int = Field(default=0, description="Vertices in the graph")
    edges: int = Field(default=0, description="Edges at the fixed point")
    label_changes: int = Field(default=0, description="Label installations, first ones included")
    wall_ms: float = Field(default=0.0, description="Wall time in milliseconds")


class IterationStats(MacroStats):
    """One outer solver iteration: the neighbourhood run plus the step taken."""

    source: State = Field(default=(), description="State the iteration started from")
    target: Optional[State] = Field(default=None, description="Chosen improvement")
    action: Optional[int] = Field(default=None, description="Id appended to the plan")
    wrong_before: int = Field(default=0)
    wrong_after: Optional[int] = Field(default=None)
    dominates_init: Optional[bool] = Field(
        default=None,
        description="Whether the chosen state dominates init; partial goals can break it",
    )


class SuccinctPlan(BaseModel):
    """Top-level action ids plus the definitions needed to expand them."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    library: MacroLibrary = Field(default_factory=MacroLibrary)
    top: list[int] = Field(default_factory=list, description="Top-level ids in order")
    trace: list[State] = Field(
        default_factory=list, description="States visited, init first"
    )

    def derivation_of(self, action_id: int) -> tuple[int, int] | None:
        return self.library.derivation_of(action_id)

    def name_of(self, action_id: int) -> str:
        return self.library.name_of(action_id)


class SolveOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: Literal["solved", "unknown", "resource_exceeded"]
    plan: Optional[SuccinctPlan] = None
    iterations: list[IterationStats] = Field(default_factory=list)
    detail: str = Field(default="", description="Why the run stopped, when not solved")

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    @property
    def exit_code(self) -> int:
        return {"solved": 0, "unknown": 2, "resource_exceeded": 3}[self.status]


class BenchRecord(BaseModel):
    """One row of the benchmark CSV."""

    instance: str
    mode: Literal["macro", "baseline"]
    width: int
    filter: str
    ball_size: int = Field(default=0, description="Largest ball seen in the run")
    edges: int = Field(default=0, description="Largest edge count seen in the run")
    label_changes: int = Field(default=0, description="Summed over iterations")
    outcome: Literal["solved", "unknown", "resource_exceeded"]
    expanded_length: Optional[int] = None
    wall_ms: float = 0.0
