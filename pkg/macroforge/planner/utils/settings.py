from pydantic import BaseModel, ConfigDict, Field

DEFAULT_BALL_CAP = 5_000_000
DEFAULT_MINIMALITY_BUDGET = 100_000


class EngineSettings(BaseModel):
    """Knobs shared by the macro engine, the solver loop and the oracles.

    Everything here is set from command-line flags; only the log level comes
    from the environment.
    """

    model_config = ConfigDict(frozen=True)

    ball_cap: int = Field(
        default=DEFAULT_BALL_CAP,
        gt=0,
        description="Largest Hamming ball (in states) the engine will build",
    )
    minimality_budget: int = Field(
        default=DEFAULT_MINIMALITY_BUDGET,
        gt=0,
        description="Combinations enumerated by the condition-minimality oracle",
    )
    strict_scan: bool = Field(
        default=False,
        description="Run the literal nested-loop rescans instead of the worklist",
    )
    certify: bool = Field(
        default=True,
        description="Finish the worklist with a full literal scan that must change nothing",
    )
