from collections.abc import Callable, Iterable
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from macroforge.planner.models.action import Action

# A total state: one value index per variable, in canonical variable order.
State = tuple[int, ...]
# A partial state: set of (variable index, value index) pairs.
PartialState = frozenset[tuple[int, int]]


class VariableTable(BaseModel):
    """Variables and their finite domains, both in declaration order."""

    model_config = ConfigDict(frozen=True)

    names: tuple[str, ...] = Field(description="Variable identifiers in canonical order")
    domains: tuple[tuple[str, ...], ...] = Field(
        description="Domain values per variable, in canonical order"
    )
    _positions: dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        if len(self.names) != len(self.domains):
            raise ValueError("every variable needs exactly one domain")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable identifiers must be unique")
        for name, domain in zip(self.names, self.domains):
            if not domain:
                raise ValueError(f"variable {name!r} has an empty domain")
            if len(set(domain)) != len(domain):
                raise ValueError(f"variable {name!r} repeats a domain value")
        return self

    def model_post_init(self, __context):
        self._positions = {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.domains)

    def index(self, name: str) -> int:
        return self._positions[name]

    def value_index(self, var: int, value: str) -> int:
        try:
            return self.domains[var].index(value)
        except ValueError:
            raise KeyError(value) from None


class PlanningInstance(BaseModel):
    """The tuple (V, init, goal, A) with actions already normalized."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="instance", description="Instance identifier")
    domain: Optional[Literal["blocksworld", "hanoi"]] = Field(
        default=None,
        description="Generator family, used to pick the consistency filter",
    )
    variables: VariableTable
    init: State
    goal: PartialState
    actions: tuple[Action, ...] = Field(
        default=(), description="Primitive actions; action.id is the position"
    )

    @model_validator(mode="after")
    def _check(self):
        sizes = self.variables.sizes
        if len(self.init) != len(sizes):
            raise ValueError("init must assign every variable")
        for var, value in enumerate(self.init):
            if not 0 <= value < sizes[var]:
                raise ValueError(f"init value out of domain for {self.variables.names[var]}")
        _check_partial(self.goal, sizes, "goal")
        for position, action in enumerate(self.actions):
            if action.id != position:
                raise ValueError(f"action {action.name!r} must carry id {position}")
            if action.derivation is not None:
                raise ValueError(f"primitive action {action.name!r} has a derivation")
            _check_partial(action.pre, sizes, f"pre of {action.name}")
            _check_partial(action.post, sizes, f"post of {action.name}")
        return self

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def goal_map(self) -> dict[int, int]:
        return dict(self.goal)

    def action_by_name(self, name: str) -> Action:
        for action in self.actions:
            if action.name == name:
                return action
        raise KeyError(name)


def _check_partial(partial: PartialState, sizes: tuple[int, ...], what: str):
    seen = set()
    for var, value in partial:
        if not 0 <= var < len(sizes):
            raise ValueError(f"{what}: unknown variable index {var}")
        if not 0 <= value < sizes[var]:
            raise ValueError(f"{what}: value out of domain for variable {var}")
        if var in seen:
            raise ValueError(f"{what}: variable {var} assigned twice")
        seen.add(var)


class StateFilter(BaseModel):
    """Admissibility test applied to the states of a Hamming ball.

    `universe`, when given, enumerates every admissible state of the instance
    so balls can be cut out of it instead of enumerating all value
    combinations and discarding most of them.
    """

    model_config = ConfigDict(frozen=True)

    mode: Literal["none", "predicate"] = "none"
    name: str = "none"
    predicate: Optional[Callable[[State], bool]] = None
    universe: Optional[Callable[[], Iterable[State]]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.mode == "predicate" and self.predicate is None:
            raise ValueError("predicate mode needs a predicate")
        return self

    def accepts(self, state: State) -> bool:
        if self.mode == "none":
            return True
        return self.predicate(state)


NO_FILTER = StateFilter()
