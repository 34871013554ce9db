from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

Conditions = tuple[frozenset[tuple[int, int]], frozenset[tuple[int, int]]]


class Action(BaseModel):
    """A precondition/postcondition pair over variable and value indices.

    Primitive actions have no derivation; macros point at the two registry
    entries they were combined from.
    """

    model_config = ConfigDict(frozen=True)

    id: Optional[int] = Field(
        default=None, description="Registry id, None until registered"
    )
    name: str = Field(default="", description="Display name")
    pre: frozenset[tuple[int, int]] = Field(default_factory=frozenset)
    post: frozenset[tuple[int, int]] = Field(default_factory=frozenset)
    derivation: Optional[tuple[int, int]] = Field(
        default=None, description="(left id, right id) for macros"
    )

    @property
    def conditions(self) -> Conditions:
        return self.pre, self.post

    @property
    def is_primitive(self) -> bool:
        return self.derivation is None

    def same_conditions(self, other: "Action") -> bool:
        return self.pre == other.pre and self.post == other.post


class Transition(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: tuple[int, ...]
    action: int = Field(description="Registry id of the action")
    target: tuple[int, ...]


class Plan(BaseModel):
    steps: list[int] = Field(
        default_factory=list, description="Action ids in execution order"
    )
