"""JSON documents exchanged on the command line.

Everything here is name based; index-based models are built from these by
macroforge.planner.utils.serialization.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, PrivateAttr, model_validator

INSTANCE_FORMAT = "macroforge-instance/1"
PLAN_FORMAT = "macroforge-plan/1"
MACROS_FORMAT = "macroforge-macros/1"


class VariableDocument(BaseModel):
    name: str
    domain: list[str] = Field(min_length=1)


class ActionDocument(BaseModel):
    name: str
    pre: dict[str, str] = Field(default_factory=dict)
    post: dict[str, str] = Field(default_factory=dict)


class InstanceDocument(BaseModel):
    format: Literal["macroforge-instance/1"] = INSTANCE_FORMAT
    name: str = "instance"
    domain: Optional[Literal["blocksworld", "hanoi"]] = None
    variables: list[VariableDocument]
    init: dict[str, str]
    goal: dict[str, str] = Field(default_factory=dict)
    actions: list[ActionDocument] = Field(default_factory=list)


class RegistryEntry(ActionDocument):
    id: int
    derivation: Optional[tuple[int, int]] = None


class PlanDocument(BaseModel):
    """Registry closure plus top-level ids; expandable without the instance."""

    format: Literal["macroforge-plan/1"] = PLAN_FORMAT
    instance: str = ""
    actions: list[RegistryEntry] = Field(default_factory=list)
    top: list[int] = Field(default_factory=list)
    trace: list[list[int]] = Field(default_factory=list)
    _entries: Optional[dict[int, RegistryEntry]] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check(self):
        entries: dict[int, RegistryEntry] = {}
        for entry in self.actions:
            if entry.id in entries:
                raise ValueError(f"action id {entry.id} declared twice")
            if entry.derivation is not None:
                for child in entry.derivation:
                    if child not in entries:
                        raise ValueError(
                            f"action {entry.id} derives from {child}, "
                            "which is not declared before it"
                        )
            entries[entry.id] = entry
        for action_id in self.top:
            if action_id not in entries:
                raise ValueError(f"top-level id {action_id} is not declared")
        return self

    def entry(self, action_id: int) -> RegistryEntry:
        if self._entries is None:
            self._entries = {entry.id: entry for entry in self.actions}
        return self._entries[action_id]

    def derivation_of(self, action_id: int) -> tuple[int, int] | None:
        return self.entry(action_id).derivation

    def name_of(self, action_id: int) -> str:
        return self.entry(action_id).name


class DerivationDocument(BaseModel):
    parent: int
    left: int
    right: int


class EdgeDocument(BaseModel):
    source: int = Field(description="Position in `states`")
    target: int
    action: int


class MacroResultDocument(BaseModel):
    format: Literal["macroforge-macros/1"] = MACROS_FORMAT
    instance: str = ""
    states: list[list[int]] = Field(default_factory=list, description="Value indices")
    actions: list[RegistryEntry] = Field(default_factory=list)
    log: list[DerivationDocument] = Field(default_factory=list)
    edges: list[EdgeDocument] = Field(default_factory=list)
    stats: dict[str, float] = Field(default_factory=dict)
