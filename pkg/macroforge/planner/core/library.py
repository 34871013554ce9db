import logging
from collections.abc import Iterable, Iterator, Sequence

from pydantic import BaseModel, ConfigDict

from macroforge.planner.core.algebra import normalize
from macroforge.planner.models.action import Action, Conditions
from macroforge.planner.models.instance import PartialState
from macroforge.planner.utils.errors import InputError

logger = logging.getLogger(__name__)


class DerivationRecord(BaseModel):
    """One macro definition: parent = left, right."""

    model_config = ConfigDict(frozen=True)

    parent: int
    left: int
    right: int


class MacroLibrary:
    """Append-only action registry plus the log of macro definitions.

    Ids are never reused and entries never change, so a definition stays valid
    after the edge it was first installed on gets relabelled. Macros are
    deduplicated by conditions: combining into conditions that already exist
    hands back the existing entry.
    """

    def __init__(self):
        self._actions: dict[int, Action] = {}
        self._by_conditions: dict[Conditions, int] = {}
        self.log: list[DerivationRecord] = []
        self._next_id = 0

    @classmethod
    def from_primitives(cls, actions: Iterable[Action]) -> "MacroLibrary":
        library = cls()
        for action in actions:
            library.register(action)
        return library

    def __len__(self) -> int:
        return len(self._actions)

    def __contains__(self, action_id: int) -> bool:
        return action_id in self._actions

    def __getitem__(self, action_id: int) -> Action:
        try:
            return self._actions[action_id]
        except KeyError:
            raise InputError(f"unknown action id {action_id}", "$.actions") from None

    def get(self, action_id: int) -> Action | None:
        return self._actions.get(action_id)

    def ids(self) -> list[int]:
        return list(self._actions)

    def actions(self) -> Iterator[Action]:
        return iter(self._actions.values())

    def find(self, pre: PartialState, post: PartialState) -> int | None:
        return self._by_conditions.get((pre, post))

    def register(self, action: Action) -> Action:
        """Add an action that has no derivation in this library.

        Keeps a caller-chosen id when it is free (instances number their
        primitives from 0); otherwise hands out the next id.
        """
        action = normalize(action)
        if action.id is not None and self._actions.get(action.id) == action:
            return action
        action_id = action.id
        if action_id is None or action_id in self._actions:
            action_id = self._next_id
        if action.derivation is not None:
            left, right = action.derivation
            if left not in self._actions or right not in self._actions:
                raise InputError(
                    f"derivation of {action.name!r} references unknown ids",
                    "$.actions",
                )
        action = action.model_copy(update={"id": action_id})
        self._store(action)
        if action.derivation is not None:
            left, right = action.derivation
            self.log.append(DerivationRecord(parent=action_id, left=left, right=right))
        return action

    def intern(self, action: Action) -> Action:
        """The registry entry for `action`: same id, or same conditions, or new."""
        if action.id is not None and self._actions.get(action.id) == action:
            return action
        existing = self._by_conditions.get(normalize(action).conditions)
        if existing is not None:
            return self._actions[existing]
        return self.register(action)

    def register_macro(
        self, pre: PartialState, post: PartialState, left: int, right: int
    ) -> int:
        existing = self._by_conditions.get((pre, post))
        if existing is not None:
            return existing
        action_id = self._next_id
        self._store(
            Action(
                id=action_id,
                name=f"macro-{action_id}",
                pre=pre,
                post=post,
                derivation=(left, right),
            )
        )
        self.log.append(DerivationRecord(parent=action_id, left=left, right=right))
        logger.debug(f"Registered macro-{action_id} = {left}, {right}")
        return action_id

    def adopt(self, action: Action) -> Action:
        """Store an entry exactly as given (id and derivation included)."""
        if action.id is None or action.id in self._actions:
            raise InputError(f"action id {action.id} is missing or taken", "$.actions")
        if action.derivation is not None:
            left, right = action.derivation
            if left not in self._actions or right not in self._actions:
                raise InputError(
                    f"derivation of {action.id} references undeclared ids", "$.actions"
                )
            self.log.append(DerivationRecord(parent=action.id, left=left, right=right))
        self._store(action)
        return action

    def _store(self, action: Action):
        self._actions[action.id] = action
        self._by_conditions.setdefault(action.conditions, action.id)
        self._next_id = max(self._next_id, action.id + 1)

    # expansion lookups
    def derivation_of(self, action_id: int) -> tuple[int, int] | None:
        return self[action_id].derivation

    def name_of(self, action_id: int) -> str:
        return self[action_id].name

    def closure(self, roots: Sequence[int]) -> list[int]:
        """Ids reachable from `roots` through derivations, children first."""
        order: list[int] = []
        seen: set[int] = set()
        stack = [(root, False) for root in reversed(roots)]
        while stack:
            action_id, expanded = stack.pop()
            if expanded:
                order.append(action_id)
                continue
            if action_id in seen:
                continue
            seen.add(action_id)
            stack.append((action_id, True))
            derivation = self.derivation_of(action_id)
            if derivation is not None:
                stack.append((derivation[1], False))
                stack.append((derivation[0], False))
        return order

    def restricted_to(self, roots: Sequence[int]) -> "MacroLibrary":
        """A new library holding only the definition closure of `roots`."""
        subset = MacroLibrary()
        for action_id in sorted(self.closure(roots)):
            subset.adopt(self._actions[action_id])
        return subset
