import logging
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from macroforge.planner.core.algebra import (
    apply_action,
    combine_conditions,
    strictly_smaller,
)
from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.models.action import Action, Transition
from macroforge.planner.models.instance import PartialState, State
from macroforge.planner.utils.errors import (
    CombineMisuseError,
    InputError,
    InvariantViolation,
)

logger = logging.getLogger(__name__)


class ActionGraph:
    """States as vertices, at most one labelled edge per ordered pair.

    Vertices are addressed by their position in the (canonically ordered)
    state tuple; labels are ids into the shared MacroLibrary. Adjacency is
    kept both ways so transitive candidates around an edge are found without
    scanning every vertex triple.
    """

    def __init__(self, states: Sequence[State], library: MacroLibrary):
        self.states: tuple[State, ...] = tuple(states)
        self.index: dict[State, int] = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise InputError("duplicate state in vertex set", "$.states")
        self.library = library
        self.out: list[dict[int, int]] = [{} for _ in self.states]
        self.inc: list[dict[int, int]] = [{} for _ in self.states]
        self.label_counts: Counter[int] = Counter()
        self.n_edges = 0
        self._pair_masks: dict[tuple[int, int], int] = {}
        for position, s in enumerate(self.states):
            bit = 1 << position
            for pair in enumerate(s):
                self._pair_masks[pair] = self._pair_masks.get(pair, 0) | bit

    def __len__(self) -> int:
        return len(self.states)

    def vertex(self, s: State) -> int:
        try:
            return self.index[s]
        except KeyError:
            raise InputError("state is not a vertex of the graph", "$.state") from None

    @property
    def edge_count(self) -> int:
        return self.n_edges

    def label_id(self, u: int, v: int) -> int | None:
        return self.out[u].get(v)

    def label(self, s: State, t: State) -> Action | None:
        action_id = self.out[self.vertex(s)].get(self.vertex(t))
        return None if action_id is None else self.library[action_id]

    def has_label(self, action: Action) -> bool:
        action_id = action.id
        if action_id is None:
            action_id = self.library.find(action.pre, action.post)
        return action_id is not None and self.label_counts[action_id] > 0

    def set_label(self, u: int, v: int, action_id: int):
        previous = self.out[u].get(v)
        if previous is None:
            self.n_edges += 1
        else:
            self.label_counts[previous] -= 1
            if not self.label_counts[previous]:
                del self.label_counts[previous]
        self.out[u][v] = action_id
        self.inc[v][u] = action_id
        self.label_counts[action_id] += 1

    def addlabel(self, s: State, t: State, action: Action) -> Action:
        """Place (s, t) in the edge set if needed and label it with `action`."""
        u, v = self.vertex(s), self.vertex(t)
        if action.id is None or action.id not in self.library:
            action = self.library.register(action)
        self.set_label(u, v, action.id)
        return action

    def vertices_satisfying(self, pre: PartialState) -> Iterator[int]:
        """Vertex positions whose state agrees with `pre`, ascending."""
        mask = (1 << len(self.states)) - 1
        for pair in pre:
            mask &= self._pair_masks.get(pair, 0)
            if not mask:
                return
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """(source position, target position, action id), sources ascending."""
        for u, targets in enumerate(self.out):
            for v in sorted(targets):
                yield u, v, targets[v]

    def transitions(self) -> list[Transition]:
        return [
            Transition(source=self.states[u], action=a, target=self.states[v])
            for u, v, a in self.edges()
        ]

    def label_ids(self) -> list[int]:
        return sorted(self.label_counts)


def apply_at(graph: ActionGraph, action: Action, u: int) -> int | None:
    """Index-level apply: install `action` on the edge it induces at vertex u.

    Returns the target vertex when the label changed. The membership guard
    (base action or current label) is left to the caller.
    """
    s = graph.states[u]
    if not all(s[var] == x for var, x in action.pre):
        return None
    t = list(s)
    for var, x in action.post:
        t[var] = x
    v = graph.index.get(tuple(t))
    if v is None or v == u:
        return None
    incumbent = graph.out[u].get(v)
    if incumbent is not None and not strictly_smaller(
        action.pre, action.post, graph.library[incumbent]
    ):
        return None
    graph.set_label(u, v, action.id)
    return v


def rewrite_apply(
    graph: ActionGraph, base: Iterable[Action], action: Action, s: State
) -> bool:
    """The apply rewrite; returns whether the graph changed."""
    u = graph.vertex(s)
    base_keys = {a.conditions for a in base}
    if action.conditions not in base_keys and not graph.has_label(action):
        return False
    action = graph.library.intern(action)
    return apply_at(graph, action, u) is not None


def rewrite_transitive(
    graph: ActionGraph, s1: State, s2: State, s3: State
) -> Transition | None:
    """The transitive rewrite; returns the produced transition, if any."""
    u, w, v = graph.vertex(s1), graph.vertex(s2), graph.vertex(s3)
    action_id = transitive_at(graph, u, w, v)
    if action_id is None:
        return None
    return Transition(source=s1, action=action_id, target=s3)


def transitive_at(graph: ActionGraph, u: int, w: int, v: int) -> int | None:
    """Index-level transitive rewrite; returns the installed label id."""
    if u == v:
        # no self-loops: an edge always joins two distinct states
        return None
    first = graph.out[u].get(w)
    second = graph.out[w].get(v) if first is not None else None
    if second is None:
        return None
    library = graph.library
    a, b = library[first], library[second]
    try:
        pre, post = combine_conditions(a.pre, a.post, b.pre, b.post)
    except CombineMisuseError as e:
        raise InvariantViolation(
            f"edges {u}->{w}->{v} carry labels that cannot run back to back: {e}"
        ) from e
    incumbent = graph.out[u].get(v)
    if incumbent is not None and not strictly_smaller(pre, post, library[incumbent]):
        return None
    action_id = library.register_macro(pre, post, first, second)
    graph.set_label(u, v, action_id)
    return action_id


class ApplyCommand(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["apply"] = "apply"
    action: Action
    state: State


class TransitiveCommand(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["transitive"] = "transitive"
    s1: State
    s2: State
    s3: State


Command = Union[ApplyCommand, TransitiveCommand]


class ProgramTrace(BaseModel):
    """Result of running an action-graph program."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph: ActionGraph
    applied: list[Transition] = Field(default_factory=list)
    produced: list[Transition] = Field(default_factory=list)

    @property
    def transitions(self) -> list[Transition]:
        return self.applied + self.produced


def trace_program(
    commands: Sequence[Command],
    states: Sequence[State],
    actions: Sequence[Action],
    library: MacroLibrary | None = None,
) -> ProgramTrace:
    """Run a program of apply/transitive commands from the edgeless graph."""
    library = library if library is not None else MacroLibrary.from_primitives(actions)
    base = [library.intern(a) for a in actions]
    graph = ActionGraph(states, library)
    trace = ProgramTrace(graph=graph)
    for position, command in enumerate(commands):
        try:
            if isinstance(command, ApplyCommand):
                action = library.intern(command.action)
                if not rewrite_apply(graph, base, action, command.state):
                    continue
                trace.applied.append(
                    Transition(
                        source=command.state,
                        action=action.id,
                        target=apply_action(command.state, action),
                    )
                )
            else:
                produced = rewrite_transitive(graph, command.s1, command.s2, command.s3)
                if produced is not None:
                    trace.produced.append(produced)
        except InputError as e:
            raise InputError(str(e), f"$.commands[{position}]") from e
    return trace


def run_program(
    commands: Sequence[Command],
    states: Sequence[State],
    actions: Sequence[Action],
    library: MacroLibrary | None = None,
) -> ActionGraph:
    return trace_program(commands, states, actions, library).graph
