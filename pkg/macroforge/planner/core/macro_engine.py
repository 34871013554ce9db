import logging
import time
from collections import deque
from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, Field

from macroforge.planner.core.action_graph import ActionGraph, apply_at, transitive_at
from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.models.action import Action
from macroforge.planner.models.instance import State
from macroforge.planner.models.plan import MacroStats
from macroforge.planner.utils.errors import (
    BallSizeExceeded,
    InputError,
    InvariantViolation,
)
from macroforge.planner.utils.settings import EngineSettings

logger = logging.getLogger(__name__)


class MacroResult(BaseModel):
    """Fixed-point graph, the library its labels resolve in, and run counters."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph: ActionGraph
    library: MacroLibrary
    base: list[int] = Field(default_factory=list, description="Ids of the input actions")
    stats: MacroStats = Field(default_factory=MacroStats)


class _Budget:
    """Label installations allowed before the run is declared broken.

    A label only ever shrinks in pre or post, so an edge is relabelled at
    most 2n times after its first installation.
    """

    def __init__(self, n_vars: int):
        self.per_edge = 2 * n_vars + 1
        self.changes = 0

    def spend(self, graph: ActionGraph):
        self.changes += 1
        if self.changes > self.per_edge * max(graph.edge_count, 1):
            raise InvariantViolation(
                f"{self.changes} label changes over {graph.edge_count} edges "
                f"exceeds {self.per_edge} per edge"
            )


def label_set(graph: ActionGraph) -> list[Action]:
    """Distinct edge labels (by conditions), in registry order."""
    seen = set()
    labels = []
    for action_id in graph.label_ids():
        action = graph.library[action_id]
        if action.conditions not in seen:
            seen.add(action.conditions)
            labels.append(action)
    return labels


def scan_once(
    graph: ActionGraph, base: Sequence[int], budget: _Budget | None = None
) -> int:
    """One literal pass: apply over base + current labels at every vertex, then
    transitive over every vertex triple in lexicographic order.

    Triples whose first two edges are absent are skipped (they cannot change
    anything). Returns the number of label installations.
    """
    changes = 0
    pool = list(dict.fromkeys([*base, *graph.label_ids()]))
    base_set = set(base)
    for action_id in pool:
        if action_id not in base_set and not graph.label_counts[action_id]:
            continue
        action = graph.library[action_id]
        for u in graph.vertices_satisfying(action.pre):
            if apply_at(graph, action, u) is not None:
                changes += 1
                if budget is not None:
                    budget.spend(graph)
    for u in range(len(graph)):
        for w in sorted(graph.out[u]):
            for v in sorted(graph.out[w]):
                if transitive_at(graph, u, w, v) is not None:
                    changes += 1
                    if budget is not None:
                        budget.spend(graph)
    return changes


def is_transitively_closed(graph: ActionGraph) -> bool:
    for u, targets in enumerate(graph.out):
        for w in targets:
            for v in graph.out[w]:
                if v != u and v not in targets:
                    return False
    return True


def compute_macros(
    states: Sequence[State],
    actions: Sequence[Action],
    *,
    library: MacroLibrary | None = None,
    settings: EngineSettings = EngineSettings(),
) -> MacroResult:
    """Saturate the action graph over `states` with apply and transitive.

    `library` may be shared across calls (the solver keeps one per run); the
    actions are interned into it first. The default run drains a worklist of
    new labels and relabelled edges and then certifies the result with one
    literal scan that must change nothing (`InvariantViolation` otherwise);
    `settings.strict_scan` repeats literal scans instead.
    """
    if not states:
        raise InputError("the state set is empty", "$.states")
    if len(states) > settings.ball_cap:
        raise BallSizeExceeded(len(states), settings.ball_cap)
    started = time.perf_counter()
    library = library if library is not None else MacroLibrary()
    base = list(dict.fromkeys(library.intern(a).id for a in actions))
    graph = ActionGraph(states, library)
    budget = _Budget(len(states[0]))

    if settings.strict_scan:
        iterations = _run_literal(graph, base, budget)
    else:
        iterations = _run_worklist(graph, base, budget)
        if settings.certify:
            leftover = scan_once(graph, base, budget)
            iterations += 1
            if leftover:
                raise InvariantViolation(
                    f"certification scan changed {leftover} labels after the worklist drained"
                )

    stats = MacroStats(
        iterations=iterations,
        states=len(graph),
        edges=graph.edge_count,
        label_changes=budget.changes,
        wall_ms=(time.perf_counter() - started) * 1000,
    )
    logger.info(
        f"Macros over {stats.states} states: {stats.edges} edges, "
        f"{stats.label_changes} label changes, {stats.wall_ms:.0f} ms"
    )
    return MacroResult(graph=graph, library=library, base=base, stats=stats)


def _run_literal(graph: ActionGraph, base: list[int], budget: _Budget) -> int:
    passes = 1
    while scan_once(graph, base, budget):
        passes += 1
    return passes


def _run_worklist(graph: ActionGraph, base: list[int], budget: _Budget) -> int:
    """Worklist saturation.

    Pending actions are applied at every vertex satisfying their precondition;
    a pending edge (u, v) is combined with every edge leaving v and every edge
    entering u. A rejected rewrite stays rejected because labels only shrink,
    so only what changed needs revisiting.
    """
    base_set = set(base)
    pending_actions = deque(base)
    applied = set(base)
    pending_edges: deque[tuple[int, int]] = deque()
    queued: set[tuple[int, int]] = set()
    steps = 0

    def installed(u: int, v: int, action_id: int):
        budget.spend(graph)
        if action_id not in applied:
            applied.add(action_id)
            pending_actions.append(action_id)
        if (u, v) not in queued:
            queued.add((u, v))
            pending_edges.append((u, v))

    while pending_actions or pending_edges:
        steps += 1
        if pending_edges:
            u, v = pending_edges.popleft()
            queued.discard((u, v))
            for w in sorted(graph.out[v]):
                action_id = transitive_at(graph, u, v, w)
                if action_id is not None:
                    installed(u, w, action_id)
            for x in sorted(graph.inc[u]):
                action_id = transitive_at(graph, x, u, v)
                if action_id is not None:
                    installed(x, v, action_id)
            continue

        action_id = pending_actions.popleft()
        if action_id not in base_set and not graph.label_counts[action_id]:
            # no longer a label; apply it if it comes back
            applied.discard(action_id)
            continue
        action = graph.library[action_id]
        for u in graph.vertices_satisfying(action.pre):
            v = apply_at(graph, action, u)
            if v is not None:
                installed(u, v, action_id)
    logger.debug(f"Worklist drained after {steps} steps")
    return steps
