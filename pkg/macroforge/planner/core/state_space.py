import logging
from collections.abc import Iterable, Iterator
from itertools import combinations, product

from macroforge.planner.models.instance import (
    NO_FILTER,
    PartialState,
    PlanningInstance,
    State,
    StateFilter,
    VariableTable,
)
from macroforge.planner.utils.errors import BallSizeExceeded, InputError
from macroforge.planner.utils.settings import DEFAULT_BALL_CAP

logger = logging.getLogger(__name__)


def restrict(
    s: State | PartialState, variables: Iterable[int], n_vars: int | None = None
) -> PartialState:
    """s restricted to `variables`; works for total and partial states."""
    wanted = set(variables)
    if n_vars is None and isinstance(s, tuple):
        n_vars = len(s)
    if n_vars is not None:
        unknown = [v for v in wanted if not 0 <= v < n_vars]
        if unknown:
            raise InputError(f"unknown variable index {min(unknown)}", "$.variables")
    if isinstance(s, tuple):
        return frozenset((v, s[v]) for v in wanted)
    return frozenset((v, x) for v, x in s if v in wanted)


def is_goal_state(s: State, instance: PlanningInstance) -> bool:
    return all(s[v] == x for v, x in instance.goal)


def hamming(s: State, t: State) -> int:
    if len(s) != len(t):
        raise InputError(
            f"states over {len(s)} and {len(t)} variables cannot be compared"
        )
    return sum(1 for a, b in zip(s, t) if a != b)


def canonical_key(origin: State, t: State) -> tuple:
    """Sort key of `t` inside a ball around `origin`.

    Orders by number of differing variables, then by the differing variable
    set, then by the values taken there (all in declaration order).
    """
    changed = tuple(v for v, (a, b) in enumerate(zip(origin, t)) if a != b)
    return len(changed), changed, tuple(t[v] for v in changed)


def ball_size(sizes: tuple[int, ...], k: int) -> int:
    """Unfiltered |H(s, k)|: elementary symmetric sums of (|D(v)| - 1)."""
    # e[j] = sum over j-subsets W of prod_{v in W} (|D(v)| - 1)
    e = [1] + [0] * k
    for size in sizes:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * (size - 1)
    return sum(e)


def _enumerate_ball(s: State, k: int, sizes: tuple[int, ...]) -> Iterator[State]:
    n = len(s)
    for j in range(min(k, n) + 1):
        for changed in combinations(range(n), j):
            alternatives = [
                [x for x in range(sizes[v]) if x != s[v]] for v in changed
            ]
            for values in product(*alternatives):
                t = list(s)
                for v, x in zip(changed, values):
                    t[v] = x
                yield tuple(t)


def ball(
    instance: PlanningInstance,
    s: State,
    k: int,
    state_filter: StateFilter = NO_FILTER,
    cap: int = DEFAULT_BALL_CAP,
) -> tuple[State, ...]:
    """All states within Hamming distance k of s that pass the filter.

    The result is in canonical order, so s itself comes first whenever it is
    admitted.
    """
    if k < 0:
        raise InputError("width must be non-negative", "$.width")
    sizes = instance.variables.sizes
    if len(s) != len(sizes):
        raise InputError("state does not assign every variable", "$.state")
    projected = ball_size(sizes, k)

    if state_filter.mode == "predicate" and state_filter.universe is not None:
        picked = []
        for t in state_filter.universe():
            if hamming(s, t) <= k and state_filter.predicate(t):
                picked.append(t)
                if len(picked) > cap:
                    raise BallSizeExceeded(len(picked), cap)
        picked.sort(key=lambda t: canonical_key(s, t))
        logger.debug(f"Ball radius {k} cut from universe: {len(picked)} states")
        return tuple(picked)

    if projected > cap:
        raise BallSizeExceeded(projected, cap)
    states = tuple(t for t in _enumerate_ball(s, k, sizes) if state_filter.accepts(t))
    logger.debug(f"Ball radius {k}: {len(states)} of {projected} states admitted")
    return states


def wrong(s: State, instance: PlanningInstance) -> frozenset[int]:
    return frozenset(v for v, x in instance.goal if s[v] != x)


def is_improvement(s: State, s_next: State, instance: PlanningInstance) -> bool:
    kept = all(s_next[v] == x for v, x in instance.goal if s[v] == x)
    fixed = any(s_next[v] == x for v, x in instance.goal if s[v] != x)
    return kept and fixed


def dominates(s: State, other: State, instance: PlanningInstance) -> bool:
    goal_vars = {v for v, _ in instance.goal}
    differing = {v for v, (a, b) in enumerate(zip(s, other)) if a != b}
    return differing <= goal_vars and wrong(s, instance) <= wrong(other, instance)


def state_from_mapping(
    table: VariableTable, mapping: dict[str, str], path: str = "$.state"
) -> State:
    values = [None] * len(table)
    for name, value in mapping.items():
        try:
            var = table.index(name)
        except KeyError:
            raise InputError(f"unknown variable {name!r}", f"{path}.{name}") from None
        try:
            values[var] = table.value_index(var, value)
        except KeyError:
            raise InputError(
                f"value {value!r} not in the domain of {name!r}", f"{path}.{name}"
            ) from None
    missing = [table.names[v] for v, x in enumerate(values) if x is None]
    if missing:
        raise InputError(f"missing variable {missing[0]!r}", f"{path}.{missing[0]}")
    return tuple(values)


def state_to_mapping(table: VariableTable, s: State) -> dict[str, str]:
    return {table.names[v]: table.domains[v][x] for v, x in enumerate(s)}


def partial_from_mapping(
    table: VariableTable, mapping: dict[str, str], path: str
) -> PartialState:
    pairs = set()
    for name, value in mapping.items():
        try:
            var = table.index(name)
        except KeyError:
            raise InputError(f"unknown variable {name!r}", f"{path}.{name}") from None
        try:
            pairs.add((var, table.value_index(var, value)))
        except KeyError:
            raise InputError(
                f"value {value!r} not in the domain of {name!r}", f"{path}.{name}"
            ) from None
    return frozenset(pairs)


def partial_to_mapping(table: VariableTable, partial: PartialState) -> dict[str, str]:
    return {table.names[v]: table.domains[v][x] for v, x in sorted(partial)}
