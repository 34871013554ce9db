"""Turning succinct plans back into primitive steps without materializing them."""

from collections.abc import Iterable, Iterator
from typing import Protocol

from macroforge.planner.utils.errors import InputError


class DerivationSource(Protocol):
    """Anything that can tell how an action id was derived."""

    def derivation_of(self, action_id: int) -> tuple[int, int] | None: ...

    def name_of(self, action_id: int) -> str: ...


def expand(roots: int | Iterable[int], source: DerivationSource) -> Iterator[int]:
    """Primitive ids in execution order: in-order walk of each derivation tree.

    Iterative, so derivation depth is not bounded by the recursion limit.
    """
    if isinstance(roots, int):
        roots = [roots]
    for root in roots:
        stack = [root]
        while stack:
            action_id = stack.pop()
            derivation = _derivation(source, action_id)
            if derivation is None:
                yield action_id
            else:
                left, right = derivation
                stack.append(right)
                stack.append(left)


def expand_names(roots: int | Iterable[int], source: DerivationSource) -> Iterator[str]:
    for action_id in expand(roots, source):
        yield source.name_of(action_id)


def expanded_length(
    action_id: int, source: DerivationSource, memo: dict[int, int] | None = None
) -> int:
    """Number of primitive steps below `action_id`, memoized over the DAG."""
    memo = memo if memo is not None else {}
    in_progress: set[int] = set()
    stack = [(action_id, False)]
    while stack:
        current, children_done = stack.pop()
        if current in memo:
            continue
        derivation = _derivation(source, current)
        if derivation is None:
            memo[current] = 1
        elif children_done:
            in_progress.discard(current)
            memo[current] = memo[derivation[0]] + memo[derivation[1]]
        else:
            in_progress.add(current)
            stack.append((current, True))
            for child in derivation:
                if child in in_progress:
                    raise InputError(
                        f"derivation cycle through action {current}", "$.actions"
                    )
                if child not in memo:
                    stack.append((child, False))
    return memo[action_id]


def plan_length(top: Iterable[int], source: DerivationSource) -> int:
    memo: dict[int, int] = {}
    return sum(expanded_length(action_id, source, memo) for action_id in top)


def _derivation(source: DerivationSource, action_id: int) -> tuple[int, int] | None:
    try:
        return source.derivation_of(action_id)
    except (KeyError, InputError):
        raise InputError(f"dangling action id {action_id}", "$.actions") from None
