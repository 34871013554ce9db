"""Breadth-first search over primitive actions.

Used by the baseline to connect states inside a ball, and by tests as an
independent oracle for plan lengths and reachability.
"""

import logging
from collections import deque
from collections.abc import Callable, Collection

from macroforge.planner.core.algebra import apply_action
from macroforge.planner.models.instance import PlanningInstance, State

logger = logging.getLogger(__name__)

# state -> (predecessor, action id), None for the start
SearchTree = dict[State, tuple[State, int] | None]


def bfs_tree(
    instance: PlanningInstance,
    start: State,
    within: Collection[State] | None = None,
) -> SearchTree:
    """Every state reachable from `start`, never leaving `within` when given."""
    tree: SearchTree = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for action in instance.actions:
            if not all(s[v] == x for v, x in action.pre):
                continue
            t = apply_action(s, action)
            if t in tree or (within is not None and t not in within):
                continue
            tree[t] = (s, action.id)
            queue.append(t)
    return tree


def path_to(tree: SearchTree, target: State) -> list[int]:
    """Action ids leading from the tree's start to `target`."""
    steps = []
    link = tree[target]
    while link is not None:
        parent, action_id = link
        steps.append(action_id)
        link = tree[parent]
    steps.reverse()
    return steps


def bfs_plan(
    instance: PlanningInstance,
    start: State,
    goal_test: Callable[[State], bool],
    within: Collection[State] | None = None,
) -> list[int] | None:
    """A shortest primitive plan from `start` to a state passing `goal_test`."""
    if goal_test(start):
        return []
    tree: SearchTree = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for action in instance.actions:
            if not all(s[v] == x for v, x in action.pre):
                continue
            t = apply_action(s, action)
            if t in tree or (within is not None and t not in within):
                continue
            tree[t] = (s, action.id)
            if goal_test(t):
                return path_to(tree, t)
            queue.append(t)
    logger.debug(f"BFS exhausted {len(tree)} states without reaching the goal")
    return None
