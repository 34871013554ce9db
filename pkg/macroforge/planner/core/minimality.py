"""Brute-force oracles over combinations of base actions.

Both are test machinery: they enumerate what the fixed point is supposed to
capture and compare it against what compute_macros actually produced.
"""

import logging
from collections.abc import Sequence
from typing import Literal

from macroforge.planner.core.action_graph import ProgramTrace
from macroforge.planner.core.algebra import apply_action, combine_conditions
from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.core.macro_engine import MacroResult, label_set
from macroforge.planner.models.action import Action, Transition
from macroforge.planner.utils.settings import DEFAULT_MINIMALITY_BUDGET

logger = logging.getLogger(__name__)

Verdict = Literal["minimal", "non-minimal", "inconclusive"]


def is_condition_minimal(
    transition: Transition,
    actions: Sequence[Action],
    max_len: int,
    *,
    library: MacroLibrary,
    budget: int = DEFAULT_MINIMALITY_BUDGET,
) -> Verdict:
    """Whether every combination over `actions` of length <= max_len that moves
    transition.source to transition.target has conditions containing those of
    the transition's action.

    Only chains applicable step by step from the source are enumerated; any
    other combination is inapplicable at the source. Steps that change nothing
    are skipped: dropping one never enlarges the conditions.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    label = library[transition.action]
    source, target = transition.source, transition.target
    enumerated = 0
    # (state reached, pre, post, length)
    stack = [(source, frozenset(), frozenset(), 0)]
    while stack:
        s, pre, post, length = stack.pop()
        if length == max_len:
            continue
        for action in actions:
            if not all(s[v] == x for v, x in action.pre):
                continue
            t = apply_action(s, action)
            if t == s:
                continue
            enumerated += 1
            if enumerated > budget:
                logger.debug(f"Minimality budget of {budget} exhausted")
                return "inconclusive"
            if length == 0:
                c_pre, c_post = action.pre, action.post - action.pre
            else:
                c_pre, c_post = combine_conditions(pre, post, action.pre, action.post)
            if t == target and not (label.pre <= c_pre and label.post <= c_post):
                logger.debug(
                    f"{label.name} is not condition-minimal: a chain of {length + 1} "
                    "actions has smaller conditions"
                )
                return "non-minimal"
            stack.append((t, c_pre, c_post, length + 1))
    return "minimal"


def check_discovery(trace: ProgramTrace, result: MacroResult) -> bool:
    """Every action a program produced shows up, by conditions, as a label of
    the fixed point."""
    found = {action.conditions for action in label_set(result.graph)}
    library = trace.graph.library
    for transition in trace.transitions:
        action = library[transition.action]
        if action.conditions not in found:
            logger.info(f"{action.name} was produced by the program but not discovered")
            return False
    return True
