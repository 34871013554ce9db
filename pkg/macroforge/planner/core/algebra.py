from collections.abc import Mapping

from macroforge.planner.models.action import Action, Conditions, Plan
from macroforge.planner.models.instance import PartialState, State
from macroforge.planner.utils.errors import CombineMisuseError, InputError


def normalize(action: Action) -> Action:
    """Drop postcondition pairs already implied by the precondition."""
    post = action.post - action.pre
    if post == action.post:
        return action
    return action.model_copy(update={"post": post})


def applicable(action: Action, s: State) -> bool:
    return all(s[v] == x for v, x in action.pre)


def apply_action(s: State, action: Action) -> State:
    if not all(s[v] == x for v, x in action.pre):
        return s
    t = list(s)
    for v, x in action.post:
        t[v] = x
    return tuple(t)


def apply_plan(s: State, plan: Plan, actions: Mapping[int, Action]) -> State:
    for position, action_id in enumerate(plan.steps):
        action = actions.get(action_id)
        if action is None:
            raise InputError(f"unknown action id {action_id}", f"$.steps[{position}]")
        s = apply_action(s, action)
    return s


def combine_conditions(
    pre_a: PartialState, post_a: PartialState, pre_b: PartialState, post_b: PartialState
) -> Conditions:
    """Conditions of the macro "a then b".

    Raises CombineMisuseError when b demands a value that a's known outcome
    contradicts, i.e. when no state runs a and then b.
    """
    # what is known right after a ran: post(a) plus the untouched part of pre(a)
    known = dict(pre_a)
    known.update(post_a)
    pr = dict(pre_a)
    for v, x in pre_b:
        seen = known.get(v)
        if seen is None:
            pr[v] = x
        elif seen != x:
            raise CombineMisuseError(
                f"variable {v} is {seen} after the first action but the second needs {x}"
            )
    pos = dict(post_b)
    for v, x in post_a:
        pos.setdefault(v, x)
    pre = frozenset(pr.items())
    return pre, frozenset(pos.items()) - pre


def combine(a: Action, b: Action) -> Action:
    pre, post = combine_conditions(a.pre, a.post, b.pre, b.post)
    derivation = (a.id, b.id) if a.id is not None and b.id is not None else None
    return Action(name=f"({a.name} ; {b.name})", pre=pre, post=post, derivation=derivation)


def strictly_smaller(pre: PartialState, post: PartialState, incumbent: Action) -> bool:
    return (pre < incumbent.pre and post <= incumbent.post) or (
        pre <= incumbent.pre and post < incumbent.post
    )


def better(action: Action, edge: tuple[int, int], graph) -> bool:
    """True when `action` may replace the label of `edge` (or the edge is absent)."""
    incumbent = graph.label(*edge)
    if incumbent is None:
        return True
    return strictly_smaller(action.pre, action.post, incumbent)
