"""Towers of Hanoi with one position variable per disk.

Positions are indexed disks first (d1..dk as 0..k-1) then pegs p1, p2, p3
(k, k+1, k+2); a smaller index is a smaller disk and every disk is smaller
than every peg. Variable order is on-d1..on-dk, then clear-x for every
position in the same order, so clear-x sits at index k + x. on-d values are
position indices; clear values are T (0) and F (1).
"""

import logging
from collections.abc import Iterator
from functools import partial
from itertools import product

from pydantic import BaseModel, Field

from macroforge.planner.core.action_graph import (
    ApplyCommand,
    Command,
    TransitiveCommand,
)
from macroforge.planner.core.algebra import applicable, apply_action
from macroforge.planner.models.action import Action
from macroforge.planner.models.instance import (
    PlanningInstance,
    State,
    StateFilter,
    VariableTable,
)
from macroforge.planner.utils.errors import InputError, InvariantViolation

logger = logging.getLogger(__name__)

T, F = 0, 1
PEGS = ("p1", "p2", "p3")


class HanoiConfig(BaseModel):
    ndisks: int = Field(ge=1, description="Number of disks")
    all_sources: bool = Field(
        default=False,
        description="Also generate moves whose source can never hold the disk",
    )


def n_disks(s: State) -> int:
    return (len(s) - 3) // 2


def position_names(k: int) -> tuple[str, ...]:
    return (*(f"d{i + 1}" for i in range(k)), *PEGS)


def position_index(k: int, name: str) -> int:
    try:
        return position_names(k).index(name)
    except ValueError:
        raise InputError(f"unknown position {name!r}", "$.position") from None


def hanoi_variables(k: int) -> VariableTable:
    positions = position_names(k)
    names = [f"on-d{i + 1}" for i in range(k)] + [f"clear-{x}" for x in positions]
    domains = [positions] * k + [("T", "F")] * len(positions)
    return VariableTable(names=tuple(names), domains=tuple(domains))


def move_action(k: int, d: int, source: int, target: int, action_id: int | None = None) -> Action:
    positions = position_names(k)
    pre = {k + d: T, k + target: T, d: source}
    post = {k + target: F, k + source: T, d: target}
    pre_set = frozenset(pre.items())
    return Action(
        id=action_id,
        name=f"move-{positions[d]}-{positions[source]}-{positions[target]}",
        pre=pre_set,
        post=frozenset(post.items()) - pre_set,
    )


def hanoi_actions(k: int, all_sources: bool = False) -> tuple[Action, ...]:
    """move(d, source, target) for every target larger than d.

    By default the source must also be able to hold d (a larger disk or a
    peg); `all_sources` keeps every source except the target itself.
    """
    n_positions = k + 3
    actions: list[Action] = []
    for d in range(k):
        for source in range(n_positions):
            if not all_sources and source <= d:
                continue
            for target in range(d + 1, n_positions):
                if target == source:
                    continue
                actions.append(move_action(k, d, source, target, len(actions)))
    return tuple(actions)


def _tower_state(k: int, peg: int) -> State:
    """All disks stacked in order on peg (0, 1 or 2)."""
    s = [0] * (2 * k + 3)
    for i in range(k - 1):
        s[i] = i + 1
    s[k - 1] = k + peg
    for x in range(k + 3):
        s[k + x] = F
    s[k + 0] = T
    for p in range(3):
        if p != peg:
            s[2 * k + p] = T
    return tuple(s)


def gen_hanoi(cfg: HanoiConfig) -> PlanningInstance:
    k = cfg.ndisks
    goal = _tower_state(k, 2)
    return PlanningInstance(
        name=f"hanoi-{k}",
        domain="hanoi",
        variables=hanoi_variables(k),
        init=_tower_state(k, 0),
        goal=frozenset(enumerate(goal)),
        actions=hanoi_actions(k, cfg.all_sources),
    )


def hanoi_consistent(s: State) -> bool:
    """Every disk on a larger position, one disk per position, clear flags coherent."""
    k = n_disks(s)
    occupied = [0] * (k + 3)
    for d in range(k):
        if s[d] <= d:
            return False
        occupied[s[d]] += 1
    return all(
        count <= 1 and (s[k + x] == T) == (count == 0)
        for x, count in enumerate(occupied)
    )


def placement_state(k: int, pegs: tuple[int, ...]) -> State:
    """State with disk d on peg pegs[d], stacks ordered by size."""
    s = [0] * (2 * k + 3)
    top_of = [k + p for p in range(3)]
    for x in range(k + 3):
        s[k + x] = T
    for d in reversed(range(k)):
        below = top_of[pegs[d]]
        s[d] = below
        s[k + below] = F
        top_of[pegs[d]] = d
    return tuple(s)


def hanoi_universe(k: int, extra: frozenset[State] = frozenset()) -> Iterator[State]:
    for pegs in product(range(3), repeat=k):
        yield placement_state(k, pegs)
    for s in sorted(extra):
        if not hanoi_consistent(s):
            yield s


def _tower_moves(k: int) -> list[tuple[int, int, int, int]]:
    """(depth, from, to, spare) for every tower move of depth >= 2 the
    recursive solution of the full tower performs, outermost first."""
    seen: list[tuple[int, int, int, int]] = []
    stack = [(k, k, k + 2, k + 1)]
    while stack:
        move = stack.pop()
        i, source, target, spare = move
        if i < 2 or move in seen:
            continue
        seen.append(move)
        stack.append((i - 1, spare, i - 1, source))
        stack.append((i - 1, i - 1, spare, target))
    return seen


def hanoi_scaffold(k: int) -> frozenset[State]:
    """States a depth-k tower move is assembled through.

    Every inner tower move of the recursive solution is replayed from init
    with only the disks it needs relocated: the moved tower's bottom sits on
    its source, the target and spare read clear and every other peg reads
    covered. The three steps (inner tower aside, bottom disk across, inner
    tower back) never leave Hamming distance 6 of init, so a ball of radius
    7 around init keeps each deeper tower move derivable. States that are
    not consistent are only reachable from each other.
    """
    init = _tower_state(k, 0)
    names = position_names(k)
    states: set[State] = set()
    for i, source, target, spare in _tower_moves(k):
        s = list(init)
        s[i - 1] = source
        for peg in (k + 1, k + 2):
            s[k + peg] = F
        s[k + source] = F
        s[k + target] = T
        s[k + spare] = T
        bottom = names[i - 1]
        steps = (
            oracle_subtow_pos(k, i - 1, bottom, names[spare], aux=names[target]),
            move_action(k, i - 1, source, target),
            oracle_subtow_pos(k, i - 1, names[spare], bottom, aux=names[source]),
        )
        chain = [tuple(s)]
        for action in steps:
            if not applicable(action, chain[-1]):
                raise InvariantViolation(f"{action.name} does not apply along the scaffold")
            chain.append(apply_action(chain[-1], action))
        states.update(chain)
    logger.debug(f"Hanoi scaffold for {k} disks holds {len(states)} states")
    return frozenset(states)


def _admissible(scaffold: frozenset[State], s: State) -> bool:
    return hanoi_consistent(s) or s in scaffold


def hanoi_filter(k: int, scaffold: bool = True) -> StateFilter:
    """Consistent states, plus the derivation scaffold unless disabled."""
    if not scaffold:
        return StateFilter(
            mode="predicate",
            name="consistent",
            predicate=hanoi_consistent,
            universe=partial(hanoi_universe, k),
        )
    extra = hanoi_scaffold(k)
    return StateFilter(
        mode="predicate",
        name="consistent",
        predicate=partial(_admissible, extra),
        universe=partial(hanoi_universe, k, extra),
    )


def oracle_subtow_pos(
    k: int,
    i: int,
    x: str,
    x2: str,
    aux: str | None = None,
    bookkeeping: bool = True,
) -> Action:
    """Move the top i disks, resting on position x, onto position x2.

    With `bookkeeping` (and i >= 2) the conditions also carry what every
    move sequence realizing the macro fixes: the auxiliary peg must start
    clear, and each disk d2..di ends covered again. `aux` defaults to the
    peg that is neither x2 nor the one the tower rests on (p1 when x is a
    disk).
    """
    if not 1 <= i <= k:
        raise InputError(f"depth {i} outside 1..{k}", "$.depth")
    source, target = position_index(k, x), position_index(k, x2)
    if source == target:
        raise InputError("source and target positions must differ", "$.position")
    if source < i or target < i:
        raise InputError("positions must be larger than the moved disks", "$.position")
    pre = {k + 0: T, i - 1: source, k + target: T}
    for j in range(i - 1):
        pre[j] = j + 1
    post = {i - 1: target, k + source: T, k + target: F}
    if bookkeeping and i >= 2:
        if aux is None:
            base = x if x in PEGS else "p1"
            spare = [p for p in PEGS if p not in (base, x2)]
            if not spare:
                raise InputError("no auxiliary peg left", "$.position")
            aux = spare[0]
        pre[k + position_index(k, aux)] = T
        for j in range(1, i):
            post[k + j] = F
    pre_set = frozenset(pre.items())
    return Action(
        name=f"subtow-pos-{i}-{x}-{x2}",
        pre=pre_set,
        post=frozenset(post.items()) - pre_set,
    )


def recursive_moves(instance: PlanningInstance, i: int, target_peg: str = "p3") -> list[Action]:
    """The textbook recursive solution moving the top i disks of init.

    The tower must rest on a peg stack in init; moves are resolved to the
    instance's primitive actions by simulating peg contents.
    """
    k = n_disks(instance.init)
    s = instance.init
    pegs: list[list[int]] = [[], [], []]
    for d in reversed(range(k)):
        below = s[d]
        while below < k:
            below = s[below]
        pegs[below - k].append(d)
    # stacks are bottom first; find the peg holding disk i-1
    source = next(p for p in range(3) if (i - 1) in pegs[p])
    target = PEGS.index(target_peg)
    if source == target:
        raise InputError("the tower already rests on the target peg", "$.target")
    aux = 3 - source - target
    moves: list[Action] = []

    def move(depth: int, src: int, dst: int, spare: int):
        if depth == 0:
            return
        move(depth - 1, src, spare, dst)
        d = depth - 1
        pegs[src].pop()
        below = pegs[src][-1] if pegs[src] else k + src
        onto = pegs[dst][-1] if pegs[dst] else k + dst
        moves.append(instance.action_by_name(move_action(k, d, below, onto).name))
        pegs[dst].append(d)
        move(depth - 1, spare, dst, src)

    move(i, source, target, aux)
    return moves


def hanoi_subtow_program(
    instance: PlanningInstance, i: int, target_peg: str = "p3"
) -> tuple[list[State], list[Command]]:
    """Program producing the depth-i tower move along the recursive solution.

    Applies each move at the state it is taken from, then chains the moves
    left to right with transitive commands anchored at init.
    """
    moves = recursive_moves(instance, i, target_peg)
    states = [instance.init]
    for action in moves:
        states.append(apply_action(states[-1], action))
    commands: list[Command] = [
        ApplyCommand(action=action, state=state) for action, state in zip(moves, states)
    ]
    for j in range(1, len(moves)):
        commands.append(TransitiveCommand(s1=states[0], s2=states[j], s3=states[j + 1]))
    return states, commands
