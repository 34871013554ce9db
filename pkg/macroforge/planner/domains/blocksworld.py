"""Blocksworld with an arm.

Variable order is arm, on-b1..on-bn, clear-b1..clear-bn. Value indices:
arm is empty (0) or a block (1 + i); on-b is table (0), arm (1) or a block
(2 + j); clear-b is T (0) or F (1).
"""

import logging
import random
from collections import Counter
from collections.abc import Iterator, Sequence
from functools import partial
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from macroforge.planner.core.action_graph import (
    ApplyCommand,
    Command,
    TransitiveCommand,
)
from macroforge.planner.models.action import Action
from macroforge.planner.models.instance import (
    PartialState,
    PlanningInstance,
    State,
    StateFilter,
    VariableTable,
)
from macroforge.planner.utils.errors import InputError

logger = logging.getLogger(__name__)

ARM = 0
EMPTY = 0
TABLE = 0
ON_ARM = 1
T, F = 0, 1


def on_var(i: int) -> int:
    return 1 + i


def clear_var(n: int, i: int) -> int:
    return 1 + n + i


def on_block(j: int) -> int:
    return 2 + j


def n_blocks(s: State) -> int:
    return (len(s) - 1) // 2


class BlocksworldConfig(BaseModel):
    """Block names plus init and goal layouts (block -> "table" or a block)."""

    blocks: list[str] = Field(min_length=1, description="Block names in order")
    init: dict[str, str] = Field(description="Support of every block not in the arm")
    held: Optional[str] = Field(default=None, description="Block in the arm at init")
    goal: dict[str, str] = Field(description="Support of every block; the goal is total")

    @model_validator(mode="after")
    def _check(self):
        if len(set(self.blocks)) != len(self.blocks):
            raise ValueError("block names must be unique")
        on_table = set(self.blocks) - ({self.held} if self.held else set())
        if self.held is not None and self.held not in self.blocks:
            raise ValueError(f"held block {self.held!r} is not a block")
        _check_layout(self.init, on_table, set(self.blocks), "init")
        _check_layout(self.goal, set(self.blocks), set(self.blocks), "goal")
        return self

    @classmethod
    def from_towers(
        cls, init: Sequence[Sequence[str]], goal: Sequence[Sequence[str]]
    ) -> "BlocksworldConfig":
        """Build from towers listed top block first."""
        blocks = sorted({b for tower in goal for b in tower}, key=_block_order)
        return cls(blocks=blocks, init=_towers_to_layout(init), goal=_towers_to_layout(goal))


def _block_order(name: str):
    digits = name.lstrip("b")
    return (0, int(digits)) if digits.isdigit() else (1, name)


def _towers_to_layout(towers: Sequence[Sequence[str]]) -> dict[str, str]:
    layout = {}
    for tower in towers:
        for upper, lower in zip(tower, tower[1:]):
            layout[upper] = lower
        if tower:
            layout[tower[-1]] = "table"
    return layout


def _check_layout(layout: dict[str, str], placed: set[str], blocks: set[str], what: str):
    if set(layout) != placed:
        missing = sorted(placed - set(layout)) or sorted(set(layout) - placed)
        raise ValueError(f"{what} layout must place exactly the free blocks ({missing[0]!r})")
    counts = Counter(v for v in layout.values() if v != "table")
    for block, support in layout.items():
        if support != "table" and support not in placed:
            raise ValueError(f"{what}: {block!r} sits on unknown or held block {support!r}")
        if support == block:
            raise ValueError(f"{what}: {block!r} sits on itself")
    for support, count in counts.items():
        if count > 1:
            raise ValueError(f"{what}: {count} blocks sit on {support!r}")
    for block in layout:
        seen = set()
        current = block
        while current != "table":
            if current in seen:
                raise ValueError(f"{what}: cyclic support through {block!r}")
            seen.add(current)
            current = layout[current]


def blocksworld_variables(blocks: Sequence[str]) -> VariableTable:
    names = ["arm"] + [f"on-{b}" for b in blocks] + [f"clear-{b}" for b in blocks]
    domains = (
        [("empty", *blocks)]
        + [("table", "arm", *blocks)] * len(blocks)
        + [("T", "F")] * len(blocks)
    )
    return VariableTable(names=tuple(names), domains=tuple(domains))


def blocksworld_actions(blocks: Sequence[str]) -> tuple[Action, ...]:
    """pickup/putdown per block, then unstack/stack per ordered pair."""
    n = len(blocks)
    actions: list[Action] = []

    def add(name: str, pre: dict[int, int], post: dict[int, int]):
        actions.append(
            Action(
                id=len(actions),
                name=name,
                pre=frozenset(pre.items()),
                post=frozenset(post.items()) - frozenset(pre.items()),
            )
        )

    for i, b in enumerate(blocks):
        add(
            f"pickup-{b}",
            {clear_var(n, i): T, on_var(i): TABLE, ARM: EMPTY},
            {clear_var(n, i): F, on_var(i): ON_ARM, ARM: 1 + i},
        )
        add(
            f"putdown-{b}",
            {ARM: 1 + i},
            {ARM: EMPTY, clear_var(n, i): T, on_var(i): TABLE},
        )
    for i, b in enumerate(blocks):
        for j, c in enumerate(blocks):
            if i == j:
                continue
            add(
                f"unstack-{b}-{c}",
                {clear_var(n, i): T, on_var(i): on_block(j), ARM: EMPTY},
                {clear_var(n, i): F, on_var(i): ON_ARM, ARM: 1 + i, clear_var(n, j): T},
            )
            add(
                f"stack-{b}-{c}",
                {ARM: 1 + i, clear_var(n, j): T},
                {ARM: EMPTY, clear_var(n, j): F, clear_var(n, i): T, on_var(i): on_block(j)},
            )
    return tuple(actions)


def towers_state(n: int, towers: Sequence[Sequence[int]], held: int | None = None) -> State:
    """State of blocks arranged in towers (top first) with `held` in the arm."""
    s = [EMPTY] + [TABLE] * n + [F] * n
    if held is not None:
        s[ARM] = 1 + held
        s[on_var(held)] = ON_ARM
    for tower in towers:
        for upper, lower in zip(tower, tower[1:]):
            s[on_var(upper)] = on_block(lower)
        s[on_var(tower[-1])] = TABLE
        s[clear_var(n, tower[0])] = T
    return tuple(s)


def _layout_state(
    blocks: Sequence[str], layout: dict[str, str], held: str | None
) -> State:
    n = len(blocks)
    position = {b: i for i, b in enumerate(blocks)}
    s = [EMPTY] + [TABLE] * n + [T] * n
    for block, support in layout.items():
        i = position[block]
        if support != "table":
            j = position[support]
            s[on_var(i)] = on_block(j)
            s[clear_var(n, j)] = F
    if held is not None:
        i = position[held]
        s[ARM] = 1 + i
        s[on_var(i)] = ON_ARM
        s[clear_var(n, i)] = F
    return tuple(s)


def gen_blocksworld(cfg: BlocksworldConfig, name: str | None = None) -> PlanningInstance:
    goal = _layout_state(cfg.blocks, cfg.goal, None)
    return PlanningInstance(
        name=name or f"blocksworld-{len(cfg.blocks)}",
        domain="blocksworld",
        variables=blocksworld_variables(cfg.blocks),
        init=_layout_state(cfg.blocks, cfg.init, cfg.held),
        goal=frozenset(enumerate(goal)),
        actions=blocksworld_actions(cfg.blocks),
    )


def blocksworld_consistent(s: State) -> bool:
    """Physical coherence of a Blocksworld state.

    clear-b is T exactly when nothing is on b, except for the block in the arm
    which is not clear and carries nothing; the arm and on-b agree; at most
    one block per support; no block (transitively) supports itself.
    """
    n = n_blocks(s)
    held = s[ARM] - 1 if s[ARM] != EMPTY else None
    supports = [s[on_var(i)] for i in range(n)]
    for i, support in enumerate(supports):
        if (support == ON_ARM) != (i == held):
            return False
        if support == on_block(i):
            return False
    carried = Counter(support - 2 for support in supports if support >= 2)
    if any(count > 1 for count in carried.values()):
        return False
    for i in range(n):
        clear = s[clear_var(n, i)] == T
        if i == held:
            if clear or carried[i]:
                return False
        elif clear == bool(carried[i]):
            return False
    for i in range(n):
        current, steps = i, 0
        while supports[current] >= 2:
            current = supports[current] - 2
            steps += 1
            if steps > n:
                return False
    return True


def _arrangements(blocks: Sequence[int]) -> Iterator[list[list[int]]]:
    """Every set of towers over `blocks`, each exactly once."""
    if not blocks:
        yield []
        return
    first, rest = blocks[0], blocks[1:]
    for towers in _arrangements(rest):
        yield [[first], *towers]
        for t, tower in enumerate(towers):
            for position in range(len(tower) + 1):
                grown = towers.copy()
                grown[t] = [*tower[:position], first, *tower[position:]]
                yield grown


def blocksworld_universe(n: int) -> Iterator[State]:
    """All consistent states of n blocks."""
    for held in [None, *range(n)]:
        free = [i for i in range(n) if i != held]
        for towers in _arrangements(free):
            yield towers_state(n, towers, held)


def blocksworld_filter(n: int) -> StateFilter:
    return StateFilter(
        mode="predicate",
        name="consistent",
        predicate=blocksworld_consistent,
        universe=partial(blocksworld_universe, n),
    )


def random_blocksworld(nblocks: int, seed: int) -> PlanningInstance:
    """Random consistent init and total goal, both with an empty arm."""
    if nblocks < 1:
        raise InputError("need at least one block", "$.blocks")
    rng = random.Random(seed)
    blocks = [f"b{i + 1}" for i in range(nblocks)]

    def random_towers() -> list[list[str]]:
        towers: list[list[str]] = []
        for block in rng.sample(blocks, len(blocks)):
            slots = sum(len(t) + 1 for t in towers) + 1
            pick = rng.randrange(slots)
            for tower in towers:
                if pick <= len(tower):
                    tower.insert(pick, block)
                    break
                pick -= len(tower) + 1
            else:
                towers.append([block])
        return towers

    cfg = BlocksworldConfig(
        blocks=blocks,
        init=_towers_to_layout(random_towers()),
        goal=_towers_to_layout(random_towers()),
    )
    return gen_blocksworld(cfg, name=f"blocksworld-{nblocks}-seed{seed}")


class Pile(BaseModel):
    """Blocks stacked one on the next, top first."""

    model_config = ConfigDict(frozen=True)

    blocks: tuple[int, ...] = Field(min_length=1)

    @property
    def top(self) -> int:
        return self.blocks[0]

    @property
    def bottom(self) -> int:
        return self.blocks[-1]

    @property
    def size(self) -> int:
        return len(self.blocks)


def _block_on(s: State, i: int) -> int | None:
    """The block sitting directly on block i."""
    target = on_block(i)
    for j in range(n_blocks(s)):
        if s[on_var(j)] == target:
            return j
    return None


def pile_above(s: State, b: int) -> Pile | None:
    """The sub-tower stacked on b, or None when b carries nothing."""
    above: list[int] = []
    current = _block_on(s, b)
    while current is not None:
        above.append(current)
        current = _block_on(s, current)
    return Pile(blocks=tuple(reversed(above))) if above else None


def pile_from(s: State, b: int) -> Pile:
    """The sub-tower whose bottom is b."""
    above = pile_above(s, b)
    return Pile(blocks=(*above.blocks, b) if above else (b,))


def pile_below(s: State, b: int) -> Pile | None:
    """The blocks supporting b, nearest first, or None when b is not on a block."""
    below: list[int] = []
    support = s[on_var(b)]
    while support >= 2:
        below.append(support - 2)
        support = s[on_var(support - 2)]
        if len(below) > n_blocks(s):
            raise InputError("cyclic support", "$.state")
    return Pile(blocks=tuple(below)) if below else None


def pile_to(s: State, b: int) -> Pile:
    below = pile_below(s, b)
    return Pile(blocks=(b, *below.blocks) if below else (b,))


def is_pile(s: State, pile: Pile) -> bool:
    return all(
        s[on_var(upper)] == on_block(lower)
        for upper, lower in zip(pile.blocks, pile.blocks[1:])
    )


def is_sub_tower(s: State, pile: Pile) -> bool:
    return is_pile(s, pile) and s[clear_var(n_blocks(s), pile.top)] == T


def is_tower(s: State, pile: Pile) -> bool:
    return is_sub_tower(s, pile) and s[on_var(pile.bottom)] == TABLE


def _pile_conditions(
    n: int, pile: Pile, others: Sequence[int], bookkeeping: bool
) -> tuple[dict[int, int], dict[int, int]]:
    blocks = pile.blocks
    if len(set(blocks)) != len(blocks):
        raise InputError("pile repeats a block", "$.pile")
    for b in (*blocks, *others):
        if not 0 <= b < n:
            raise InputError(f"unknown block index {b}", "$.pile")
    for b in others:
        if b in blocks:
            raise InputError(f"block {b} belongs to the pile", "$.pile")
    if len(set(others)) != len(others):
        raise InputError("source and destination must differ", "$.pile")
    pre = {clear_var(n, pile.top): T, ARM: EMPTY}
    for upper, lower in zip(blocks, blocks[1:]):
        pre[on_var(upper)] = on_block(lower)
    # every block under the top is uncovered and covered again on the way
    post = {clear_var(n, b): F for b in blocks[1:]} if bookkeeping else {}
    return pre, post


def _action(name: str, pre: dict[int, int], post: dict[int, int]) -> Action:
    pre_set: PartialState = frozenset(pre.items())
    return Action(name=name, pre=pre_set, post=frozenset(post.items()) - pre_set)


def oracle_subtow_table(n: int, pile: Pile, b: int, bookkeeping: bool = True) -> Action:
    """Move the sub-tower `pile` from block b to the table.

    With `bookkeeping` the postcondition also carries clear=F for the pile
    members below the top: any move sequence realizing the macro fixes them.
    """
    pre, post = _pile_conditions(n, pile, [b], bookkeeping)
    pre[on_var(pile.bottom)] = on_block(b)
    post.update({on_var(pile.bottom): TABLE, clear_var(n, b): T})
    return _action(f"subtow-table-{pile.size}", pre, post)


def oracle_subtow_block(
    n: int, pile: Pile, b: int, b2: int, bookkeeping: bool = True
) -> Action:
    """Move the sub-tower `pile` from block b onto block b2."""
    pre, post = _pile_conditions(n, pile, [b, b2], bookkeeping)
    pre.update({on_var(pile.bottom): on_block(b), clear_var(n, b2): T})
    post.update(
        {on_var(pile.bottom): on_block(b2), clear_var(n, b): T, clear_var(n, b2): F}
    )
    return _action(f"subtow-block-{pile.size}", pre, post)


def oracle_tow_block(n: int, pile: Pile, b2: int, bookkeeping: bool = True) -> Action:
    """Move the tower `pile` from the table onto block b2."""
    pre, post = _pile_conditions(n, pile, [b2], bookkeeping)
    pre.update({on_var(pile.bottom): TABLE, clear_var(n, b2): T})
    post.update({on_var(pile.bottom): on_block(b2), clear_var(n, b2): F})
    return _action(f"tow-block-{pile.size}", pre, post)


def example_program() -> tuple[PlanningInstance, list[State], list[Command]]:
    """Two blocks, three states and four commands.

    s1 has b1 on b2, s2 has b1 in the arm, s3 has both on the table. The
    program unstacks, tries a no-op pickup, puts down, then chains the two.
    """
    cfg = BlocksworldConfig.from_towers(init=[["b1", "b2"]], goal=[["b1"], ["b2"]])
    instance = gen_blocksworld(cfg)
    s1 = towers_state(2, [[0, 1]])
    s2 = towers_state(2, [[1]], held=0)
    s3 = towers_state(2, [[0], [1]])
    commands: list[Command] = [
        ApplyCommand(action=instance.action_by_name("unstack-b1-b2"), state=s1),
        ApplyCommand(action=instance.action_by_name("pickup-b2"), state=s2),
        ApplyCommand(action=instance.action_by_name("putdown-b1"), state=s2),
        TransitiveCommand(s1=s1, s2=s2, s3=s3),
    ]
    return instance, [s1, s2, s3], commands
