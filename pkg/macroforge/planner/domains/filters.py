from macroforge.planner.domains.blocksworld import blocksworld_filter, n_blocks
from macroforge.planner.domains.hanoi import hanoi_filter, n_disks
from macroforge.planner.models.instance import NO_FILTER, PlanningInstance, StateFilter
from macroforge.planner.utils.errors import InputError

FILTER_NAMES = ("none", "consistent")


def state_filter_for(instance: PlanningInstance, name: str) -> StateFilter:
    """Resolve a filter name against the instance's domain."""
    if name == "none":
        return NO_FILTER
    if name != "consistent":
        raise InputError(f"unknown filter {name!r}", "$.filter")
    match instance.domain:
        case "blocksworld":
            return blocksworld_filter(n_blocks(instance.init))
        case "hanoi":
            return hanoi_filter(n_disks(instance.init))
    raise InputError(
        "the consistent filter needs a blocksworld or hanoi instance", "$.domain"
    )
