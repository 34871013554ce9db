import json
import logging
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from macroforge.planner.core.algebra import normalize
from macroforge.planner.core.library import MacroLibrary
from macroforge.planner.core.macro_engine import MacroResult
from macroforge.planner.core.state_space import (
    partial_from_mapping,
    partial_to_mapping,
    state_from_mapping,
)
from macroforge.planner.models.action import Action
from macroforge.planner.models.documents import (
    ActionDocument,
    DerivationDocument,
    EdgeDocument,
    InstanceDocument,
    MacroResultDocument,
    PlanDocument,
    RegistryEntry,
    VariableDocument,
)
from macroforge.planner.models.instance import PlanningInstance, VariableTable
from macroforge.planner.models.plan import SuccinctPlan
from macroforge.planner.utils.errors import InputError

logger = logging.getLogger(__name__)

Document = TypeVar("Document", bound=BaseModel)


def canonical_json(document: BaseModel) -> str:
    """Sorted keys and fixed indentation: equal documents give equal bytes."""
    payload = document.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _json_path(loc: tuple) -> str:
    path = "$"
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def load_document(data: str | bytes, model: type[Document]) -> Document:
    try:
        payload = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InputError(f"not valid JSON: {e}") from e
    try:
        return model.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        raise InputError(first["msg"], _json_path(first["loc"])) from e


def instance_from_document(document: InstanceDocument) -> PlanningInstance:
    try:
        table = VariableTable(
            names=tuple(v.name for v in document.variables),
            domains=tuple(tuple(v.domain) for v in document.variables),
        )
    except ValidationError as e:
        raise InputError(e.errors()[0]["msg"], "$.variables") from e
    actions = []
    for position, entry in enumerate(document.actions):
        path = f"$.actions[{position}]"
        actions.append(
            normalize(
                Action(
                    id=position,
                    name=entry.name,
                    pre=partial_from_mapping(table, entry.pre, f"{path}.pre"),
                    post=partial_from_mapping(table, entry.post, f"{path}.post"),
                )
            )
        )
    try:
        return PlanningInstance(
            name=document.name,
            domain=document.domain,
            variables=table,
            init=state_from_mapping(table, document.init, "$.init"),
            goal=partial_from_mapping(table, document.goal, "$.goal"),
            actions=tuple(actions),
        )
    except ValidationError as e:
        raise InputError(e.errors()[0]["msg"]) from e


def parse_instance(data: str | bytes) -> PlanningInstance:
    return instance_from_document(load_document(data, InstanceDocument))


def instance_to_document(instance: PlanningInstance) -> InstanceDocument:
    table = instance.variables
    return InstanceDocument(
        name=instance.name,
        domain=instance.domain,
        variables=[
            VariableDocument(name=name, domain=list(domain))
            for name, domain in zip(table.names, table.domains)
        ],
        init={table.names[v]: table.domains[v][x] for v, x in enumerate(instance.init)},
        goal=partial_to_mapping(table, instance.goal),
        actions=[
            ActionDocument(
                name=action.name,
                pre=partial_to_mapping(table, action.pre),
                post=partial_to_mapping(table, action.post),
            )
            for action in instance.actions
        ],
    )


def dump_instance(instance: PlanningInstance) -> str:
    return canonical_json(instance_to_document(instance))


def _registry(table: VariableTable, library: MacroLibrary, ids) -> list[RegistryEntry]:
    entries = []
    for action_id in ids:
        action = library[action_id]
        entries.append(
            RegistryEntry(
                id=action_id,
                name=action.name,
                pre=partial_to_mapping(table, action.pre),
                post=partial_to_mapping(table, action.post),
                derivation=action.derivation,
            )
        )
    return entries


def plan_to_document(plan: SuccinctPlan, instance: PlanningInstance) -> PlanDocument:
    return PlanDocument(
        instance=instance.name,
        actions=_registry(instance.variables, plan.library, sorted(plan.library.ids())),
        top=list(plan.top),
        trace=[list(s) for s in plan.trace],
    )


def dump_plan(plan: SuccinctPlan, instance: PlanningInstance) -> str:
    return canonical_json(plan_to_document(plan, instance))


def parse_plan(data: str | bytes) -> PlanDocument:
    return load_document(data, PlanDocument)


def plan_from_document(document: PlanDocument, instance: PlanningInstance) -> SuccinctPlan:
    """Rebuild the index-based plan; the instance resolves variable names."""
    library = MacroLibrary()
    table = instance.variables
    for position, entry in enumerate(document.actions):
        path = f"$.actions[{position}]"
        library.adopt(
            normalize(
                Action(
                    id=entry.id,
                    name=entry.name,
                    pre=partial_from_mapping(table, entry.pre, f"{path}.pre"),
                    post=partial_from_mapping(table, entry.post, f"{path}.post"),
                    derivation=entry.derivation,
                )
            )
        )
    return SuccinctPlan(
        library=library,
        top=list(document.top),
        trace=[tuple(s) for s in document.trace],
    )


def macro_result_to_document(
    result: MacroResult, instance: PlanningInstance
) -> MacroResultDocument:
    graph = result.graph
    library = result.library
    referenced = library.closure([*result.base, *graph.label_ids()])
    kept = set(referenced)
    return MacroResultDocument(
        instance=instance.name,
        states=[list(s) for s in graph.states],
        actions=_registry(instance.variables, library, sorted(referenced)),
        log=[
            DerivationDocument(parent=r.parent, left=r.left, right=r.right)
            for r in library.log
            if r.parent in kept
        ],
        edges=[EdgeDocument(source=u, target=v, action=a) for u, v, a in graph.edges()],
        stats=result.stats.model_dump(),
    )


def dump_macro_result(result: MacroResult, instance: PlanningInstance) -> str:
    return canonical_json(macro_result_to_document(result, instance))
