import json

import pytest

from macroforge.planner.core.macro_engine import compute_macros
from macroforge.planner.core.state_space import ball
from macroforge.planner.domains.hanoi import hanoi_filter
from macroforge.planner.models.documents import MacroResultDocument, PlanDocument
from macroforge.planner.solver.expansion import plan_length
from macroforge.planner.solver.solve import solve_mph
from macroforge.planner.solver.validate import validate
from macroforge.planner.utils.errors import InputError
from macroforge.planner.utils.serialization import (
    dump_instance,
    dump_macro_result,
    dump_plan,
    load_document,
    parse_instance,
    parse_plan,
    plan_from_document,
)

MINIMAL = {"variables": [{"name": "v", "domain": ["a", "b"]}], "init": {"v": "a"}}


def test_minimal_document():
    instance = parse_instance(json.dumps(MINIMAL))
    assert instance.init == (0,)
    assert instance.goal == frozenset()
    assert instance.actions == ()


def test_instance_round_trip(hanoi2):
    text = dump_instance(hanoi2)
    assert parse_instance(text) == hanoi2
    assert dump_instance(parse_instance(text)) == text
    assert json.loads(text)["format"] == "macroforge-instance/1"


def test_serialization_ignores_input_key_order(bw2):
    document = json.loads(dump_instance(bw2))
    shuffled = dict(reversed(list(document.items())))
    assert dump_instance(parse_instance(json.dumps(shuffled))) == dump_instance(bw2)


@pytest.mark.parametrize(
    "document, where",
    [
        ({**MINIMAL, "init": {}}, "'v'"),
        ({**MINIMAL, "goal": {"v": "c"}}, "$.goal.v"),
        ({**MINIMAL, "actions": [{"name": "x", "pre": {"w": "a"}}]}, "$.actions[0].pre.w"),
        ({**MINIMAL, "format": "something-else/2"}, "$.format"),
        ({**MINIMAL, "variables": [{"name": "v", "domain": []}]}, "$.variables[0].domain"),
    ],
)
def test_bad_instances_name_the_location(document, where):
    with pytest.raises(InputError) as info:
        parse_instance(json.dumps(document))
    assert where in str(info.value)


def test_not_json():
    with pytest.raises(InputError, match="not valid JSON"):
        parse_instance("{")


def test_plan_round_trip(hanoi3):
    outcome = solve_mph(hanoi3, 7, hanoi_filter(3))
    text = dump_plan(outcome.plan, hanoi3)
    assert dump_plan(outcome.plan, hanoi3) == text
    document = parse_plan(text)
    assert plan_length(document.top, document) == 7
    plan = plan_from_document(document, hanoi3)
    assert plan.top == outcome.plan.top
    assert plan.trace == outcome.plan.trace
    assert validate(hanoi3, plan, strict=True)


def test_plan_documents_declare_children_first():
    entries = [
        {"id": 0, "name": "a"},
        {"id": 2, "name": "m", "derivation": [0, 1]},
        {"id": 1, "name": "b"},
    ]
    with pytest.raises(InputError, match="not declared before"):
        load_document(json.dumps({"actions": entries, "top": [2]}), PlanDocument)
    with pytest.raises(InputError, match="top-level id 5"):
        load_document(json.dumps({"actions": entries[:1], "top": [5]}), PlanDocument)


def test_macro_result_document(hanoi2):
    states = ball(hanoi2, hanoi2.init, 7, hanoi_filter(2))
    result = compute_macros(states, hanoi2.actions)
    document = load_document(dump_macro_result(result, hanoi2), MacroResultDocument)
    assert len(document.states) == 9
    assert len(document.edges) == result.graph.edge_count
    declared = {entry.id for entry in document.actions}
    assert {edge.action for edge in document.edges} <= declared
    assert all(set(entry.derivation) <= declared for entry in document.actions if entry.derivation)
    assert {record.parent for record in document.log} <= declared
