from typing import Literal

from langgraph.graph import END, START, StateGraph

from macroforge.planner.models.state import SolverState
from macroforge.planner.nodes.check_goal import check_goal
from macroforge.planner.nodes.expand_neighbourhood import expand_neighbourhood
from macroforge.planner.nodes.select_improvement import select_improvement


def route_on_status(state: SolverState) -> Literal["END", "continue"]:
    if state.status != "running" or len(state.error_message) != 0:
        return "END"
    return "continue"


# define nodes and edges
workflow = StateGraph(SolverState)

workflow.add_node("check_goal", check_goal)
workflow.add_node("expand_neighbourhood", expand_neighbourhood)
workflow.add_node("select_improvement", select_improvement)

workflow.add_edge(START, "check_goal")
workflow.add_conditional_edges(
    "check_goal", route_on_status, {"END": END, "continue": "expand_neighbourhood"}
)
workflow.add_conditional_edges(
    "expand_neighbourhood",
    route_on_status,
    {"END": END, "continue": "select_improvement"},
)
workflow.add_conditional_edges(
    "select_improvement", route_on_status, {"END": END, "continue": "check_goal"}
)

graph = workflow.compile()


def recursion_limit(state: SolverState) -> int:
    """Three node visits per iteration; wrong goal variables shrink every time."""
    return 3 * (len(state.instance.goal) + 1) + 10
