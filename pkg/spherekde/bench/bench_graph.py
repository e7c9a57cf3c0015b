import logging

from langgraph.graph import END, START, StateGraph

from spherekde.bench.config_agent import config_loader_agent
from spherekde.bench.experiment_agents import (
    lambda_sweep_agent,
    mise_agent,
    rate_agent,
    reconstruction_agent,
    risk_curves_agent,
)
from spherekde.bench.fallback_agent import fallback_agent
from spherekde.bench.report_agent import report_writer_agent
from spherekde.bench.state import BenchState

logger = logging.getLogger(__name__)

MODE_NODES = {
    "mise": "run_mise",
    "lambda-sweep": "lambda_sweep",
    "risk-curves": "risk_curves",
    "reconstruction": "reconstruction",
    "rate": "rate",
}


# ---------------------------
# Conditional routing
# ---------------------------
def route_mode(state: BenchState) -> str:
    bench_config = state.get("config")
    mode = getattr(bench_config, "mode", None)
    logger.info(f"🔍 route_mode called - mode: {mode}")

    if state.get("error") or mode not in MODE_NODES:
        logger.info("❌ Routing to fallback")
        return "fallback"
    logger.info(f"✅ Routing to {MODE_NODES[mode]}")
    return MODE_NODES[mode]


def route_result(state: BenchState) -> str:
    return "fallback" if state.get("error") else "write_report"


# ---------------------------
# Build the graph
# ---------------------------
def build_bench_graph():
    workflow = StateGraph(BenchState)

    workflow.add_node("load_config", config_loader_agent)
    workflow.add_node("run_mise", mise_agent)
    workflow.add_node("lambda_sweep", lambda_sweep_agent)
    workflow.add_node("risk_curves", risk_curves_agent)
    workflow.add_node("reconstruction", reconstruction_agent)
    workflow.add_node("rate", rate_agent)
    workflow.add_node("write_report", report_writer_agent)
    workflow.add_node("fallback", fallback_agent)

    workflow.add_edge(START, "load_config")
    workflow.add_conditional_edges(
        "load_config",
        route_mode,
        {**{node: node for node in MODE_NODES.values()}, "fallback": "fallback"},
    )
    for node in MODE_NODES.values():
        workflow.add_conditional_edges(
            node, route_result, {"write_report": "write_report", "fallback": "fallback"}
        )
    workflow.add_conditional_edges(
        "write_report", lambda state: "fallback" if state.get("error") else "done", {"fallback": "fallback", "done": END}
    )
    workflow.add_edge("fallback", END)

    return workflow.compile()


def run_bench(config_path=None, output=None, bench_config=None, workers: int | None = None) -> BenchState:
    """Run the bench pipeline once and return its final state."""
    graph = build_bench_graph()
    initial: BenchState = {
        "config_path": str(config_path) if config_path is not None else None,
        "config": bench_config,
        "output": str(output) if output is not None else None,
        "error": None,
        "error_code": None,
    }
    return graph.invoke(initial, config={"configurable": {"workers": workers}})
