import logging
from typing import Callable

from langchain_core.runnables import RunnableConfig

from spherekde.bench import experiments
from spherekde.errors import SphereKDEError

logger = logging.getLogger(__name__)


def _workers(config: RunnableConfig | None):
    return ((config or {}).get("configurable") or {}).get("workers")


def _run(name: str, state: dict, runner: Callable):
    logger.info("🚀 %s started", name)
    bench_config = state.get("config")
    if bench_config is None:
        logger.error("❌ %s: no config in state", name)
        return {**state, "error": "No bench config in state.", "error_code": 2}
    try:
        report = runner(bench_config)
    except SphereKDEError as e:
        logger.error("❌ %s failed: %s", name, e.detail)
        return {**state, "error": e.detail, "error_code": e.exit_code}
    logger.info("✅ %s complete", name)
    return {**state, "report": report}


def mise_agent(state: dict, config: RunnableConfig | None = None):
    return _run("mise_agent", state, lambda c: experiments.run_mise(c, workers=_workers(config)))


def lambda_sweep_agent(state: dict, config: RunnableConfig | None = None):
    return _run("lambda_sweep_agent", state, lambda c: experiments.lambda_sweep(c, workers=_workers(config)))


def risk_curves_agent(state: dict, config: RunnableConfig | None = None):
    return _run("risk_curves_agent", state, experiments.risk_curves)


def reconstruction_agent(state: dict, config: RunnableConfig | None = None):
    return _run("reconstruction_agent", state, experiments.reconstruction)


def rate_agent(state: dict, config: RunnableConfig | None = None):
    return _run("rate_agent", state, lambda c: experiments.rate_sweep(c, workers=_workers(config)))
