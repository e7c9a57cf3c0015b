import json
import logging
from pathlib import Path

from langchain_core.runnables import RunnableConfig
from pydantic import ValidationError

from spherekde.errors import InputFormatError
from spherekde.schemas import BenchConfig

logger = logging.getLogger(__name__)


def _field_path(error: dict) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def load_bench_config(path) -> BenchConfig:
    """Parse and validate a bench config file; errors name the offending field."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputFormatError(f"{path}: no such config file")
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}")
    try:
        return BenchConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise InputFormatError(f"{path}: invalid field {_field_path(first)}: {first['msg']}")


def config_loader_agent(state: dict, config: RunnableConfig | None = None):
    """
    Load the BenchConfig from state["config_path"] unless one is already in state.
    """
    logger.info("🚀 config_loader_agent started")
    if state.get("config") is not None:
        logger.info("✅ Using config passed in state (mode=%s)", state["config"].mode)
        return state

    path = state.get("config_path")
    if not path:
        logger.error("❌ No config path in state")
        return {**state, "error": "No bench config given.", "error_code": InputFormatError.exit_code}
    try:
        bench_config = load_bench_config(path)
    except InputFormatError as e:
        logger.error("❌ %s", e.detail)
        return {**state, "error": e.detail, "error_code": e.exit_code}

    logger.info("✅ Loaded %s (mode=%s, n=%d, reps=%d)", path, bench_config.mode, bench_config.n, bench_config.reps)
    return {**state, "config": bench_config}
