import logging
from typing import Any, Dict

from langchain_core.runnables import RunnableConfig

logger = logging.getLogger(__name__)


def fallback_agent(state: dict, config: RunnableConfig | None = None) -> Dict[str, Any]:
    """
    Terminal node for any failed step. Keeps the upstream error and its exit
    code, or records a generic one when the mode could not be routed.
    """
    existing_error = state.get("error")
    if existing_error:
        detail = existing_error
    else:
        mode = getattr(state.get("config"), "mode", None)
        detail = f"Could not route bench mode {mode!r}."

    logger.error("❌ Bench pipeline failed: %s", detail)
    return {
        **state,
        "error": detail,
        "error_code": state.get("error_code") or 1,
        "status": "failed",
    }
