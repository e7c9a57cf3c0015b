import logging
from pathlib import Path

from langchain_core.runnables import RunnableConfig

from spherekde.utils.io_utils import write_frame_atomic, write_text_atomic

logger = logging.getLogger(__name__)


def write_report(report, output) -> list[Path]:
    """JSON report at `output`; the report's table (if any) as a CSV next to it."""
    output = Path(output)
    written = [write_text_atomic(output, report.to_json() + "\n")]
    frame = report.to_frame()
    if frame is not None and not frame.empty:
        written.append(write_frame_atomic(output.with_suffix(".csv"), frame))
    return written


def report_writer_agent(state: dict, config: RunnableConfig | None = None):
    logger.info("🚀 report_writer_agent started")
    report = state.get("report")
    output = state.get("output")
    if report is None:
        logger.error("❌ No report to write")
        return {**state, "error": "No report produced.", "error_code": 1}
    if not output:
        logger.info("✅ No output path; report kept in state only")
        return {**state, "written": [], "status": "completed"}
    try:
        written = write_report(report, output)
    except OSError as e:
        logger.exception("❌ Failed to write report: %s", e)
        return {**state, "error": f"Failed to write report: {e}", "error_code": 2}
    logger.info("💾 Report written to %s", ", ".join(str(p) for p in written))
    return {**state, "written": [str(p) for p in written], "status": "completed"}
