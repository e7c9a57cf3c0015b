from typing import Any, List, Optional, TypedDict

from spherekde.schemas import BenchConfig


class BenchState(TypedDict, total=False):
    """
    State of the bench pipeline.
    Shared and modified by all agents.
    """
    config_path: Optional[str]           # JSON config file (read by the config loader)
    config: Optional[BenchConfig]        # Validated config (may be passed in directly)
    output: Optional[str]                # JSON report path; CSV sibling goes next to it
    report: Optional[Any]                # MiseReport | LambdaSweepReport | ... (set by the experiment agent)
    written: Optional[List[str]]         # Files written by the report writer
    error: Optional[str]                 # Error detail from any agent
    error_code: Optional[int]            # Exit code of that error
    status: Optional[str]                # "completed" | "failed"
