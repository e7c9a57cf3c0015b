# spherekde/config.py
# Environment-driven settings and logging setup.

import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from spherekde.errors import ConfigurationError

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


@dataclass(frozen=True)
class Settings:
    threads: int | None
    log_level: str
    quad_nt: int
    quad_nphi: int
    mesh_ntheta: int
    mesh_nphi: int


def _env_int(name: str, default: int | None, minimum: int = 1) -> int | None:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read settings from the environment (after .env is loaded)."""
    return Settings(
        threads=_env_int("SPHEREKDE_THREADS", None),
        log_level=os.getenv("SPHEREKDE_LOG_LEVEL", "INFO").upper(),
        quad_nt=_env_int("SPHEREKDE_QUAD_NT", 64, minimum=2),
        quad_nphi=_env_int("SPHEREKDE_QUAD_NPHI", 64, minimum=2),
        mesh_ntheta=_env_int("SPHEREKDE_MESH_NTHETA", 181, minimum=2),
        mesh_nphi=_env_int("SPHEREKDE_MESH_NPHI", 360, minimum=1),
    )


def resolve_workers(requested: int | None = None) -> int:
    """Worker count for joblib, capped by SPHEREKDE_THREADS when it is set."""
    cap = get_settings().threads
    if requested is None:
        return cap if cap is not None else -1
    if requested < 1:
        raise ConfigurationError(f"workers must be >= 1, got {requested}")
    return min(requested, cap) if cap is not None else requested


def configure_logging(level: str | None = None) -> None:
    level_name = (level or get_settings().log_level).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT)
    logger.debug("Logging configured at %s", level_name)
