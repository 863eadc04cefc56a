from __future__ import annotations

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv()


def _env_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "y", "on"}


class Settings(BaseSettings):
    """Process-level settings. Experiment parameters live in RunConfig, not here."""

    HABCOV_BUILD_VERSION: str = os.getenv("HABCOV_BUILD_VERSION", "1.0.0")
    HABCOV_ENVIRONMENT: str = os.getenv("HABCOV_ENVIRONMENT", "dev")
    HABCOV_LOG_LEVEL: str = os.getenv("HABCOV_LOG_LEVEL", "INFO")

    # Sentry
    HABCOV_SENTRY_DSN: Optional[str] = os.getenv("HABCOV_SENTRY_DSN")

    # Torch runtime; one thread keeps CPU runs bit-reproducible
    HABCOV_TORCH_THREADS: int = int(os.getenv("HABCOV_TORCH_THREADS", "1"))
    HABCOV_DEVICE: str = os.getenv("HABCOV_DEVICE", "cpu")

    # Default output root when --out is not given
    HABCOV_OUTPUT_DIR: str = os.getenv("HABCOV_OUTPUT_DIR", "runs")

    # Optional experiment config file used when --config is absent
    HABCOV_CONFIG: Optional[str] = os.getenv("HABCOV_CONFIG")

    HABCOV_RUN_SLOW_TESTS: bool = _env_bool("HABCOV_RUN_SLOW_TESTS", False)


@lru_cache()
def get_settings() -> Settings:
    return Settings()
