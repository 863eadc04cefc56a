# app/core/reporting.py
from __future__ import annotations

from typing import Optional

import sentry_sdk

from app.core.errors import HabCoverageError
from app.core.logging import get_logger
from app.settings import Settings, get_settings

log = get_logger("hab-coverage.reporting")

_initialized = False


def init_error_reporting(settings: Optional[Settings] = None) -> bool:
    """Initialize Sentry when a DSN is configured; returns whether reporting is active."""
    global _initialized
    s = settings or get_settings()
    if not s.HABCOV_SENTRY_DSN:
        log.debug("Sentry disabled (HABCOV_SENTRY_DSN empty).")
        return False
    if not _initialized:
        sentry_sdk.init(
            dsn=s.HABCOV_SENTRY_DSN,
            environment=s.HABCOV_ENVIRONMENT,
            release=str(s.HABCOV_BUILD_VERSION),
            traces_sample_rate=0,
        )
        _initialized = True
        log.info("Sentry initialized.")
    return True


def report_error(exc: BaseException) -> None:
    if not _initialized:
        return
    with sentry_sdk.push_scope() as scope:
        if isinstance(exc, HabCoverageError):
            scope.set_tag("error_code", exc.error_code)
            scope.set_context("detail", exc.detail)
        sentry_sdk.capture_exception(exc)
