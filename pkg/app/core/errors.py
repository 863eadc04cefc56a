# app/core/errors.py
"""
Error contract for hab-coverage.

Every failure raised by the package carries a stable ``error_code`` and a human
readable ``message``; ``detail`` returns the same ``{"error_code", "message", ...}``
body shape the CLI logs and reports.
"""

from __future__ import annotations

from typing import Any, Dict


class HabCoverageError(Exception):
    error_code: str = "HAB_COVERAGE_ERROR"
    exit_code: int = 1

    def __init__(self, message: str, *, error_code: str | None = None, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        if error_code:
            self.error_code = error_code
        self.context: Dict[str, Any] = context

    @property
    def detail(self) -> Dict[str, Any]:
        body: Dict[str, Any] = {"error_code": self.error_code, "message": self.message}
        body.update({k: v for k, v in self.context.items() if v is not None})
        return body

    def __str__(self) -> str:
        return self.message


class WindDomainError(HabCoverageError):
    error_code = "WIND_DOMAIN"


class WindParseError(HabCoverageError):
    error_code = "WIND_PARSE"

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None) -> None:
        where = f"line {line}" if line is not None else "file"
        if field:
            where += f", field '{field}'"
        super().__init__(f"{where}: {message}", line=line, field=field)
        self.line = line
        self.field = field


class UsageError(HabCoverageError):
    error_code = "USAGE"


class ConfigError(HabCoverageError):
    error_code = "CONFIG"

    def __init__(self, message: str, *, key: str | None = None) -> None:
        super().__init__(message, key=key)
        self.key = key


class TraceParseError(HabCoverageError):
    error_code = "TRACE_PARSE"

    def __init__(self, message: str, *, line: int | None = None) -> None:
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message, line=line)
        self.line = line


class CheckpointError(HabCoverageError):
    error_code = "CHECKPOINT"

    def __init__(self, message: str, *, expected: Any = None, found: Any = None) -> None:
        super().__init__(message, expected=expected, found=found)
        self.expected = expected
        self.found = found


class VerificationError(HabCoverageError):
    error_code = "VERIFICATION_FAILED"
    exit_code = 2

    def __init__(
        self, message: str, *, step: int | None = None, agent_id: int | None = None
    ) -> None:
        super().__init__(message, step=step, agent_id=agent_id)
        self.step = step
        self.agent_id = agent_id
