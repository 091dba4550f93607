from .harness import (
    DEFAULT_MEMORY_MB,
    DEFAULT_TIMEOUT_S,
    FALLBACK_NAMES,
    Outcome,
    STATUS_CRASH,
    STATUS_NO_OUTPUT,
    STATUS_OK,
    STATUS_TIMEOUT,
    run_program,
    wrap_program,
)

__all__ = [
    "DEFAULT_MEMORY_MB",
    "DEFAULT_TIMEOUT_S",
    "FALLBACK_NAMES",
    "Outcome",
    "STATUS_CRASH",
    "STATUS_NO_OUTPUT",
    "STATUS_OK",
    "STATUS_TIMEOUT",
    "run_program",
    "wrap_program",
]
