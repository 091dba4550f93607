"""Client side of program execution.

Generated programs never run inside this process. They are handed to an
external harness over a one-shot child-process protocol: program text on
stdin, one JSON outcome object on stdout. Any protocol failure (missing
harness, bad JSON, harness hang) degrades to a crash outcome so a broken
runner can never take down a solve run.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass
from typing import Protocol

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_CRASH = "crash"
STATUS_NO_OUTPUT = "no_output"
STATUSES = (STATUS_OK, STATUS_TIMEOUT, STATUS_CRASH, STATUS_NO_OUTPUT)

# extra wall-clock budget for the harness process itself, beyond the
# program timeout it enforces internally
HARNESS_GRACE_S = 5.0


@dataclass(frozen=True)
class ExecutionOutcome:
    status: str
    stdout_last_line: str = ""
    duration_ms: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown execution status {self.status!r}")
        if self.status == STATUS_OK and not self.stdout_last_line:
            raise ValueError("ok outcomes must carry a non-empty stdout line")


class ProgramRunner(Protocol):
    def run_program(self, program: str, timeout_s: float) -> ExecutionOutcome: ...


class ChildProcessRunner:
    """Runs each program through one harness child process."""

    def __init__(
        self,
        cmd: str = "python3 -m sandbox_harness",
        memory_mb: int = 256,
        grace_s: float = HARNESS_GRACE_S,
    ):
        self.argv = shlex.split(cmd)
        if not self.argv:
            raise ValueError("empty harness command")
        self.memory_mb = memory_mb
        self.grace_s = grace_s

    def run_program(self, program: str, timeout_s: float) -> ExecutionOutcome:
        if not program.strip():
            raise ValueError("program must be non-empty")
        argv = self.argv + [
            "--timeout-s",
            str(timeout_s),
            "--memory-mb",
            str(self.memory_mb),
        ]
        try:
            proc = subprocess.run(
                argv,
                input=program.encode("utf-8"),
                capture_output=True,
                timeout=timeout_s + self.grace_s,
            )
        except (OSError, subprocess.TimeoutExpired, subprocess.SubprocessError):
            return ExecutionOutcome(status=STATUS_CRASH)
        if proc.returncode != 0:
            return ExecutionOutcome(status=STATUS_CRASH)
        return parse_outcome(proc.stdout.decode("utf-8", errors="replace"))


def parse_outcome(stdout_text: str) -> ExecutionOutcome:
    """Decode the harness's JSON outcome; malformed output becomes a crash."""
    lines = [line for line in stdout_text.splitlines() if line.strip()]
    if not lines:
        return ExecutionOutcome(status=STATUS_CRASH)
    try:
        obj = json.loads(lines[-1])
        outcome = ExecutionOutcome(
            status=str(obj["status"]),
            stdout_last_line=str(obj.get("stdout_last_line", "")),
            duration_ms=int(obj.get("duration_ms", 0)),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return ExecutionOutcome(status=STATUS_CRASH)
    return outcome
