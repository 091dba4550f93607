"""Isolated execution of one generated Python program.

Each call starts a fresh interpreter in its own process group with CPU
and address-space limits applied before the program runs; the last
non-empty stdout line is the reported answer. This is subprocess
isolation against buggy generated code, not a security jail: limits stop
runaway loops, runaway allocation, fork storms, and oversized writes,
nothing more.
"""

from __future__ import annotations

import math
import os
import re
import resource
import signal
import subprocess
import sys
import time
from dataclasses import dataclass

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_CRASH = "crash"
STATUS_NO_OUTPUT = "no_output"

DEFAULT_TIMEOUT_S = 10.0
DEFAULT_MEMORY_MB = 256

# kept small; the programs under test are single-interpreter affairs
MAX_CHILD_PROCS = 16
MAX_FILE_BYTES = 8 * 1024 * 1024

# A program that never prints may still leave its answer in a variable.
# The fallback footer prints the first of these names it finds; a program
# containing any print call is left untouched.
FALLBACK_NAMES = ("result", "answer", "ans")

_PRINT_CALL = re.compile(r"\bprint\s*\(")

_FALLBACK_FOOTER = "\n" + "\n".join(
    [
        f"for _fallback_name in {FALLBACK_NAMES!r}:",
        "    if _fallback_name in globals():",
        "        print(globals()[_fallback_name])",
        "        break",
    ]
)


@dataclass(frozen=True)
class Outcome:
    """What one program run produced."""

    status: str
    stdout_last_line: str = ""
    duration_ms: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "stdout_last_line": self.stdout_last_line,
            "duration_ms": self.duration_ms,
        }


def wrap_program(program: str) -> str:
    """Append the fallback-print footer when the program never prints."""
    if _PRINT_CALL.search(program):
        return program
    return program + _FALLBACK_FOOTER


def _apply_limits(memory_mb: int, cpu_s: int):
    def apply():
        # soft CPU limit raises SIGXCPU first; the hard limit is a backstop
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_s, cpu_s + 1))
        as_bytes = memory_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (as_bytes, as_bytes))
        resource.setrlimit(resource.RLIMIT_NPROC, (MAX_CHILD_PROCS, MAX_CHILD_PROCS))
        resource.setrlimit(resource.RLIMIT_FSIZE, (MAX_FILE_BYTES, MAX_FILE_BYTES))

    return apply


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except ProcessLookupError:
        pass
    except PermissionError:
        proc.kill()


def _last_line(text: str) -> str:
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    return lines[-1] if lines else ""


def run_program(
    program: str,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    memory_mb: int = DEFAULT_MEMORY_MB,
) -> Outcome:
    """Run ``program`` in a fresh interpreter under resource limits.

    Timeouts are enforced twice: a wall-clock deadline on this side and a
    CPU rlimit inside the child, so both sleeping and spinning programs
    stop on schedule. The whole process group is killed on timeout, so
    nothing the program spawned survives the call.
    """
    if timeout_s <= 0:
        raise ValueError("timeout_s must be positive")
    if memory_mb <= 0:
        raise ValueError("memory_mb must be positive")
    cpu_s = max(1, math.ceil(timeout_s))
    started = time.monotonic()
    proc = subprocess.Popen(
        [sys.executable, "-I", "-c", wrap_program(program)],
        stdin=subprocess.DEVNULL,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        start_new_session=True,
        preexec_fn=_apply_limits(memory_mb, cpu_s),
    )
    timed_out = False
    try:
        stdout, _ = proc.communicate(timeout=timeout_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_group(proc)
        stdout, _ = proc.communicate()
    duration_ms = int((time.monotonic() - started) * 1000)
    if timed_out or proc.returncode == -signal.SIGXCPU:
        return Outcome(STATUS_TIMEOUT, duration_ms=duration_ms)
    if proc.returncode != 0:
        return Outcome(STATUS_CRASH, duration_ms=duration_ms)
    last = _last_line(stdout.decode("utf-8", errors="replace"))
    if not last:
        return Outcome(STATUS_NO_OUTPUT, duration_ms=duration_ms)
    return Outcome(STATUS_OK, stdout_last_line=last, duration_ms=duration_ms)
