"""Command entry: program text on stdin, one JSON outcome line on stdout.

Exit code is 0 whenever the protocol ran, whatever the program did;
callers read the status field, not the exit code.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import DEFAULT_MEMORY_MB, DEFAULT_TIMEOUT_S, run_program


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sandbox_harness",
        description="Run one Python program from stdin under resource limits.",
    )
    parser.add_argument("--timeout-s", type=float, default=DEFAULT_TIMEOUT_S)
    parser.add_argument("--memory-mb", type=int, default=DEFAULT_MEMORY_MB)
    args = parser.parse_args(argv)
    program = sys.stdin.read()
    outcome = run_program(
        program, timeout_s=args.timeout_s, memory_mb=args.memory_mb
    )
    print(json.dumps(outcome.to_json()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
