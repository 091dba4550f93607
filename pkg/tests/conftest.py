"""Shared test fixtures and the acceptance-summary hook.

Tests marked ``@pytest.mark.criterion("<tier>: <name>")`` are collected
into a per-criterion PASS/FAIL table printed after the run.
"""

from __future__ import annotations

import pytest

from tutorprompt import answers
from tutorprompt.corpus import Choice, Problem
from tutorprompt.runner import ExecutionOutcome

_CRITERIA: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(label): acceptance criterion checked by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    label = marker.args[0]
    if report.passed:
        _CRITERIA.setdefault(label, "PASS")
    elif report.failed:
        _CRITERIA[label] = "FAIL"
    elif report.skipped:
        _CRITERIA.setdefault(label, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(f"{_CRITERIA[label]}  {label}")


# ---------------------------------------------------------------- helpers


def make_problem(
    pid: str = "p1",
    stem: str = "What is 3 + 4?",
    qtype: str = "word",
    language: str = "en",
    gold=7,
    options=(),
    analysis: str = "",
    category: str = "unknown",
) -> Problem:
    gold_av = answers.answer_from_json(gold, qtype)
    opts = tuple(Choice(label, text) for label, text in options)
    return Problem(
        id=pid, stem=stem, qtype=qtype, language=language,
        gold_answer=gold_av, options=opts, analysis=analysis, category=category,
    )


def make_reply(step: str, program: str | None = None) -> str:
    body = (
        "thought: Consider the quantities.\n"
        "steps:\n1. Set up the computation.\n2. Evaluate it.\n"
        f"answer: {step}"
    )
    if program is not None:
        body += f"\n```python\n{program}\n```"
    return body


class FakeRunner:
    """Maps exact program text to a fixed outcome; records calls."""

    def __init__(self, table: dict | None = None):
        self.table = dict(table or {})
        self.calls: list[str] = []

    def run_program(self, program: str, timeout_s: float) -> ExecutionOutcome:
        key = program.strip()
        self.calls.append(key)
        if key not in self.table:
            return ExecutionOutcome(status="crash")
        return self.table[key]


class CountingBackend:
    """Wraps a backend, recording every (seed, temperature) it serves."""

    def __init__(self, inner):
        self.inner = inner
        self.requests: list[tuple[int, float]] = []

    def generate(self, request):
        self.requests.append((request.seed_hint, request.temperature))
        return self.inner.generate(request)


@pytest.fixture
def fake_runner():
    return FakeRunner


@pytest.fixture
def counting_backend():
    return CountingBackend
