"""Prompt assembly: few-shot exemplars, reference problems, background
knowledge, and per-question-type reply formats.

All fixed prompt texts live in ``data/templates`` and the shipped few-shot
cases in ``data/exemplars``; this module only stitches them together.
Assembly is pure and byte-deterministic so that scripted-backend tests can
key responses off a hash of the final prompt.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from . import answers
from .answers import QTYPE_MC, QTYPE_TOF, QTYPE_WORD
from .corpus import QTYPES, KnowledgeEntry, Problem

SECTION_SEP = "\n\n"


class PromptError(ValueError):
    """Raised for inconsistent assembly inputs (for example a question-type
    mismatch between the test problem and the supplied few-shot cases)."""


@dataclass(frozen=True)
class ExemplarCase:
    """One few-shot case: question, worked reasoning, program, final answer."""

    qtype: str
    question: str
    cot: str
    program: str
    answer: str
    options: str = ""

    def __post_init__(self):
        for name in ("question", "cot", "program", "answer"):
            if not getattr(self, name).strip():
                raise PromptError(f"exemplar field {name} must be non-empty")
        if self.qtype not in (QTYPE_WORD, QTYPE_MC, QTYPE_TOF):
            raise PromptError(f"unknown exemplar qtype {self.qtype!r}")
        if self.qtype == QTYPE_MC and not self.options.strip():
            raise PromptError("multiple_choice exemplars need an options line")


@dataclass(frozen=True)
class PromptFlags:
    """Ablation and sweep switches for prompt assembly."""

    no_background: bool = False
    no_similar: bool = False
    no_program: bool = False
    repeat_similar_k: int = 1

    def __post_init__(self):
        if self.repeat_similar_k < 1:
            raise PromptError("repeat_similar_k must be >= 1")


@dataclass(frozen=True)
class PromptMeta:
    qtype: str
    language: str
    n_similar_included: int
    knowledge_ids: tuple[str, ...]
    similar_ids: tuple[str, ...]
    translated: bool = False


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    meta: PromptMeta


@lru_cache(maxsize=None)
def _template(name: str) -> str:
    path = resources.files("tutorprompt") / "data" / "templates" / f"{name}.txt"
    return path.read_text(encoding="utf-8").rstrip("\n")


def system_prompt() -> str:
    return _template("system")


def reply_format(qtype: str) -> str:
    if qtype not in QTYPES:
        raise PromptError(f"unknown qtype {qtype!r}")
    return _template(f"reply_{qtype}")


@lru_cache(maxsize=None)
def _exemplar_file(qtype: str) -> tuple[ExemplarCase, ...]:
    path = resources.files("tutorprompt") / "data" / "exemplars" / f"{qtype}.json"
    raw = json.loads(path.read_text(encoding="utf-8"))
    return tuple(ExemplarCase(**entry) for entry in raw)


def load_exemplars(qtype: str, count: int | None = None) -> list[ExemplarCase]:
    """Shipped few-shot cases for ``qtype``, optionally trimmed to ``count``."""
    if qtype not in (QTYPE_WORD, QTYPE_MC, QTYPE_TOF):
        raise PromptError(f"unknown qtype {qtype!r}")
    cases = list(_exemplar_file(qtype))
    if count is None:
        return cases
    if count < 1 or count > len(cases):
        raise PromptError(f"need between 1 and {len(cases)} exemplars, got {count}")
    return cases[:count]


def _program_block(program: str) -> str:
    return f"program:\n```python\n{program}\n```"


def render_exemplar(case: ExemplarCase, include_program: bool = True) -> str:
    """Worked-example rendering of one few-shot case.

    Word problems carry an ``Analysis:`` header and put the answer on its
    own line; choice and judgment problems inline the answer after the
    keyword, matching the shipped reply-format instructions.
    """
    parts: list[str] = []
    if case.qtype == QTYPE_WORD:
        parts.append(f"Question: {case.question}")
        parts.append("Analysis:")
        parts.append(case.cot)
        if include_program:
            parts.append(_program_block(case.program))
        parts.append(f"answer:\n{case.answer}")
    elif case.qtype == QTYPE_MC:
        parts.append(f"Stem: {case.question}")
        parts.append(f"Options: {case.options}")
        parts.append(case.cot)
        if include_program:
            parts.append(_program_block(case.program))
        parts.append(f"answer: {case.answer}")
    else:
        parts.append(f"Question: {case.question}")
        parts.append(case.cot)
        if include_program:
            parts.append(_program_block(case.program))
        parts.append(f"answer: {case.answer}")
    return "\n".join(parts)


def _reference_block(sim: Problem) -> str:
    return _template("reference_block").format(
        sim_stem=_question_text(sim),
        sim_analysis=sim.analysis,
        sim_ans=answers.display_answer(sim.gold_answer),
    )


def _background_block(knowledge: list[KnowledgeEntry]) -> str:
    header, line = _template("background_block").split("\n", 1)
    lines = [header]
    for entry in knowledge:
        lines.append(line.format(background=entry.body))
    return "\n".join(lines)


def _question_text(problem: Problem) -> str:
    if problem.qtype == QTYPE_MC and problem.options:
        return f"{problem.stem}\nOptions: {problem.option_text()}"
    return problem.stem


def _question_block(problem: Problem) -> str:
    if problem.qtype == QTYPE_MC and problem.options:
        return f"Question: {problem.stem}\nOptions: {problem.option_text()}"
    return f"Question: {problem.stem}"


def assemble_prompt(
    test: Problem,
    similar: list[Problem],
    knowledge: list[KnowledgeEntry],
    exemplars: list[ExemplarCase],
    flags: PromptFlags = PromptFlags(),
) -> PromptBundle:
    """Build the full (system, user) message pair for one test problem.

    Section order: few-shot cases, reference problem block(s), background
    knowledge, the test question, then the reply-format instructions.
    Ablation flags drop sections without changing the order of the rest.
    """
    for case in exemplars:
        if case.qtype != test.qtype:
            raise PromptError(
                f"exemplar qtype {case.qtype} does not match test qtype {test.qtype}"
            )

    parts: list[str] = []
    if exemplars:
        rendered = [render_exemplar(c, include_program=not flags.no_program) for c in exemplars]
        parts.append("Examples:\n" + SECTION_SEP.join(rendered))

    similar_ids: list[str] = []
    if not flags.no_similar:
        for sim in similar:
            block = _reference_block(sim)
            for _ in range(flags.repeat_similar_k):
                parts.append(block)
                similar_ids.append(sim.id)

    knowledge_ids: list[str] = []
    if not flags.no_background and knowledge:
        parts.append(_background_block(knowledge))
        knowledge_ids = [entry.id for entry in knowledge]

    parts.append(_question_block(test))
    parts.append(reply_format(test.qtype))

    meta = PromptMeta(
        qtype=test.qtype,
        language=test.language,
        n_similar_included=len(similar_ids),
        knowledge_ids=tuple(knowledge_ids),
        similar_ids=tuple(similar_ids),
    )
    return PromptBundle(system=system_prompt(), user=SECTION_SEP.join(parts), meta=meta)


def translation_request(
    test: Problem,
    similar: list[Problem],
    knowledge: list[KnowledgeEntry],
) -> PromptBundle:
    """Bundle asking the backend to translate a Chinese problem (plus any
    reference problems and background knowledge) into English, then solve."""
    if test.language != "zh":
        raise PromptError("translation requests are only valid for zh problems")

    extras = ""
    if similar and knowledge:
        extras = ", the reference questions, and the background knowledge"
    elif similar:
        extras = " and the reference questions"
    elif knowledge:
        extras = " and the background knowledge"

    parts = [_template("translate_block").format(extras=extras)]
    parts.append(_question_block(test))
    for sim in similar:
        parts.append(_reference_block(sim))
    if knowledge:
        parts.append(_background_block(knowledge))
    parts.append(reply_format(test.qtype))

    meta = PromptMeta(
        qtype=test.qtype,
        language=test.language,
        n_similar_included=len(similar),
        knowledge_ids=tuple(entry.id for entry in knowledge),
        similar_ids=tuple(sim.id for sim in similar),
        translated=True,
    )
    return PromptBundle(system=system_prompt(), user=SECTION_SEP.join(parts), meta=meta)
