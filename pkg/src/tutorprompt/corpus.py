"""Problem and knowledge corpora: JSONL loading, validation, stats, persistence.

Problem records carry the fields ``id, stem, options, qtype, language,
gold_answer, analysis, category``; knowledge records carry ``id, title, body,
source``.  One JSON object per line, UTF-8.  Corpora are immutable after load
and safe for concurrent reads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence, Union

from tutorprompt import answers, textproc

QTYPES = ("word", "multiple_choice", "true_or_false")
LANGUAGES = ("zh", "en")
CATEGORIES = ("arithmetic", "algebra", "geometry", "statistics", "reasoning", "others", "unknown")
KNOWLEDGE_SOURCES = ("textbook", "workbook", "web", "other")

KIND_PROBLEMS = "problems"
KIND_KNOWLEDGE = "knowledge"


class CorpusError(ValueError):
    """Validation or IO error, located by line number where possible."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Choice:
    label: str
    text: str


@dataclass(frozen=True)
class Problem:
    id: str
    stem: str
    qtype: str
    language: str
    gold_answer: answers.AnswerValue
    options: tuple[Choice, ...] = ()
    analysis: str = ""
    category: str = "unknown"

    def option_text(self) -> str:
        return " ".join(f"{c.label}.{c.text}" for c in self.options)


@dataclass(frozen=True)
class KnowledgeEntry:
    id: str
    title: str
    body: str
    source: str = "other"


Record = Union[Problem, KnowledgeEntry]


@dataclass(frozen=True)
class Corpus:
    kind: str
    items: tuple[Record, ...]
    by_id: dict = field(hash=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {item.id: item for item in self.items})

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.items)

    def get(self, item_id: str) -> Optional[Record]:
        return self.by_id.get(item_id)


@dataclass(frozen=True)
class CorpusStats:
    counts: dict
    total: int

    def cells(self) -> dict:
        out = dict(self.counts)
        out["total"] = self.total
        return out


def _parse_options(raw, line: int) -> tuple[Choice, ...]:
    if not raw:
        return ()
    if not isinstance(raw, list):
        raise CorpusError("options must be a list", line)
    out = []
    for entry in raw:
        if isinstance(entry, dict) and "label" in entry and "text" in entry:
            out.append(Choice(str(entry["label"]).strip(), str(entry["text"])))
        else:
            raise CorpusError(f"option entries need label and text: {entry!r}", line)
    labels = [c.label for c in out]
    expected = [chr(ord("A") + i) for i in range(len(out))]
    if labels != expected:
        raise CorpusError(f"option labels must run A.. in order, got {labels}", line)
    return tuple(out)


def problem_from_json(obj: dict, line: int = 0) -> Problem:
    for key in ("id", "stem", "qtype", "gold_answer"):
        if key not in obj:
            raise CorpusError(f"missing field {key!r}", line)
    qtype = obj["qtype"]
    if qtype not in QTYPES:
        raise CorpusError(f"unknown qtype {qtype!r}", line)
    stem = str(obj["stem"])
    language = obj.get("language") or textproc.detect_language(stem)
    if language not in LANGUAGES:
        raise CorpusError(f"unknown language {language!r}", line)
    category = obj.get("category") or "unknown"
    if category not in CATEGORIES:
        raise CorpusError(f"unknown category {category!r}", line)
    options = _parse_options(obj.get("options"), line)
    if qtype == "multiple_choice" and not options:
        raise CorpusError("multiple_choice problems need options", line)
    try:
        gold = answers.answer_from_json(obj["gold_answer"], qtype)
    except answers.AnswerParseError as exc:
        raise CorpusError(str(exc), line) from exc
    if qtype == "true_or_false" and gold.kind != answers.KIND_BOOLEAN:
        raise CorpusError("true_or_false gold answer must be boolean", line)
    if qtype == "multiple_choice" and gold.kind == answers.KIND_CHOICE:
        if gold.value not in {c.label for c in options}:
            raise CorpusError(f"gold choice {gold.value!r} not among options", line)
    return Problem(
        id=str(obj["id"]),
        stem=stem,
        qtype=qtype,
        language=language,
        gold_answer=gold,
        options=options,
        analysis=str(obj.get("analysis") or ""),
        category=category,
    )


def problem_to_json(p: Problem) -> dict:
    obj = {
        "id": p.id,
        "stem": p.stem,
        "qtype": p.qtype,
        "language": p.language,
        "gold_answer": p.gold_answer.to_json(),
        "analysis": p.analysis,
        "category": p.category,
    }
    if p.options:
        obj["options"] = [{"label": c.label, "text": c.text} for c in p.options]
    return obj


def knowledge_from_json(obj: dict, line: int = 0) -> KnowledgeEntry:
    for key in ("id", "title", "body"):
        if key not in obj:
            raise CorpusError(f"missing field {key!r}", line)
    body = str(obj["body"])
    if not body.strip():
        raise CorpusError("knowledge body must be non-empty", line)
    source = obj.get("source") or "other"
    if source not in KNOWLEDGE_SOURCES:
        raise CorpusError(f"unknown source {source!r}", line)
    return KnowledgeEntry(id=str(obj["id"]), title=str(obj["title"]), body=body, source=source)


def knowledge_to_json(k: KnowledgeEntry) -> dict:
    return {"id": k.id, "title": k.title, "body": k.body, "source": k.source}


def _iter_records(path: str, kind: str):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON ({exc.msg})", lineno) from exc
            if not isinstance(obj, dict):
                raise CorpusError("record must be a JSON object", lineno)
            parser = problem_from_json if kind == KIND_PROBLEMS else knowledge_from_json
            yield lineno, parser(obj, lineno)


def load_corpus(path: str, kind: str = KIND_PROBLEMS) -> Corpus:
    """Load and validate a JSONL corpus; iteration order is file order."""
    if kind not in (KIND_PROBLEMS, KIND_KNOWLEDGE):
        raise ValueError(f"unknown corpus kind {kind!r}")
    items = []
    first_line: dict[str, int] = {}
    for lineno, record in _iter_records(path, kind):
        if record.id in first_line:
            raise CorpusError(
                f"duplicate id {record.id!r}, first seen on line {first_line[record.id]}",
                lineno,
            )
        first_line[record.id] = lineno
        items.append(record)
    return Corpus(kind=kind, items=tuple(items))


def validate_corpus(path: str, kind: str = KIND_PROBLEMS) -> list[str]:
    """Collect every located validation error instead of stopping at the first."""
    errors: list[str] = []
    first_line: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    parser = problem_from_json if kind == KIND_PROBLEMS else knowledge_from_json
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            if not isinstance(obj, dict):
                raise CorpusError("record must be a JSON object", lineno)
            record = parser(obj, lineno)
        except (json.JSONDecodeError, CorpusError) as exc:
            msg = str(exc) if isinstance(exc, CorpusError) else f"line {lineno}: malformed JSON"
            errors.append(msg)
            continue
        if record.id in first_line:
            errors.append(
                f"line {lineno}: duplicate id {record.id!r}, "
                f"first seen on line {first_line[record.id]}"
            )
        else:
            first_line[record.id] = lineno
    return errors


def save_corpus(corpus: Corpus, path: str) -> None:
    to_json = problem_to_json if corpus.kind == KIND_PROBLEMS else knowledge_to_json
    with open(path, "w", encoding="utf-8") as fh:
        for item in corpus:
            fh.write(json.dumps(to_json(item), ensure_ascii=False) + "\n")


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Per-category histogram of a problems corpus."""
    if corpus.kind != KIND_PROBLEMS:
        raise ValueError("stats are defined for problem corpora")
    counts = {cat: 0 for cat in CATEGORIES}
    for item in corpus:
        counts[item.category] += 1
    return CorpusStats(counts=counts, total=len(corpus))


def with_language(problem: Problem, language: str) -> Problem:
    return replace(problem, language=language)


def problems(corpus: Corpus) -> Sequence[Problem]:
    if corpus.kind != KIND_PROBLEMS:
        raise ValueError("not a problems corpus")
    return corpus.items  # type: ignore[return-value]
