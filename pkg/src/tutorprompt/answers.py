"""Structured-reply parsing, answer normalization, and answer equivalence.

Replies follow the thought/steps/answer keyword layout; answers are
normalized into :class:`AnswerValue` so that a program's printed output and a
step-by-step textual answer can be compared with one rule.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

ABS_TOL = 1e-6
REL_TOL = 1e-4

KIND_NUMBER = "number"
KIND_CHOICE = "choice"
KIND_BOOLEAN = "boolean"
KIND_TEXT = "text"

QTYPE_WORD = "word"
QTYPE_MC = "multiple_choice"
QTYPE_TOF = "true_or_false"

Numeric = Union[Fraction, float]


class AnswerParseError(ValueError):
    pass


class ReplyParseError(ValueError):
    """Raised when a reply lacks the answer section."""


@dataclass(frozen=True)
class AnswerValue:
    kind: str
    value: Union[Numeric, str, bool]
    unit: Optional[str] = None

    def __post_init__(self):
        if self.kind == KIND_CHOICE:
            v = self.value
            if not (isinstance(v, str) and len(v) == 1 and "A" <= v <= "Z"):
                raise AnswerParseError(f"choice must be a single letter A..Z, got {v!r}")
        elif self.kind == KIND_NUMBER:
            if isinstance(self.value, float) and not math.isfinite(self.value):
                raise AnswerParseError("number answers must be finite")

    def to_json(self) -> Union[int, float, str, bool]:
        """Scalar JSON form, reparseable by :func:`answer_from_json`."""
        if self.kind == KIND_BOOLEAN:
            return bool(self.value)
        if self.kind == KIND_NUMBER:
            text = format_number(self.value)
            return f"{text} {self.unit}" if self.unit else _json_scalar(self.value, text)
        return str(self.value)


def _json_scalar(value: Numeric, text: str):
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    try:
        f = float(value)
    except OverflowError:
        return text
    if "/" in text:
        return text  # keep exact rationals as "a/b" strings
    return f


def number(value: Numeric, unit: Optional[str] = None) -> AnswerValue:
    return AnswerValue(KIND_NUMBER, value, unit)


def choice(letter: str) -> AnswerValue:
    return AnswerValue(KIND_CHOICE, letter.upper())


def boolean(value: bool) -> AnswerValue:
    return AnswerValue(KIND_BOOLEAN, bool(value))


def text(value: str) -> AnswerValue:
    return AnswerValue(KIND_TEXT, normalize_text(value))


def normalize_text(value: str) -> str:
    return " ".join(value.split()).strip().rstrip(".。").casefold()


def display_answer(av: AnswerValue) -> str:
    """Human-readable form used when an answer is embedded in prompt text."""
    if av.kind == KIND_BOOLEAN:
        return "True" if av.value else "False"
    if av.kind == KIND_NUMBER:
        body = format_number(av.value)
        return f"{body} {av.unit}" if av.unit else body
    return str(av.value)


def format_number(value: Numeric) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        scaled = value
        for exp in range(1, 13):
            scaled = value * 10**exp
            if scaled.denominator == 1:
                return _trim_float(value.numerator / value.denominator, exp)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def _trim_float(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}".rstrip("0").rstrip(".")
    return s if s not in ("", "-") else "0"


_FULLWIDTH = str.maketrans("０１２３４５６７８９．％／＋－，", "0123456789.%/+-,")
_CURRENCY = "$¥￥€£"
_NUMBER_CORE = r"[+\-−]?\d+(?:,\d{3})*(?:\.\d+)?"
_NUMBER_RE = re.compile(_NUMBER_CORE)
_STRICT_NUMBER_RE = re.compile(
    rf"^\s*[{_CURRENCY}]?\s*({_NUMBER_CORE})\s*(/)?\s*({_NUMBER_CORE})?\s*(%)?\s*(.*?)\s*$"
)


def normalize_number(raw: str) -> AnswerValue:
    """Parse a numeric answer text into an exact number plus optional unit.

    Handles thousands separators, full-width digits, a currency prefix,
    fractions ``a/b``, percentages ``x%``, and a trailing unit word.
    """
    folded = raw.translate(_FULLWIDTH).replace("−", "-").strip()
    m = _STRICT_NUMBER_RE.match(folded)
    if not m or not m.group(1):
        raise AnswerParseError(f"not a numeric answer: {raw!r}")
    head, slash, denom, percent, tail = m.groups()
    value = Fraction(head.replace(",", ""))
    if slash:
        if not denom:
            raise AnswerParseError(f"malformed fraction: {raw!r}")
        d = Fraction(denom.replace(",", ""))
        if d == 0:
            raise AnswerParseError(f"zero denominator: {raw!r}")
        value = value / d
    elif denom:
        raise AnswerParseError(f"trailing number in: {raw!r}")
    if percent:
        value = value / 100
    unit = tail.strip() or None
    if unit and (_NUMBER_RE.search(unit) or any(c in unit for c in "=+")):
        raise AnswerParseError(f"ambiguous numeric answer: {raw!r}")
    return number(value, unit)


# Accepted multiple-choice reply shapes, tried in order.
_CHOICE_PATTERNS = [
    re.compile(r"^\(?([A-Za-z])\)?[.。)：:]?$"),
    re.compile(r"(?:option|choice|answer is|选项|选|答案是|答案为)\s*[:：]?\s*\(?([A-Za-z])\)?\b", re.I),
    re.compile(r"^\(?([A-Za-z])\)?[.):：、]\s"),
]

_TRUE_WORDS = ("true", "t", "yes", "correct", "对", "正确", "√")
_FALSE_WORDS = ("false", "f", "no", "incorrect", "wrong", "错", "错误", "×")
_BOOL_RE = re.compile(r"\b(true|false)\b", re.I)


def parse_choice(raw: str) -> Optional[AnswerValue]:
    stripped = raw.strip()
    for pat in _CHOICE_PATTERNS:
        m = pat.search(stripped)
        if m:
            return choice(m.group(1))
    return None


def parse_boolean(raw: str) -> Optional[AnswerValue]:
    stripped = raw.strip().strip(".。!！").casefold()
    if stripped in _TRUE_WORDS:
        return boolean(True)
    if stripped in _FALSE_WORDS:
        return boolean(False)
    m = _BOOL_RE.search(raw)
    if m:
        return boolean(m.group(1).casefold() == "true")
    return None


def answer_from_text(raw: str, qtype: str) -> AnswerValue:
    """Interpret an answer string according to the problem type.

    Falls back to a normalized text answer when no typed parse applies, so
    multi-part answers like ``(1) ... (2) ...`` still compare as text.
    """
    stripped = raw.strip()
    if qtype == QTYPE_MC:
        parsed = parse_choice(stripped)
        if parsed is not None:
            return parsed
    elif qtype == QTYPE_TOF:
        parsed = parse_boolean(stripped)
        if parsed is not None:
            return parsed
    else:
        try:
            return normalize_number(stripped)
        except AnswerParseError:
            parsed = _single_number(stripped)
            if parsed is not None:
                return parsed
    return text(stripped)


def _single_number(raw: str) -> Optional[AnswerValue]:
    matches = list(_NUMBER_RE.finditer(raw.translate(_FULLWIDTH)))
    if len(matches) != 1:
        return None
    try:
        return normalize_number(raw[matches[0].start() :])
    except AnswerParseError:
        return None


def answer_from_json(value, qtype: str) -> AnswerValue:
    """Parse a JSONL ``gold_answer`` scalar."""
    if isinstance(value, bool):
        return boolean(value)
    if isinstance(value, (int, float)):
        return number(Fraction(str(value)))
    if isinstance(value, str):
        return answer_from_text(value, qtype)
    raise AnswerParseError(f"unsupported answer value: {value!r}")


@dataclass(frozen=True)
class ParsedReply:
    thought: str
    steps: str
    answer_raw: str
    answer: AnswerValue
    program: Optional[str] = None


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.S)
_SECTION_RE = re.compile(r"^[^\w\n]{0,4}(thought|steps|answer)\b\s*[:：]", re.I | re.M)


def extract_program(raw: str) -> Optional[str]:
    """Contents of the first fenced code block, if any."""
    m = _FENCE_RE.search(raw)
    return m.group(1).strip("\n") if m else None


def parse_reply(raw: str, qtype: str) -> ParsedReply:
    """Locate the thought/steps/answer sections and normalize the answer.

    Section keywords are matched case-insensitively at line starts; fenced
    code blocks are cut out first so program text cannot shadow a keyword.
    """
    program = extract_program(raw)
    prose = _FENCE_RE.sub("\n", raw)
    sections: dict[str, str] = {}
    matches = list(_SECTION_RE.finditer(prose))
    for i, m in enumerate(matches):
        name = m.group(1).casefold()
        if name in sections:
            continue
        end = matches[i + 1].start() if i + 1 < len(matches) else len(prose)
        sections[name] = prose[m.end() : end].strip()
    if "answer" not in sections:
        raise ReplyParseError("reply has no answer section")
    answer_raw = sections["answer"]
    return ParsedReply(
        thought=sections.get("thought", ""),
        steps=sections.get("steps", ""),
        answer_raw=answer_raw,
        answer=answer_from_text(answer_raw, qtype),
        program=program,
    )


def _as_float(av: AnswerValue) -> Optional[float]:
    if av.kind == KIND_NUMBER:
        return float(av.value)
    if av.kind == KIND_TEXT:
        try:
            return float(normalize_number(str(av.value)).value)
        except AnswerParseError:
            return None
    return None


def _as_boolean(av: AnswerValue) -> Optional[bool]:
    if av.kind == KIND_BOOLEAN:
        return bool(av.value)
    if av.kind == KIND_TEXT:
        parsed = parse_boolean(str(av.value))
        return bool(parsed.value) if parsed else None
    return None


def _as_choice(av: AnswerValue) -> Optional[str]:
    if av.kind == KIND_CHOICE:
        return str(av.value)
    if av.kind == KIND_TEXT:
        parsed = parse_choice(str(av.value))
        return str(parsed.value) if parsed else None
    return None


def numbers_close(a: float, b: float) -> bool:
    # max(|a|,|b|) keeps the check symmetric; the relative term absorbs float
    # printing, the absolute term handles answers near zero.
    return abs(a - b) <= max(ABS_TOL, REL_TOL * max(abs(a), abs(b)))


def answers_equal(a: AnswerValue, b: AnswerValue) -> bool:
    """Answer equivalence: tolerance-based for numbers, identity for
    choices/booleans, normalized equality for text, with text->typed coercion
    attempted before failing."""
    if KIND_NUMBER in (a.kind, b.kind):
        fa, fb = _as_float(a), _as_float(b)
        if fa is not None and fb is not None:
            return numbers_close(fa, fb)
        return False
    if KIND_CHOICE in (a.kind, b.kind):
        ca, cb = _as_choice(a), _as_choice(b)
        return ca is not None and ca == cb
    if KIND_BOOLEAN in (a.kind, b.kind):
        ba, bb = _as_boolean(a), _as_boolean(b)
        return ba is not None and ba == bb
    return normalize_text(str(a.value)) == normalize_text(str(b.value))
