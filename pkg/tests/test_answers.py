"""Answer normalization, reply parsing, and equivalence."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tutorprompt import answers
from tutorprompt.answers import (
    AnswerParseError,
    ReplyParseError,
    answer_from_json,
    answer_from_text,
    answers_equal,
    boolean,
    choice,
    display_answer,
    normalize_number,
    number,
    numbers_close,
    parse_boolean,
    parse_choice,
    parse_reply,
    text,
)


class TestNormalizeNumber:
    @pytest.mark.parametrize(
        "raw,value,unit",
        [
            ("59", Fraction(59), None),
            ("78.3 m", Fraction(783, 10), "m"),
            ("1,234", Fraction(1234), None),
            ("50%", Fraction(1, 2), None),
            ("$12", Fraction(12), None),
            ("4/3", Fraction(4, 3), None),
            ("-7", Fraction(-7), None),
            ("31 pages", Fraction(31), "pages"),
            ("３.５", Fraction(7, 2), None),
            ("0.5", Fraction(1, 2), None),
        ],
    )
    def test_accepted(self, raw, value, unit):
        av = normalize_number(raw)
        assert av.value == value
        assert av.unit == unit

    @pytest.mark.parametrize("raw", ["", "no numbers here", "3 and 4", "1 2"])
    def test_rejected(self, raw):
        with pytest.raises(AnswerParseError):
            normalize_number(raw)


class TestChoiceAndBoolean:
    @pytest.mark.parametrize(
        "raw,letter",
        [("C", "C"), ("c", "C"), ("Option C", "C"), ("选C", "C"), ("(B)", "B"), ("B.", "B")],
    )
    def test_choice_patterns(self, raw, letter):
        av = parse_choice(raw)
        assert av is not None and av.value == letter

    def test_choice_rejects_sentences(self):
        assert parse_choice("cannot decide") is None

    @pytest.mark.parametrize(
        "raw,value",
        [
            ("True", True), ("False", False), ("true", True), ("T", True),
            ("F", False), ("对", True), ("错", False), ("正确", True), ("错误", False),
        ],
    )
    def test_boolean_patterns(self, raw, value):
        av = parse_boolean(raw)
        assert av is not None and av.value is value

    def test_boolean_rejects_other_text(self):
        assert parse_boolean("maybe") is None


class TestAnswerFromText:
    def test_word_number(self):
        assert answer_from_text("59", "word").value == 59

    def test_word_falls_back_to_text(self):
        av = answer_from_text("the first and the second", "word")
        assert av.kind == "text"

    def test_mc(self):
        assert answer_from_text("Option B", "multiple_choice").value == "B"

    def test_tof(self):
        assert answer_from_text("False", "true_or_false").value is False

    def test_json_forms(self):
        assert answer_from_json(7, "word").value == 7
        assert answer_from_json("31 pages", "word").unit == "pages"
        assert answer_from_json("B", "multiple_choice").value == "B"
        assert answer_from_json(False, "true_or_false").value is False


WORD_REPLY = """thought:
When the father is 30 years old, 5 years have passed.
steps:
1. 30-25=5.
2. 5+5=10.
answer:
10
"""


class TestParseReply:
    def test_word_sections(self):
        rep = parse_reply(WORD_REPLY, "word")
        assert "father" in rep.thought
        assert rep.steps.startswith("1.")
        assert rep.answer.value == 10

    def test_answer_with_unit(self):
        rep = parse_reply("thought: t\nsteps: s\nanswer: 31 pages", "word")
        assert rep.answer.value == 31 and rep.answer.unit == "pages"

    def test_mc_inline(self):
        rep = parse_reply("thought: t\nsteps: s\nanswer: C", "multiple_choice")
        assert rep.answer.value == "C"

    def test_tof(self):
        rep = parse_reply("thought: t\nsteps: s\nanswer: False", "true_or_false")
        assert rep.answer.value is False

    def test_missing_answer_raises(self):
        with pytest.raises(ReplyParseError):
            parse_reply("thought: only thoughts here", "word")

    def test_program_extracted_and_ignored_by_sections(self):
        raw = (
            "thought: t\nsteps: s\n"
            "```python\nanswer = 3\nprint(answer)\n```\n"
            "answer: 3"
        )
        rep = parse_reply(raw, "word")
        assert rep.program == "answer = 3\nprint(answer)"
        assert rep.answer.value == 3

    def test_stray_quote_before_keyword(self):
        raw = "'thought: quoted\nsteps: s\nanswer: True"
        rep = parse_reply(raw, "true_or_false")
        assert rep.answer.value is True

    def test_fullwidth_colon(self):
        rep = parse_reply("thought： t\nsteps： s\nanswer： 12", "word")
        assert rep.answer.value == 12


class TestTolerance:
    def test_absolute_floor(self):
        assert numbers_close(0.0, 5e-7)
        assert not numbers_close(0.0, 2e-6)

    def test_relative_term(self):
        assert numbers_close(10000.0, 10000.9)
        assert not numbers_close(10000.0, 10002.1)

    @given(
        st.floats(-1e6, 1e6, allow_nan=False),
        st.floats(-1e6, 1e6, allow_nan=False),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetric(self, a, b):
        assert numbers_close(a, b) == numbers_close(b, a)


class TestAnswersEqual:
    def test_numbers_within_tolerance(self):
        assert answers_equal(number(7), number(7.0000001))

    def test_unit_ignored(self):
        assert answers_equal(number(31, "pages"), number(31))

    def test_number_vs_numeric_text(self):
        assert answers_equal(number(7), text("7"))

    def test_boolean_vs_text(self):
        assert answers_equal(boolean(True), text("True"))

    def test_choice_vs_text(self):
        assert answers_equal(choice("B"), text("b"))

    def test_choice_identity(self):
        assert answers_equal(choice("B"), choice("B"))
        assert not answers_equal(choice("B"), choice("C"))

    def test_text_normalization(self):
        assert answers_equal(text(" The  Answer. "), text("the answer"))

    def test_number_vs_boolean_never_equal(self):
        assert not answers_equal(number(1), boolean(True))

    @given(st.integers(-10**6, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_reflexive_on_numbers(self, n):
        assert answers_equal(number(n), number(n))


class TestDisplayAndJson:
    def test_display_number_with_unit(self):
        assert display_answer(number(Fraction(31), "pages")) == "31 pages"

    def test_display_fraction(self):
        assert display_answer(number(Fraction(4, 3))) == "4/3"

    def test_display_decimal(self):
        assert display_answer(number(Fraction(783, 10))) == "78.3"

    def test_display_boolean(self):
        assert display_answer(boolean(False)) == "False"

    def test_to_json_scalar(self):
        assert number(Fraction(31)).to_json() == 31
        assert boolean(True).to_json() is True
        assert choice("C").to_json() == "C"

    @given(st.fractions(min_value=-1000, max_value=1000, max_denominator=40))
    @settings(max_examples=100, deadline=None)
    def test_json_round_trip(self, frac):
        av = number(frac)
        back = answer_from_json(av.to_json(), "word")
        assert answers_equal(av, back)
