"""Prompt assembly from shipped templates and few-shot cases."""

from __future__ import annotations

import pytest

from tutorprompt.corpus import KnowledgeEntry
from tutorprompt.prompting import (
    ExemplarCase,
    PromptError,
    PromptFlags,
    assemble_prompt,
    load_exemplars,
    render_exemplar,
    reply_format,
    system_prompt,
    translation_request,
)

from conftest import make_problem


WORD_TEST = make_problem("t1", "Tom read 9 pages on Monday and 8 on Tuesday. How many pages?", gold=17)
ZH_TEST = make_problem("t2", "小明有3个苹果，又买了4个，现在有几个苹果？", gold=7, language="zh")
MC_TEST = make_problem(
    "t3",
    "Which speed is fastest?",
    qtype="multiple_choice",
    gold="B",
    options=[("A", "3 m/s"), ("B", "9 m/s"), ("C", "5 m/s")],
)
SIMILAR = [
    make_problem("s1", "Tom read 4 pages on Monday and 5 on Tuesday. Total?", gold=9, analysis="4+5=9"),
    make_problem("s2", "Sue read 2 pages then 3 more. Total?", gold=5, analysis="2+3=5"),
]
KNOWLEDGE = [
    KnowledgeEntry(id="k1", title="Addition", body="Adding combines two counts."),
    KnowledgeEntry(id="k2", title="Order", body="Addition is commutative."),
]


class TestTemplates:
    def test_system_prompt_nonempty_and_stable(self):
        s = system_prompt()
        assert s and s == system_prompt()
        assert not s.endswith("\n")

    @pytest.mark.parametrize("qtype", ["word", "multiple_choice", "true_or_false"])
    def test_reply_format_mentions_keywords(self, qtype):
        text = reply_format(qtype)
        for kw in ("thought", "steps", "answer"):
            assert kw in text

    def test_reply_format_unknown_qtype(self):
        with pytest.raises(PromptError):
            reply_format("essay")


class TestExemplars:
    @pytest.mark.parametrize("qtype,total", [("word", 2), ("multiple_choice", 3), ("true_or_false", 3)])
    def test_full_sets(self, qtype, total):
        cases = load_exemplars(qtype)
        assert len(cases) == total
        assert all(c.qtype == qtype for c in cases)

    def test_count_prefix(self):
        cases = load_exemplars("multiple_choice", 2)
        assert len(cases) == 2
        assert cases == load_exemplars("multiple_choice")[:2]

    @pytest.mark.parametrize("count", [0, 4, -1])
    def test_count_out_of_range(self, count):
        with pytest.raises(PromptError):
            load_exemplars("word", count)

    def test_programs_print_the_answer(self):
        # every shipped program is plain Python whose last print matches the answer
        for qtype in ("word", "multiple_choice", "true_or_false"):
            for case in load_exemplars(qtype):
                assert "print(" in case.program
                compile(case.program, "<exemplar>", "exec")

    def test_render_word_layout(self):
        case = load_exemplars("word", 1)[0]
        text = render_exemplar(case)
        assert text.index("Question:") < text.index("Analysis:")
        assert "program:\n```python\n" in text
        assert text.rstrip().endswith(case.answer)

    def test_render_without_program(self):
        case = load_exemplars("word", 1)[0]
        text = render_exemplar(case, include_program=False)
        assert "```" not in text and "program:" not in text

    def test_render_mc_has_options(self):
        case = load_exemplars("multiple_choice", 1)[0]
        text = render_exemplar(case)
        assert "Stem:" in text and "Options:" in text
        assert f"answer: {case.answer}" in text


class TestAssemble:
    def test_section_order(self):
        bundle = assemble_prompt(WORD_TEST, SIMILAR, KNOWLEDGE, load_exemplars("word"))
        u = bundle.user
        positions = [
            u.index("Examples:"),
            u.index(SIMILAR[0].stem),
            u.index(KNOWLEDGE[0].body),
            u.index("Question: " + WORD_TEST.stem),
        ]
        assert positions == sorted(positions)
        assert u.rstrip().endswith(reply_format("word").rstrip())

    def test_meta_ids(self):
        bundle = assemble_prompt(WORD_TEST, SIMILAR, KNOWLEDGE, load_exemplars("word"))
        assert bundle.meta.similar_ids == ("s1", "s2")
        assert bundle.meta.knowledge_ids == ("k1", "k2")
        assert bundle.meta.n_similar_included == 2
        assert bundle.meta.language == "en"
        assert not bundle.meta.translated

    def test_no_similar_flag(self):
        bundle = assemble_prompt(
            WORD_TEST, SIMILAR, KNOWLEDGE, load_exemplars("word"),
            PromptFlags(no_similar=True),
        )
        assert SIMILAR[0].stem not in bundle.user
        assert bundle.meta.similar_ids == ()

    def test_no_background_flag(self):
        bundle = assemble_prompt(
            WORD_TEST, SIMILAR, KNOWLEDGE, load_exemplars("word"),
            PromptFlags(no_background=True),
        )
        assert KNOWLEDGE[0].body not in bundle.user
        assert bundle.meta.knowledge_ids == ()

    def test_no_program_flag_drops_code_fences(self):
        bundle = assemble_prompt(
            WORD_TEST, SIMILAR, KNOWLEDGE, load_exemplars("word"),
            PromptFlags(no_program=True),
        )
        assert "```" not in bundle.user

    def test_repeat_similar(self):
        bundle = assemble_prompt(
            WORD_TEST, SIMILAR[:1], [], load_exemplars("word"),
            PromptFlags(repeat_similar_k=3),
        )
        assert bundle.user.count(SIMILAR[0].stem) == 3
        assert bundle.meta.similar_ids == ("s1", "s1", "s1")
        assert bundle.meta.n_similar_included == 3

    def test_mc_question_includes_options(self):
        bundle = assemble_prompt(MC_TEST, [], [], load_exemplars("multiple_choice"))
        assert "Options: A.3 m/s B.9 m/s C.5 m/s" in bundle.user

    def test_exemplar_qtype_mismatch(self):
        with pytest.raises(PromptError, match="qtype"):
            assemble_prompt(MC_TEST, [], [], load_exemplars("word"))

    def test_empty_sections_leave_no_blanks(self):
        bundle = assemble_prompt(WORD_TEST, [], [], load_exemplars("word"))
        assert "\n\n\n" not in bundle.user

    def test_background_block_lists_each_entry(self):
        bundle = assemble_prompt(WORD_TEST, [], KNOWLEDGE, load_exemplars("word"))
        assert bundle.user.count("Background: ") == 2


class TestTranslationRequest:
    def test_zh_only(self):
        with pytest.raises(PromptError):
            translation_request(WORD_TEST, [], [])

    def test_plain_extras(self):
        bundle = translation_request(ZH_TEST, [], [])
        assert "reference questions" not in bundle.user
        assert "background knowledge" not in bundle.user
        assert ZH_TEST.stem in bundle.user
        assert bundle.meta.translated

    def test_similar_only_extras(self):
        bundle = translation_request(ZH_TEST, SIMILAR[:1], [])
        assert "and the reference questions" in bundle.user
        assert "background knowledge" not in bundle.user

    def test_knowledge_only_extras(self):
        bundle = translation_request(ZH_TEST, [], KNOWLEDGE)
        assert "and the background knowledge" in bundle.user
        assert "reference questions" not in bundle.user

    def test_both_extras(self):
        bundle = translation_request(ZH_TEST, SIMILAR[:1], KNOWLEDGE)
        assert ", the reference questions, and the background knowledge" in bundle.user

    def test_no_exemplars_in_translation(self):
        bundle = translation_request(ZH_TEST, [], [])
        assert "Examples:" not in bundle.user

    def test_reply_format_still_present(self):
        bundle = translation_request(ZH_TEST, [], [])
        assert bundle.user.rstrip().endswith(reply_format("word").rstrip())


class TestCaseValidation:
    def test_blank_fields_rejected(self):
        with pytest.raises(PromptError):
            ExemplarCase(qtype="word", question="", cot="c", program="p", answer="1")

    def test_mc_requires_options(self):
        with pytest.raises(PromptError):
            ExemplarCase(qtype="multiple_choice", question="q", cot="c", program="p", answer="A")
