"""Corpus loading, validation, and stats."""

from __future__ import annotations

import json

import pytest

from tutorprompt import corpus as corpus_mod
from tutorprompt.corpus import (
    CorpusError,
    KIND_KNOWLEDGE,
    KIND_PROBLEMS,
    corpus_stats,
    load_corpus,
    problem_from_json,
    problem_to_json,
    save_corpus,
    validate_corpus,
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return str(path)


GOOD_WORD = {
    "id": "p1",
    "stem": "A farm has 3 cows and 4 pigs. How many animals are there?",
    "qtype": "word",
    "gold_answer": 7,
    "analysis": "3+4=7",
    "category": "arithmetic",
}
GOOD_MC = {
    "id": "p2",
    "stem": "Which is largest?",
    "qtype": "multiple_choice",
    "gold_answer": "B",
    "options": [
        {"label": "A", "text": "2"},
        {"label": "B", "text": "9"},
        {"label": "C", "text": "5"},
    ],
}
GOOD_TOF = {
    "id": "p3",
    "stem": "判断:1+1=3。",
    "qtype": "true_or_false",
    "gold_answer": False,
}
GOOD_KNOWLEDGE = {
    "id": "k1",
    "title": "Addition",
    "body": "Adding two counts gives the combined count.",
    "source": "textbook",
}


class TestLoad:
    def test_round_trip(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_WORD, GOOD_MC, GOOD_TOF])
        corpus = load_corpus(path)
        assert len(corpus) == 3
        assert [p.id for p in corpus] == ["p1", "p2", "p3"]
        out = tmp_path / "copy.jsonl"
        save_corpus(corpus, str(out))
        again = load_corpus(str(out))
        assert [problem_to_json(p) for p in again] == [problem_to_json(p) for p in corpus]

    def test_language_detected_when_absent(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_WORD, GOOD_TOF])
        corpus = load_corpus(path)
        assert corpus.get("p1").language == "en"
        assert corpus.get("p3").language == "zh"

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text(json.dumps(GOOD_WORD) + "\n\n\n", encoding="utf-8")
        assert len(load_corpus(str(path))) == 1

    def test_knowledge_kind(self, tmp_path):
        path = write_jsonl(tmp_path / "k.jsonl", [GOOD_KNOWLEDGE])
        corpus = load_corpus(path, KIND_KNOWLEDGE)
        entry = corpus.get("k1")
        assert entry.title == "Addition" and entry.source == "textbook"

    def test_get_missing_returns_none(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_WORD])
        assert load_corpus(path).get("nope") is None


class TestErrors:
    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text(json.dumps(GOOD_WORD) + "\n{broken\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="line 2"):
            load_corpus(str(path))

    def test_duplicate_id_names_both_lines(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_WORD, GOOD_WORD])
        with pytest.raises(CorpusError, match="line 2.*first seen on line 1"):
            load_corpus(path)

    @pytest.mark.parametrize("missing", ["id", "stem", "qtype", "gold_answer"])
    def test_missing_field(self, missing):
        obj = dict(GOOD_WORD)
        del obj[missing]
        with pytest.raises(CorpusError, match=missing):
            problem_from_json(obj, 1)

    def test_unknown_qtype(self):
        with pytest.raises(CorpusError, match="qtype"):
            problem_from_json({**GOOD_WORD, "qtype": "essay"}, 1)

    def test_mc_without_options(self):
        obj = dict(GOOD_MC)
        del obj["options"]
        with pytest.raises(CorpusError, match="options"):
            problem_from_json(obj, 1)

    def test_mc_labels_must_run_from_a(self):
        obj = {**GOOD_MC, "options": [{"label": "B", "text": "2"}, {"label": "C", "text": "9"}]}
        with pytest.raises(CorpusError, match="labels"):
            problem_from_json(obj, 1)

    def test_mc_gold_must_be_an_option(self):
        with pytest.raises(CorpusError, match="not among options"):
            problem_from_json({**GOOD_MC, "gold_answer": "D"}, 1)

    def test_tof_gold_must_be_boolean(self):
        with pytest.raises(CorpusError, match="boolean"):
            problem_from_json({**GOOD_TOF, "gold_answer": "maybe so"}, 1)

    def test_unknown_category(self):
        with pytest.raises(CorpusError, match="category"):
            problem_from_json({**GOOD_WORD, "category": "calculus"}, 1)

    def test_validate_collects_all_errors(self, tmp_path):
        bad_tof = {**GOOD_TOF, "id": "p9", "gold_answer": "maybe so"}
        path = tmp_path / "p.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(GOOD_WORD) + "\n")
            fh.write("{nope\n")
            fh.write(json.dumps(GOOD_WORD) + "\n")
            fh.write(json.dumps(bad_tof) + "\n")
        errors = validate_corpus(str(path))
        assert len(errors) == 3
        assert any("line 2" in e for e in errors)
        assert any("duplicate" in e for e in errors)

    def test_validate_ok_is_empty(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_WORD, GOOD_MC])
        assert validate_corpus(path) == []


class TestStats:
    def test_category_histogram(self, tmp_path):
        records = [
            {**GOOD_WORD, "id": f"a{i}", "category": "algebra"} for i in range(3)
        ] + [{**GOOD_WORD, "id": "g1", "category": "geometry"}]
        path = write_jsonl(tmp_path / "p.jsonl", records)
        stats = corpus_stats(load_corpus(path))
        assert stats.cells()["algebra"] == 3
        assert stats.cells()["geometry"] == 1
        assert stats.cells()["total"] == 4

    def test_stats_reject_knowledge(self, tmp_path):
        path = write_jsonl(tmp_path / "k.jsonl", [GOOD_KNOWLEDGE])
        with pytest.raises(ValueError):
            corpus_stats(load_corpus(path, KIND_KNOWLEDGE))


class TestShippedData:
    def test_demo_corpora_validate(self):
        assert validate_corpus("data/demo_problems.jsonl") == []
        assert validate_corpus("data/demo_knowledge.jsonl", KIND_KNOWLEDGE) == []

    def test_option_text_layout(self, tmp_path):
        path = write_jsonl(tmp_path / "p.jsonl", [GOOD_MC])
        p = load_corpus(path).get("p2")
        assert p.option_text() == "A.2 B.9 C.5"
