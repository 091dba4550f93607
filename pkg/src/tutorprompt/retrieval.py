"""Dual retrieval: similar problems and background knowledge.

Both retrievals share one recipe: a BM25 pass narrows the corpus to a
small candidate pool, then an exact longest-common-subsequence re-rank
orders the pool. Similar-problem retrieval additionally drops the test
problem itself and any candidate that differs from it only in numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import textproc
from .corpus import Corpus, KnowledgeEntry, Problem
from .llm import BackendError, GenerationRequest, LlmBackend
from .prompting import PromptBundle, PromptMeta

DEFAULT_K1 = 1.5
DEFAULT_B = 0.75
DEFAULT_POOL = 20
KNOWLEDGE_TOP = 3

# Fixed instruction for pulling key concepts out of a problem before
# knowledge lookup; the stem is appended after the colon.
KNOWLEDGE_QUERY_PROMPT = (
    "List the key knowledge points, theorems, or concepts needed to solve "
    "this problem, as a comma-separated list only: "
)


class RetrievalError(ValueError):
    pass


@dataclass(frozen=True)
class RankedCandidate:
    item_id: str
    bm25_score: float
    lcs_len: int = 0

    def __post_init__(self):
        if self.lcs_len < 0:
            raise RetrievalError("lcs_len must be >= 0")


@dataclass(frozen=True)
class Bm25Index:
    postings: dict
    doc_lengths: dict
    avg_doc_length: float
    doc_count: int
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    doc_order: tuple[str, ...] = ()
    doc_tokens: dict = field(default_factory=dict)


def _doc_tokens(item, language: str) -> list[str]:
    if isinstance(item, KnowledgeEntry):
        # titles carry theorem names that queries target
        return textproc.tokenize(f"{item.title} {item.body}", language)
    return textproc.tokenize(item.stem, item.language)


def build_index(
    corpus: Corpus, k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> Bm25Index:
    """Inverted index with per-document lengths for Okapi scoring."""
    if len(corpus) == 0:
        raise RetrievalError("cannot index an empty corpus")
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    doc_tokens: dict[str, list[str]] = {}
    order: list[str] = []
    for item in corpus:
        language = getattr(item, "language", None) or textproc.detect_language(
            getattr(item, "body", "") or getattr(item, "stem", "")
        )
        tokens = _doc_tokens(item, language)
        doc_lengths[item.id] = len(tokens)
        doc_tokens[item.id] = tokens
        order.append(item.id)
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((item.id, tf))
    avg = sum(doc_lengths.values()) / len(doc_lengths)
    return Bm25Index(
        postings=postings,
        doc_lengths=doc_lengths,
        avg_doc_length=avg,
        doc_count=len(doc_lengths),
        k1=k1,
        b=b,
        doc_order=tuple(order),
        doc_tokens=doc_tokens,
    )


def bm25_score_all(index: Bm25Index, query: Sequence[str]) -> dict:
    """Okapi BM25 score of every document against the query terms."""
    scores: dict[str, float] = {doc_id: 0.0 for doc_id in index.doc_order}
    n = index.doc_count
    seen: set[str] = set()
    for term in query:
        if term in seen:
            continue
        seen.add(term)
        plist = index.postings.get(term)
        if not plist:
            continue
        df = len(plist)
        idf = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
        for doc_id, tf in plist:
            dl = index.doc_lengths[doc_id]
            denom = tf + index.k1 * (1.0 - index.b + index.b * dl / index.avg_doc_length)
            scores[doc_id] += idf * tf * (index.k1 + 1.0) / denom
    return scores


def bm25_topk(index: Bm25Index, query: Sequence[str], k: int) -> list[RankedCandidate]:
    """Top-k documents by BM25 score, ties broken by ascending doc id."""
    if k < 1:
        raise RetrievalError("k must be >= 1")
    scores = bm25_score_all(index, query)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [RankedCandidate(doc_id, score) for doc_id, score in ranked[:k]]


def retrieve_similar(
    index: Bm25Index,
    test: Problem,
    pool: Corpus,
    m: int = DEFAULT_POOL,
    k: int = 1,
) -> list[RankedCandidate]:
    """Most similar problems to ``test``.

    BM25 narrows the pool to m candidates; identical problems and numeric
    variants of the test stem are excluded; survivors are re-ranked by
    token-level LCS length against the test stem.
    """
    if not m >= k >= 0:
        raise RetrievalError("need m >= k >= 0")
    if k == 0:
        return []
    query = textproc.tokenize(test.stem, test.language)
    candidates = bm25_topk(index, query, m)
    survivors: list[RankedCandidate] = []
    for cand in candidates:
        item = pool.get(cand.item_id)
        if item is None or item.id == test.id:
            continue
        if textproc.is_numeric_variant(test.stem, item.stem, test.language):
            continue
        lcs = textproc.lcs_length(query, index.doc_tokens[cand.item_id])
        survivors.append(replace(cand, lcs_len=lcs))
    survivors.sort(key=lambda c: (-c.lcs_len, -c.bm25_score, c.item_id))
    return survivors[:k]


def extract_knowledge_queries(
    test: Problem,
    analyses: Sequence[str],
    llm: Optional[LlmBackend] = None,
) -> frozenset[str]:
    """Token set describing what background knowledge the problem needs.

    The base set comes from the stem plus any available analyses; a
    keyword reply from the backend widens it. Backend failure degrades to
    the base set rather than failing the retrieval.
    """
    base = frozenset(textproc.build_token_set([test.stem, *analyses], test.language))
    if llm is None:
        return base
    bundle = PromptBundle(
        system="",
        user=KNOWLEDGE_QUERY_PROMPT + test.stem,
        meta=PromptMeta(
            qtype=test.qtype,
            language=test.language,
            n_similar_included=0,
            knowledge_ids=(),
            similar_ids=(),
        ),
    )
    try:
        result = llm.generate(GenerationRequest(bundle=bundle, temperature=0.0))
    except BackendError:
        return base
    extra: set[str] = set()
    for phrase in result.raw_text.split(","):
        for word in phrase.split():
            word = word.strip().strip(".;:!?()[]{}\"'")
            if not word or textproc.is_operand(word):
                continue
            extra.add(word)
    stop = textproc.load_stopwords(test.language)
    return frozenset(base | {w for w in extra if w.lower() not in stop})


def retrieve_knowledge(
    kindex: Bm25Index,
    queries: frozenset[str],
    combined_text: str,
    base: Corpus,
    m: int = DEFAULT_POOL,
    top: int = KNOWLEDGE_TOP,
) -> list[KnowledgeEntry]:
    """Top background-knowledge entries for a query token set.

    BM25 over the knowledge index narrows to m candidates; each is then
    ranked by LCS length between its body and the combined problem text.
    """
    if not queries:
        return []
    language = textproc.detect_language(combined_text)
    target = textproc.tokenize(combined_text, language)
    candidates = bm25_topk(kindex, sorted(queries), m)
    ranked: list[tuple[int, float, str]] = []
    for cand in candidates:
        entry = base.get(cand.item_id)
        if entry is None:
            continue
        body_tokens = textproc.tokenize(
            entry.body, textproc.detect_language(entry.body)
        )
        lcs = textproc.lcs_length(body_tokens, target)
        ranked.append((lcs, cand.bm25_score, cand.item_id))
    ranked.sort(key=lambda t: (-t[0], -t[1], t[2]))
    return [base.get(item_id) for _, _, item_id in ranked[:top]]
