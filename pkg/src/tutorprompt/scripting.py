"""Mock-script construction for offline runs.

Replays the exact retrieval + prompt-assembly steps an evaluation run
performs, so scripted responses can be keyed by the real prompt hashes
before the run happens. Used by tests and by the bundled demo.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import answers, config as config_mod, prompting, retrieval
from .corpus import KIND_PROBLEMS, Corpus, Problem
from .llm import MockBackend
from .prompting import PromptBundle, PromptFlags

BUNDLE_INITIAL = "initial"
BUNDLE_ADDITIONAL = "additional"


@dataclass(frozen=True)
class ItemPlan:
    """The prompts one item will produce during an eval run."""

    item: Problem
    initial: PromptBundle
    additional: Optional[PromptBundle]
    program_route: bool


def _solve_flags(flags: PromptFlags, program_route: bool) -> PromptFlags:
    if program_route or flags.no_program:
        return flags
    return PromptFlags(
        no_background=flags.no_background,
        no_similar=flags.no_similar,
        no_program=True,
        repeat_similar_k=flags.repeat_similar_k,
    )


def plan_bundles(
    corpus: Corpus,
    cfg: config_mod.Config,
    knowledge: Optional[Corpus] = None,
    flags: PromptFlags = PromptFlags(),
    *,
    greedy: bool = False,
    translate_zh: Optional[bool] = None,
    k_similar: Optional[int] = None,
) -> list[ItemPlan]:
    """Predict every bundle evaluate() will assemble for ``corpus``.

    Knowledge-query extraction is planned without a backend, which matches
    the degraded path an unscripted mock run takes.
    """
    if corpus.kind != KIND_PROBLEMS:
        raise ValueError("plan_bundles needs a problems corpus")
    pidx = retrieval.build_index(corpus, k1=cfg.bm25_k1, b=cfg.bm25_b)
    kindex = None
    if knowledge is not None and len(knowledge) > 0 and cfg.knowledge_top > 0:
        kindex = retrieval.build_index(knowledge, k1=cfg.bm25_k1, b=cfg.bm25_b)
    use_translate = cfg.translate_zh if translate_zh is None else translate_zh
    use_k = cfg.k_similar if k_similar is None else k_similar

    plans = []
    for item in corpus:
        similar: list[Problem] = []
        if not flags.no_similar and use_k > 0:
            cands = retrieval.retrieve_similar(
                pidx, item, corpus, m=cfg.m_candidates, k=use_k
            )
            similar = [corpus.get(c.item_id) for c in cands]
        kn = []
        if kindex is not None and not flags.no_background:
            analyses = [s.analysis for s in similar if s.analysis]
            queries = retrieval.extract_knowledge_queries(item, analyses, None)
            combined = " ".join([item.stem, *analyses])
            kn = retrieval.retrieve_knowledge(
                kindex, queries, combined, knowledge, m=cfg.m_candidates,
                top=cfg.knowledge_top,
            )
        exemplars = prompting.load_exemplars(item.qtype, cfg.n_exemplars)
        program_route = item.qtype in cfg.program_qtypes
        if greedy:
            bundle = prompting.assemble_prompt(item, similar, kn, exemplars, flags)
            plans.append(ItemPlan(item, bundle, None, False))
            continue
        eff_flags = _solve_flags(flags, program_route)
        initial = prompting.assemble_prompt(item, similar, kn, exemplars, eff_flags)
        additional = None
        if program_route and not eff_flags.no_program:
            if use_translate and item.language == "zh":
                additional = prompting.translation_request(item, similar, kn)
            else:
                additional = initial
        plans.append(ItemPlan(item, initial, additional, program_route))
    return plans


def gold_reply(item: Problem, kind: str, seed: int) -> str:
    """Reply that parses cleanly and lands on the item's gold answer."""
    final = answers.display_answer(item.gold_answer)
    return (
        "thought: Work through the quantities in the problem.\n"
        "steps:\n1. Read the problem.\n2. Compute the result.\n"
        f"answer: {final}"
    )


ReplyFn = Callable[[Problem, str, int], str]


def build_eval_script(
    corpus: Corpus,
    cfg: config_mod.Config,
    knowledge: Optional[Corpus] = None,
    flags: PromptFlags = PromptFlags(),
    *,
    greedy: bool = False,
    translate_zh: Optional[bool] = None,
    k_similar: Optional[int] = None,
    reply_fn: ReplyFn = gold_reply,
) -> MockBackend:
    """Scripted backend covering every (prompt, seed) an eval run can ask.

    Initial-round seeds are 0..n-1 (just 0 for greedy runs); the possible
    additional round uses seeds n..2n-2 against its own bundle.
    """
    backend = MockBackend()
    plans = plan_bundles(
        corpus, cfg, knowledge, flags,
        greedy=greedy, translate_zh=translate_zh, k_similar=k_similar,
    )
    for plan in plans:
        if greedy:
            backend.add(plan.initial, 0, reply_fn(plan.item, BUNDLE_INITIAL, 0))
            continue
        for seed in range(cfg.n_paths):
            backend.add(
                plan.initial, seed, reply_fn(plan.item, BUNDLE_INITIAL, seed)
            )
        if plan.additional is not None:
            for seed in range(cfg.n_paths, 2 * cfg.n_paths - 1):
                backend.add(
                    plan.additional, seed,
                    reply_fn(plan.item, BUNDLE_ADDITIONAL, seed),
                )
    return backend
