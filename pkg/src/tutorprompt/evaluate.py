"""Benchmark evaluation: accuracy runs, ablations, and similar-problem
count sweeps, with a per-item JSONL trace for auditing every selection.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import answers, config as config_mod, pipeline, prompting, retrieval
from .corpus import KIND_PROBLEMS, Corpus, Problem
from .llm import HttpBackend, LlmBackend, MockBackend
from .pipeline import SolveContext, Verdict
from .prompting import PromptFlags
from .runner import ChildProcessRunner, ProgramRunner

TOGGLES = ("no_bg_sim", "no_program", "no_selection", "no_translate")

STAGE_ERROR = "error"


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    n_items: int
    n_correct: int
    accuracy: float
    per_stage_counts: dict
    config_fingerprint: str
    label: str = "baseline"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_items > 0 and abs(self.accuracy - self.n_correct / self.n_items) > 1e-12:
            raise EvalError("accuracy must equal n_correct / n_items")
        if sum(self.per_stage_counts.values()) != self.n_items:
            raise EvalError("per-stage counts must sum to n_items")

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset,
            "label": self.label,
            "n_items": self.n_items,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "per_stage_counts": dict(sorted(self.per_stage_counts.items())),
            "config_fingerprint": self.config_fingerprint,
            "extra": self.extra,
        }


def build_backend(cfg: config_mod.Config) -> LlmBackend:
    if cfg.backend == "mock":
        return MockBackend(cfg.mock_script or None)
    return HttpBackend(
        model=cfg.model,
        base_url=cfg.base_url,
        api_key_env=cfg.api_key_env,
        max_in_flight=cfg.max_workers,
    )


def build_runner(cfg: config_mod.Config) -> Optional[ProgramRunner]:
    if cfg.runner == "none":
        return None
    return ChildProcessRunner(cmd=cfg.harness_cmd, memory_mb=cfg.exec_memory_mb)


@dataclass(frozen=True)
class ItemResult:
    item: Problem
    verdict: Optional[Verdict]
    correct: bool
    error: str = ""
    n_similar_found: int = 0


def _solve_item(
    item: Problem,
    pool_index,
    pool: Corpus,
    kindex,
    kbase: Optional[Corpus],
    cfg: config_mod.Config,
    backend: LlmBackend,
    runner: Optional[ProgramRunner],
    flags: PromptFlags,
    *,
    greedy: bool,
    translate_zh: bool,
    k_similar: int,
) -> ItemResult:
    try:
        similar: list[Problem] = []
        if not flags.no_similar and k_similar > 0:
            cands = retrieval.retrieve_similar(
                pool_index, item, pool, m=cfg.m_candidates, k=k_similar
            )
            similar = [pool.get(c.item_id) for c in cands]
        knowledge = []
        if kindex is not None and kbase is not None and not flags.no_background:
            analyses = [s.analysis for s in similar if s.analysis]
            queries = retrieval.extract_knowledge_queries(item, analyses, backend)
            combined = " ".join([item.stem, *analyses])
            knowledge = retrieval.retrieve_knowledge(
                kindex, queries, combined, kbase, m=cfg.m_candidates,
                top=cfg.knowledge_top,
            )
        exemplars = prompting.load_exemplars(item.qtype, cfg.n_exemplars)
        context = SolveContext(
            similar=tuple(similar), knowledge=tuple(knowledge),
            exemplars=tuple(exemplars), flags=flags,
        )
        if greedy:
            verdict = pipeline.solve_greedy(
                item, context, backend, temperature=cfg.temperature_greedy
            )
        else:
            verdict = pipeline.solve(
                item, context, cfg.n_paths, backend, runner,
                temperature=cfg.temperature_sc,
                timeout_s=cfg.exec_timeout_s,
                translate_zh=translate_zh,
                program_route=item.qtype in cfg.program_qtypes,
            )
        correct = answers.answers_equal(verdict.final, item.gold_answer)
        return ItemResult(item, verdict, correct, n_similar_found=len(similar))
    except Exception as exc:  # noqa: BLE001 - one bad item must not kill the run
        return ItemResult(item, None, False, error=f"{type(exc).__name__}: {exc}")


def _trace_record(result: ItemResult) -> dict:
    return {
        "item_id": result.item.id,
        "gold": result.item.gold_answer.to_json(),
        "correct": result.correct,
        "stage": result.verdict.stage if result.verdict else STAGE_ERROR,
        "n_similar_found": result.n_similar_found,
        "error": result.error or None,
        "verdict": pipeline.verdict_to_json(result.verdict) if result.verdict else None,
    }


def evaluate(
    corpus: Corpus,
    cfg: config_mod.Config,
    *,
    knowledge: Optional[Corpus] = None,
    backend: Optional[LlmBackend] = None,
    runner: Optional[ProgramRunner] = None,
    trace_path: Optional[str] = None,
    dataset: str = "corpus",
    label: str = "baseline",
    flags: PromptFlags = PromptFlags(),
    greedy: bool = False,
    translate_zh: Optional[bool] = None,
    k_similar: Optional[int] = None,
    extra: Optional[dict] = None,
) -> EvalReport:
    """Solve every problem in ``corpus`` and score against gold answers.

    Items never abort the run: an item that raises is scored incorrect
    and recorded in the trace under stage "error".
    """
    if corpus.kind != KIND_PROBLEMS:
        raise EvalError("evaluation corpus must contain problems")
    if len(corpus) == 0:
        raise EvalError("empty corpus")
    backend = backend if backend is not None else build_backend(cfg)
    if runner is None and not greedy and cfg.runner != "none":
        runner = build_runner(cfg)
    pool_index = retrieval.build_index(corpus, k1=cfg.bm25_k1, b=cfg.bm25_b)
    kindex = None
    if knowledge is not None and len(knowledge) > 0 and cfg.knowledge_top > 0:
        kindex = retrieval.build_index(knowledge, k1=cfg.bm25_k1, b=cfg.bm25_b)
    use_translate = cfg.translate_zh if translate_zh is None else translate_zh
    use_k = cfg.k_similar if k_similar is None else k_similar

    items = list(corpus)
    with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool_exec:
        futures = [
            pool_exec.submit(
                _solve_item,
                item, pool_index, corpus, kindex, knowledge, cfg, backend,
                runner, flags,
                greedy=greedy, translate_zh=use_translate, k_similar=use_k,
            )
            for item in items
        ]
        results = [f.result() for f in futures]

    n_correct = sum(1 for r in results if r.correct)
    stage_counts: dict[str, int] = {}
    for r in results:
        stage = r.verdict.stage if r.verdict else STAGE_ERROR
        stage_counts[stage] = stage_counts.get(stage, 0) + 1

    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for r in results:
                fh.write(json.dumps(_trace_record(r), ensure_ascii=False) + "\n")

    report_extra = dict(extra or {})
    short = sum(
        1
        for r in results
        if not flags.no_similar and not r.error and r.n_similar_found < use_k
    )
    if short:
        report_extra["items_with_fewer_similar"] = short
    return EvalReport(
        dataset=dataset,
        n_items=len(items),
        n_correct=n_correct,
        accuracy=n_correct / len(items),
        per_stage_counts=stage_counts,
        config_fingerprint=config_mod.fingerprint(cfg),
        label=label,
        extra=report_extra,
    )


def report_from_trace(trace_path: str) -> tuple[float, dict]:
    """Recompute (accuracy, per-stage counts) from a trace file."""
    n = 0
    correct = 0
    stages: dict[str, int] = {}
    with open(trace_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            n += 1
            correct += bool(rec["correct"])
            stages[rec["stage"]] = stages.get(rec["stage"], 0) + 1
    if n == 0:
        raise EvalError("empty trace")
    return correct / n, stages


def _toggle_kwargs(toggle: str) -> dict:
    if toggle == "no_bg_sim":
        return {"flags": PromptFlags(no_background=True, no_similar=True)}
    if toggle == "no_program":
        return {"flags": PromptFlags(no_program=True)}
    if toggle == "no_selection":
        return {"greedy": True}
    if toggle == "no_translate":
        return {"translate_zh": False}
    raise EvalError(f"unknown toggle {toggle!r}; pick from {TOGGLES}")


def ablate(
    corpus: Corpus,
    cfg: config_mod.Config,
    toggles: list[str],
    **kwargs,
) -> list[EvalReport]:
    """One report per requested toggle; no toggles means one baseline run."""
    if not toggles:
        return [evaluate(corpus, cfg, label="baseline", **kwargs)]
    reports = []
    for toggle in toggles:
        overrides = _toggle_kwargs(toggle)
        reports.append(evaluate(corpus, cfg, label=toggle, **{**kwargs, **overrides}))
    return reports


def similar_sweep(
    corpus: Corpus,
    cfg: config_mod.Config,
    k_max: int,
    mode: str = "varying",
    **kwargs,
) -> list[EvalReport]:
    """Accuracy as a function of how many similar problems the prompt holds.

    varying: top-K distinct similar problems. repeated: the single best
    similar problem repeated K times.
    """
    if k_max < 1:
        raise EvalError("k_max must be >= 1")
    if mode not in ("varying", "repeated"):
        raise EvalError(f"mode must be varying or repeated, got {mode!r}")
    reports = []
    for k in range(1, k_max + 1):
        if mode == "varying":
            flags = PromptFlags()
            k_arg = k
        else:
            flags = PromptFlags(repeat_similar_k=k)
            k_arg = 1
        reports.append(
            evaluate(
                corpus, cfg,
                label=f"{mode}_k{k}",
                flags=flags,
                k_similar=k_arg,
                extra={"mode": mode, "k": k},
                **kwargs,
            )
        )
    return reports
