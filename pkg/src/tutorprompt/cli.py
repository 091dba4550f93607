"""Command-line surface.

Verbs: corpus validate|stats, index build, retrieve similar|knowledge,
solve one, eval run|ablate|sweep-similar. Structured results print as
JSON on stdout; diagnostics go to stderr. Exit codes: 0 on a completed
run, 1 on data/runtime errors, 2 on configuration errors.
"""

from __future__ import annotations

import json
import sys

import click

from . import config as config_mod
from . import corpus as corpus_mod
from . import evaluate as eval_mod
from . import pipeline, retrieval, textproc

CONFIG_EXIT_CODE = 2


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False, indent=2))


def _load_cfg(config_path, overrides) -> config_mod.Config:
    try:
        return config_mod.load_config(config_path, overrides)
    except config_mod.ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(CONFIG_EXIT_CODE)


def _collect_overrides(kwargs, set_pairs) -> dict:
    overrides = {}
    for key, value in kwargs.items():
        if value is not None:
            overrides[key] = value
    for pair in set_pairs or ():
        if "=" not in pair:
            click.echo(f"config error: --set expects key=value, got {pair!r}", err=True)
            sys.exit(CONFIG_EXIT_CODE)
        key, _, value = pair.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="Path to a key = value config file."),
        click.option("--backend", type=click.Choice(["mock", "live"]), default=None),
        click.option("--mock-script", "mock_script", type=click.Path(), default=None),
        click.option("--model", default=None),
        click.option("--n-paths", "n_paths", type=int, default=None),
        click.option("--temperature-sc", "temperature_sc", type=float, default=None),
        click.option("--temperature-greedy", "temperature_greedy", type=float, default=None),
        click.option("--k-similar", "k_similar", type=int, default=None),
        click.option("--m-candidates", "m_candidates", type=int, default=None),
        click.option("--n-exemplars", "n_exemplars", type=int, default=None),
        click.option("--knowledge-top", "knowledge_top", type=int, default=None),
        click.option("--runner", type=click.Choice(["none", "harness"]), default=None),
        click.option("--harness-cmd", "harness_cmd", default=None),
        click.option("--max-workers", "max_workers", type=int, default=None),
        click.option("--set", "set_pairs", multiple=True,
                     help="Override any config key: --set key=value."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _cfg_from_kwargs(kwargs) -> config_mod.Config:
    config_path = kwargs.pop("config_path")
    set_pairs = kwargs.pop("set_pairs")
    overrides = _collect_overrides(kwargs, set_pairs)
    return _load_cfg(config_path, overrides)


@click.group()
def main():
    """Retrieval-augmented math problem solving with verification."""


@main.group()
def corpus():
    """Inspect and validate problem / knowledge corpora."""


@corpus.command("validate")
@click.argument("path", type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["problems", "knowledge"]), default="problems")
def corpus_validate(path, kind):
    problems = corpus_mod.validate_corpus(path, kind)
    if problems:
        for msg in problems:
            click.echo(msg, err=True)
        sys.exit(1)
    click.echo("ok")


@corpus.command("stats")
@click.argument("path", type=click.Path(exists=True))
def corpus_stats_cmd(path):
    try:
        loaded = corpus_mod.load_corpus(path, corpus_mod.KIND_PROBLEMS)
        stats = corpus_mod.corpus_stats(loaded)
    except corpus_mod.CorpusError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json(stats.cells())


@main.group()
def index():
    """Build retrieval indexes."""


@index.command("build")
@click.argument("path", type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["problems", "knowledge"]), default="problems")
@click.option("--bm25-k1", type=float, default=retrieval.DEFAULT_K1)
@click.option("--bm25-b", type=float, default=retrieval.DEFAULT_B)
def index_build(path, kind, bm25_k1, bm25_b):
    try:
        loaded = corpus_mod.load_corpus(path, kind)
        idx = retrieval.build_index(loaded, k1=bm25_k1, b=bm25_b)
    except (corpus_mod.CorpusError, retrieval.RetrievalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json(
        {
            "doc_count": idx.doc_count,
            "avg_doc_length": idx.avg_doc_length,
            "n_terms": len(idx.postings),
            "k1": idx.k1,
            "b": idx.b,
        }
    )


@main.group()
def retrieve():
    """Run the two retrieval procedures."""


@retrieve.command("similar")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--id", "item_id", required=True, help="Test problem id inside the corpus.")
@click.option("-k", "k", type=int, default=1)
@click.option("-m", "m", type=int, default=retrieval.DEFAULT_POOL)
def retrieve_similar_cmd(corpus_path, item_id, k, m):
    try:
        pool = corpus_mod.load_corpus(corpus_path, corpus_mod.KIND_PROBLEMS)
        test = pool.get(item_id)
        if test is None:
            raise corpus_mod.CorpusError(f"no problem with id {item_id!r}")
        idx = retrieval.build_index(pool)
        cands = retrieval.retrieve_similar(idx, test, pool, m=m, k=k)
    except (corpus_mod.CorpusError, retrieval.RetrievalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json(
        [
            {
                "item_id": c.item_id,
                "bm25_score": c.bm25_score,
                "lcs_len": c.lcs_len,
                "stem": pool.get(c.item_id).stem,
            }
            for c in cands
        ]
    )


@retrieve.command("knowledge")
@click.option("--knowledge", "knowledge_path", type=click.Path(exists=True), required=True)
@click.option("--stem", required=True, help="Problem text to retrieve knowledge for.")
@click.option("--top", type=int, default=retrieval.KNOWLEDGE_TOP)
@click.option("-m", "m", type=int, default=retrieval.DEFAULT_POOL)
def retrieve_knowledge_cmd(knowledge_path, stem, top, m):
    try:
        base = corpus_mod.load_corpus(knowledge_path, corpus_mod.KIND_KNOWLEDGE)
        kidx = retrieval.build_index(base)
        language = textproc.detect_language(stem)
        queries = frozenset(textproc.build_token_set([stem], language))
        entries = retrieval.retrieve_knowledge(kidx, queries, stem, base, m=m, top=top)
    except (corpus_mod.CorpusError, retrieval.RetrievalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json(
        [{"id": e.id, "title": e.title, "body": e.body, "source": e.source} for e in entries]
    )


@main.group()
def solve():
    """Solve problems through the full pipeline."""


@solve.command("one")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--id", "item_id", required=True)
@click.option("--knowledge", "knowledge_path", type=click.Path(exists=True), default=None)
@click.option("--greedy", is_flag=True, default=False,
              help="Single path at the greedy temperature, no selection.")
@config_options
def solve_one(corpus_path, item_id, knowledge_path, greedy, **kwargs):
    cfg = _cfg_from_kwargs(kwargs)
    try:
        pool = corpus_mod.load_corpus(corpus_path, corpus_mod.KIND_PROBLEMS)
        test = pool.get(item_id)
        if test is None:
            raise corpus_mod.CorpusError(f"no problem with id {item_id!r}")
        kbase = (
            corpus_mod.load_corpus(knowledge_path, corpus_mod.KIND_KNOWLEDGE)
            if knowledge_path
            else None
        )
        backend = eval_mod.build_backend(cfg)
        runner = None if greedy else eval_mod.build_runner(cfg)
        pidx = retrieval.build_index(pool, k1=cfg.bm25_k1, b=cfg.bm25_b)
        kidx = (
            retrieval.build_index(kbase, k1=cfg.bm25_k1, b=cfg.bm25_b)
            if kbase is not None and len(kbase) > 0
            else None
        )
        result = eval_mod._solve_item(
            test, pidx, pool, kidx, kbase, cfg, backend, runner,
            eval_mod.PromptFlags(),
            greedy=greedy, translate_zh=cfg.translate_zh, k_similar=cfg.k_similar,
        )
    except corpus_mod.CorpusError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    if result.verdict is None:
        click.echo(f"solve failed: {result.error}", err=True)
        sys.exit(1)
    _echo_json(
        {
            "item_id": test.id,
            "gold": test.gold_answer.to_json(),
            "correct": result.correct,
            "verdict": pipeline.verdict_to_json(result.verdict),
        }
    )


@main.group("eval")
def eval_group():
    """Benchmark evaluation runs."""


def _load_eval_inputs(corpus_path, knowledge_path):
    pool = corpus_mod.load_corpus(corpus_path, corpus_mod.KIND_PROBLEMS)
    kbase = (
        corpus_mod.load_corpus(knowledge_path, corpus_mod.KIND_KNOWLEDGE)
        if knowledge_path
        else None
    )
    return pool, kbase


@eval_group.command("run")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--knowledge", "knowledge_path", type=click.Path(exists=True), default=None)
@click.option("--trace", "trace_path", type=click.Path(), default=None)
@click.option("--dataset", default=None, help="Dataset name recorded in the report.")
@config_options
def eval_run(corpus_path, knowledge_path, trace_path, dataset, **kwargs):
    cfg = _cfg_from_kwargs(kwargs)
    try:
        pool, kbase = _load_eval_inputs(corpus_path, knowledge_path)
        report = eval_mod.evaluate(
            pool, cfg,
            knowledge=kbase,
            trace_path=trace_path,
            dataset=dataset or corpus_path,
        )
    except (corpus_mod.CorpusError, eval_mod.EvalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json(report.to_json())


@eval_group.command("ablate")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--knowledge", "knowledge_path", type=click.Path(exists=True), default=None)
@click.option("--toggle", "toggles", multiple=True,
              type=click.Choice(list(eval_mod.TOGGLES)))
@config_options
def eval_ablate(corpus_path, knowledge_path, toggles, **kwargs):
    cfg = _cfg_from_kwargs(kwargs)
    try:
        pool, kbase = _load_eval_inputs(corpus_path, knowledge_path)
        reports = eval_mod.ablate(pool, cfg, list(toggles), knowledge=kbase,
                                  dataset=corpus_path)
    except (corpus_mod.CorpusError, eval_mod.EvalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json([r.to_json() for r in reports])


@eval_group.command("sweep-similar")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--knowledge", "knowledge_path", type=click.Path(exists=True), default=None)
@click.option("--k-max", "k_max", type=int, default=5)
@click.option("--mode", type=click.Choice(["varying", "repeated"]), default="varying")
@config_options
def eval_sweep(corpus_path, knowledge_path, k_max, mode, **kwargs):
    cfg = _cfg_from_kwargs(kwargs)
    try:
        pool, kbase = _load_eval_inputs(corpus_path, knowledge_path)
        reports = eval_mod.similar_sweep(pool, cfg, k_max, mode, knowledge=kbase,
                                         dataset=corpus_path)
    except (corpus_mod.CorpusError, eval_mod.EvalError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json([r.to_json() for r in reports])


if __name__ == "__main__":
    main()
