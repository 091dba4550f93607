"""Answer generation and selection.

One solve call runs the full verification state machine:

1. Sample n reasoning paths at the self-consistency temperature.
2. Double-check each path by executing its program and comparing the
   printed value against the path's own step-by-step answer.
3. If every path agrees with its own program, majority-vote the step
   answers and finish.
4. Otherwise ask for n-1 more paths (Chinese problems are re-asked
   through a translate-then-solve prompt) and run Further Selection over
   the pooled paths: the modal program answer wins whenever its frequency
   is at least that of the modal step answer.

Question types without a program route (and the no_program ablation)
reduce to plain self-consistency majority voting over step answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import answers, prompting
from .answers import AnswerParseError, AnswerValue, ParsedReply, ReplyParseError
from .corpus import KnowledgeEntry, Problem
from .llm import BackendError, GenerationRequest, LlmBackend, prompt_hash
from .prompting import ExemplarCase, PromptBundle, PromptFlags
from .runner import STATUS_OK, ProgramRunner

ROUND_INITIAL = "initial"
ROUND_ADDITIONAL = "additional"

ALL_CONSISTENT = "all_consistent"
NEEDS_MORE = "needs_more"

STAGE_MAJORITY = "majority_consistent"
STAGE_FURTHER_CODE = "further_selection_code"
STAGE_FURTHER_STEP = "further_selection_step"
STAGES = (STAGE_MAJORITY, STAGE_FURTHER_CODE, STAGE_FURTHER_STEP)


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolutionPath:
    index: int
    round: str
    seed: int
    prompt_sha256: str
    raw_text: str = ""
    reply: Optional[ParsedReply] = None
    code_ans: Optional[AnswerValue] = None
    self_consistent: bool = False
    error: str = ""

    def step_answer(self) -> Optional[AnswerValue]:
        return self.reply.answer if self.reply is not None else None


@dataclass(frozen=True)
class VotePair:
    step: tuple[tuple[AnswerValue, int], ...]
    code: tuple[tuple[AnswerValue, int], ...]


@dataclass(frozen=True)
class Verdict:
    final: AnswerValue
    stage: str
    votes: VotePair
    paths: tuple[SolutionPath, ...]

    def __post_init__(self):
        if self.stage not in STAGES:
            raise PipelineError(f"unknown stage {self.stage!r}")


@dataclass(frozen=True)
class SolveContext:
    """Everything retrieved or configured ahead of the backend calls."""

    similar: tuple[Problem, ...] = ()
    knowledge: tuple[KnowledgeEntry, ...] = ()
    exemplars: tuple[ExemplarCase, ...] = ()
    flags: PromptFlags = PromptFlags()


def _cluster(values: Sequence[AnswerValue]) -> list[tuple[AnswerValue, int]]:
    """Histogram under tolerance-aware equality, first-seen order.

    The representative of each cluster is its first member, so clustering
    is deterministic for a fixed value order.
    """
    clusters: list[tuple[AnswerValue, int]] = []
    for value in values:
        for i, (rep, count) in enumerate(clusters):
            if answers.answers_equal(rep, value):
                clusters[i] = (rep, count + 1)
                break
        else:
            clusters.append((value, 1))
    return clusters


def majority_vote(values: Sequence[AnswerValue]) -> AnswerValue:
    """Modal value; ties go to the earliest-seen cluster."""
    if not values:
        raise PipelineError("majority_vote needs at least one value")
    clusters = _cluster(values)
    return max(clusters, key=lambda rc: rc[1])[0]


def double_check(paths: Sequence[SolutionPath]) -> str:
    """all_consistent iff every path agrees with its own program output."""
    if not paths:
        raise PipelineError("double_check needs at least one path")
    ok = all(p.self_consistent for p in paths)
    return ALL_CONSISTENT if ok else NEEDS_MORE


def _top(clusters: list[tuple[AnswerValue, int]]) -> tuple[Optional[AnswerValue], int]:
    if not clusters:
        return None, 0
    rep, count = max(clusters, key=lambda rc: rc[1])
    return rep, count


def further_selection(paths: Sequence[SolutionPath]) -> Verdict:
    """Pick between the modal program answer and the modal step answer.

    Pools every supplied path; the program-answer histogram wins on a
    frequency tie.
    """
    step_values = [p.step_answer() for p in paths if p.step_answer() is not None]
    code_values = [p.code_ans for p in paths if p.code_ans is not None]
    step_clusters = _cluster(step_values)
    code_clusters = _cluster(code_values)
    top_step, step_freq = _top(step_clusters)
    top_code, code_freq = _top(code_clusters)
    if top_step is None and top_code is None:
        raise PipelineError("no valid paths: every reply failed to parse")
    if top_code is not None and code_freq >= step_freq:
        final, stage = top_code, STAGE_FURTHER_CODE
    else:
        final, stage = top_step, STAGE_FURTHER_STEP
    return Verdict(
        final=final,
        stage=stage,
        votes=VotePair(step=tuple(step_clusters), code=tuple(code_clusters)),
        paths=tuple(paths),
    )


def _run_path(
    index: int,
    round_name: str,
    seed: int,
    bundle: PromptBundle,
    temperature: float,
    qtype: str,
    backend: LlmBackend,
    runner: Optional[ProgramRunner],
    timeout_s: float,
) -> SolutionPath:
    sha = prompt_hash(bundle)
    try:
        result = backend.generate(
            GenerationRequest(bundle=bundle, temperature=temperature, seed_hint=seed)
        )
    except BackendError as exc:
        return SolutionPath(
            index=index, round=round_name, seed=seed, prompt_sha256=sha,
            error=f"generation failed: {exc}",
        )
    try:
        reply = answers.parse_reply(result.raw_text, qtype)
    except ReplyParseError as exc:
        return SolutionPath(
            index=index, round=round_name, seed=seed, prompt_sha256=sha,
            raw_text=result.raw_text, error=f"unparseable reply: {exc}",
        )
    code_ans = None
    if runner is not None and reply.program:
        outcome = runner.run_program(reply.program, timeout_s)
        if outcome.status == STATUS_OK:
            try:
                code_ans = answers.answer_from_text(outcome.stdout_last_line, qtype)
            except AnswerParseError:
                code_ans = None
    consistent = code_ans is not None and answers.answers_equal(code_ans, reply.answer)
    return SolutionPath(
        index=index, round=round_name, seed=seed, prompt_sha256=sha,
        raw_text=result.raw_text, reply=reply, code_ans=code_ans,
        self_consistent=consistent,
    )


def additional_round(
    test: Problem,
    context: SolveContext,
    n_minus_1: int,
    backend: LlmBackend,
    runner: Optional[ProgramRunner],
    *,
    temperature: float,
    timeout_s: float,
    translate_zh: bool = True,
    start_index: int = 0,
    start_seed: int = 0,
) -> list[SolutionPath]:
    """n-1 extra paths; Chinese problems go through translate-then-solve."""
    if translate_zh and test.language == "zh":
        bundle = prompting.translation_request(
            test, list(context.similar), list(context.knowledge)
        )
    else:
        bundle = prompting.assemble_prompt(
            test, list(context.similar), list(context.knowledge),
            list(context.exemplars), context.flags,
        )
    paths = []
    for i in range(n_minus_1):
        paths.append(
            _run_path(
                start_index + i, ROUND_ADDITIONAL, start_seed + i, bundle,
                temperature, test.qtype, backend, runner, timeout_s,
            )
        )
    if paths and all(p.error.startswith("generation failed") for p in paths):
        raise PipelineError("additional round failed: no path generated")
    return paths


def solve(
    test: Problem,
    context: SolveContext,
    n: int,
    backend: LlmBackend,
    runner: Optional[ProgramRunner] = None,
    *,
    temperature: float = 0.5,
    timeout_s: float = 10.0,
    translate_zh: bool = True,
    program_route: bool = True,
) -> Verdict:
    """Full verification state machine over n sampled paths."""
    if n < 2:
        raise PipelineError("solve needs n >= 2 paths")
    use_programs = program_route and not context.flags.no_program
    flags = context.flags
    if not use_programs and not flags.no_program:
        flags = prompting.PromptFlags(
            no_background=flags.no_background,
            no_similar=flags.no_similar,
            no_program=True,
            repeat_similar_k=flags.repeat_similar_k,
        )
    bundle = prompting.assemble_prompt(
        test, list(context.similar), list(context.knowledge),
        list(context.exemplars), flags,
    )
    path_runner = runner if use_programs else None
    paths = [
        _run_path(
            i, ROUND_INITIAL, i, bundle, temperature, test.qtype,
            backend, path_runner, timeout_s,
        )
        for i in range(n)
    ]
    parsed = [p for p in paths if p.reply is not None]
    if not parsed:
        raise PipelineError("no valid paths: every reply failed to parse")

    if not use_programs:
        # plain self-consistency: one round, majority over step answers
        step_values = [p.reply.answer for p in parsed]
        clusters = _cluster(step_values)
        return Verdict(
            final=majority_vote(step_values),
            stage=STAGE_FURTHER_STEP,
            votes=VotePair(step=tuple(clusters), code=()),
            paths=tuple(paths),
        )

    if double_check(paths) == ALL_CONSISTENT:
        step_values = [p.reply.answer for p in parsed]
        code_values = [p.code_ans for p in paths if p.code_ans is not None]
        return Verdict(
            final=majority_vote(step_values),
            stage=STAGE_MAJORITY,
            votes=VotePair(
                step=tuple(_cluster(step_values)), code=tuple(_cluster(code_values))
            ),
            paths=tuple(paths),
        )

    context_for_more = SolveContext(
        similar=context.similar, knowledge=context.knowledge,
        exemplars=context.exemplars, flags=flags,
    )
    more = additional_round(
        test, context_for_more, n - 1, backend, path_runner,
        temperature=temperature, timeout_s=timeout_s, translate_zh=translate_zh,
        start_index=n, start_seed=n,
    )
    return further_selection(list(paths) + more)


def solve_greedy(
    test: Problem,
    context: SolveContext,
    backend: LlmBackend,
    *,
    temperature: float = 0.0,
) -> Verdict:
    """Single greedy path, no programs, no selection machinery."""
    bundle = prompting.assemble_prompt(
        test, list(context.similar), list(context.knowledge),
        list(context.exemplars), context.flags,
    )
    path = _run_path(
        0, ROUND_INITIAL, 0, bundle, temperature, test.qtype, backend, None, 0.0
    )
    if path.reply is None:
        raise PipelineError(f"no valid paths: {path.error}")
    return Verdict(
        final=path.reply.answer,
        stage=STAGE_FURTHER_STEP,
        votes=VotePair(step=((path.reply.answer, 1),), code=()),
        paths=(path,),
    )


def verdict_to_json(verdict: Verdict) -> dict:
    """JSON form used by eval traces; deterministic field order."""

    def vote_rows(rows):
        return [
            {"answer": answers.display_answer(rep), "count": count}
            for rep, count in rows
        ]

    return {
        "final": verdict.final.to_json(),
        "stage": verdict.stage,
        "votes": {
            "step": vote_rows(verdict.votes.step),
            "code": vote_rows(verdict.votes.code),
        },
        "paths": [
            {
                "index": p.index,
                "round": p.round,
                "seed": p.seed,
                "prompt_sha256": p.prompt_sha256,
                "step_answer": (
                    answers.display_answer(p.reply.answer) if p.reply else None
                ),
                "code_answer": (
                    answers.display_answer(p.code_ans)
                    if p.code_ans is not None
                    else None
                ),
                "self_consistent": p.self_consistent,
                "error": p.error or None,
            }
            for p in verdict.paths
        ],
    }
