#!/usr/bin/env python3
"""Regenerate the demo mock script.

Builds scripted responses for every prompt the demo eval run will issue,
keyed by prompt hash, and writes them to data/demo_script.jsonl. Rerun
after any change to prompt templates, exemplars, or retrieval defaults.
"""

from __future__ import annotations

from pathlib import Path

from tutorprompt import config as config_mod
from tutorprompt import corpus as corpus_mod
from tutorprompt import scripting

ROOT = Path(__file__).resolve().parent.parent / "data"


def main():
    cfg = config_mod.Config(runner="none")
    problems = corpus_mod.load_corpus(str(ROOT / "demo_problems.jsonl"))
    knowledge = corpus_mod.load_corpus(
        str(ROOT / "demo_knowledge.jsonl"), corpus_mod.KIND_KNOWLEDGE
    )
    backend = scripting.build_eval_script(problems, cfg, knowledge)
    out = ROOT / "demo_script.jsonl"
    backend.save_script(str(out))
    print(f"wrote {out} ({len(backend)} scripted replies)")


if __name__ == "__main__":
    main()
