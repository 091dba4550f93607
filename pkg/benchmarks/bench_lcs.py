#!/usr/bin/env python3
"""Compare the compiled LCS kernel against the pure-Python fallback.

The LCS re-rank dominates retrieval cost (one DP per candidate pair), so
the inner loop ships as a compiled extension with a pure fallback chosen
at import. This benchmark times both on identical workloads and checks
they agree.
"""

from __future__ import annotations

import random
import time

from tutorprompt import textproc
from tutorprompt._lcs_py import lcs_len_ids as pure_kernel

try:
    from tutorprompt._lcskernel import lcs_len_ids as compiled_kernel
except ImportError:
    compiled_kernel = None


def make_pairs(n_pairs: int, length: int, vocab: int, seed: int = 7):
    rng = random.Random(seed)
    words = [f"w{i}" for i in range(vocab)]
    return [
        (
            [rng.choice(words) for _ in range(length)],
            [rng.choice(words) for _ in range(length)],
        )
        for _ in range(n_pairs)
    ]


def time_backend(pairs, fn) -> tuple[float, list[int]]:
    start = time.perf_counter()
    results = [fn(a, b) for a, b in pairs]
    return time.perf_counter() - start, results


def main():
    print(f"active backend: {textproc.LCS_BACKEND}")
    if compiled_kernel is None:
        print("compiled kernel unavailable; timing the fallback only")
    for length in (20, 60, 150):
        pairs = make_pairs(n_pairs=300, length=length, vocab=50)
        t_pure, r_pure = time_backend(pairs, lambda a, b: textproc.lcs_length_pure(a, b))
        line = f"len={length:4d}  pure={t_pure * 1000:8.1f} ms"
        if compiled_kernel is not None:
            t_fast, r_fast = time_backend(pairs, lambda a, b: textproc.lcs_length(a, b))
            assert r_pure == r_fast, "backends disagree"
            line += f"  compiled={t_fast * 1000:8.1f} ms  speedup={t_pure / t_fast:5.1f}x"
        print(line)


if __name__ == "__main__":
    main()
