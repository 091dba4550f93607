#!/usr/bin/env python3
"""Generate the bundled MathMC / MathToF fixture corpora.

The shipped files are synthetic stand-ins with the same shape as the real
benchmarks: 1000 Chinese multiple-choice items and 1000 Chinese
true-or-false items with the reference per-category histogram
(MathMC 619/113/227/27/7/7, MathToF 675/61/197/37/13/17). Generation is
seeded, so rerunning this script reproduces the committed files byte for
byte.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

MATHMC_CELLS = {
    "arithmetic": 619,
    "algebra": 113,
    "geometry": 227,
    "statistics": 27,
    "reasoning": 7,
    "others": 7,
}
MATHTOF_CELLS = {
    "arithmetic": 675,
    "algebra": 61,
    "geometry": 197,
    "statistics": 37,
    "reasoning": 13,
    "others": 17,
}

SEED = 20240601


def make_case(rng: random.Random, category: str):
    """One (stem, answer, analysis) triple with integer answer."""
    if category == "arithmetic":
        a, b = rng.randint(12, 89), rng.randint(11, 78)
        stem = f"小明有{a}个苹果，又买了{b}个，现在一共有多少个苹果？"
        ans = a + b
        analysis = f"先算{a}+{b}={ans}，所以一共有{ans}个苹果。"
    elif category == "algebra":
        k, x = rng.randint(3, 9), rng.randint(6, 40)
        stem = f"一个数的{k}倍是{k * x}，这个数是多少？"
        ans = x
        analysis = f"用除法求这个数：{k * x}÷{k}={x}。"
    elif category == "geometry":
        length, w = rng.randint(8, 30), rng.randint(3, 7)
        stem = f"一个长方形的长是{length}厘米，宽是{w}厘米，它的周长是多少厘米？"
        ans = 2 * (length + w)
        analysis = f"周长=(长+宽)×2=({length}+{w})×2={ans}厘米。"
    elif category == "statistics":
        base = rng.randint(70, 90)
        scores = [base + d for d in (-2, -1, 0, 1, 2)]
        rng.shuffle(scores)
        stem = "五次测验的成绩分别是" + "、".join(f"{s}分" for s in scores) + "，平均分是多少分？"
        ans = base
        analysis = f"五次成绩的总和是{sum(scores)}分，{sum(scores)}÷5={base}分。"
    elif category == "reasoning":
        a, d = rng.randint(2, 15), rng.randint(2, 9)
        seq = [a, a + d, a + 2 * d]
        stem = f"按规律排列：{seq[0]}、{seq[1]}、{seq[2]}、（ ），括号里应填多少？"
        ans = a + 3 * d
        analysis = f"相邻两个数都相差{d}，所以下一个数是{seq[2]}+{d}={ans}。"
    else:
        k = rng.randint(2, 9)
        per = rng.randint(2, 12)
        stem = f"把{k * per}米长的绳子平均分成{k}段，每段长多少米？"
        ans = per
        analysis = f"每段长{k * per}÷{k}={per}米。"
    return stem, ans, analysis


def mc_item(rng: random.Random, category: str, index: int) -> dict:
    stem, ans, analysis = make_case(rng, category)
    offsets = rng.sample([-3, -2, -1, 1, 2, 3], 2)
    values = [ans, ans + offsets[0], ans + offsets[1]]
    gold_pos = index % 3
    values[0], values[gold_pos] = values[gold_pos], values[0]
    labels = ["A", "B", "C"]
    options = [{"label": lab, "text": str(v)} for lab, v in zip(labels, values)]
    return {
        "id": f"mathmc-{index:04d}",
        "stem": stem,
        "options": options,
        "qtype": "multiple_choice",
        "language": "zh",
        "gold_answer": labels[gold_pos],
        "analysis": analysis + f"所以选{labels[gold_pos]}。",
        "category": category,
    }


def tof_item(rng: random.Random, category: str, index: int) -> dict:
    stem, ans, analysis = make_case(rng, category)
    truth = index % 2 == 0
    claimed = ans if truth else ans + rng.choice([-2, -1, 1, 2])
    stem = f"判断：{stem}答案是{claimed}。"
    verdict = "正确" if truth else "错误"
    return {
        "id": f"mathtof-{index:04d}",
        "stem": stem,
        "qtype": "true_or_false",
        "language": "zh",
        "gold_answer": truth,
        "analysis": analysis + f"正确答案是{ans}，题目说法{verdict}。",
        "category": category,
    }


def build(cells: dict, builder) -> list[dict]:
    rng = random.Random(SEED)
    items = []
    index = 0
    for category, count in cells.items():
        for _ in range(count):
            items.append(builder(rng, category, index))
            index += 1
    return items


def main():
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    for name, cells, builder in (
        ("mathmc.jsonl", MATHMC_CELLS, mc_item),
        ("mathtof.jsonl", MATHTOF_CELLS, tof_item),
    ):
        path = out_dir / name
        with path.open("w", encoding="utf-8") as fh:
            for item in build(cells, builder):
                fh.write(json.dumps(item, ensure_ascii=False) + "\n")
        print(f"wrote {path} ({sum(cells.values())} items)")


if __name__ == "__main__":
    main()
