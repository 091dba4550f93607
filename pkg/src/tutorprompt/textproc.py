"""Math-aware tokenization and the string machinery behind both retrieval legs.

Tokenizer grammar
-----------------
A *math expression* is a maximal run over the character set

    0-9 . / % x(times) /(divide) + - = : ( )

(ASCII ``-`` and U+2212 are both accepted as minus; full-width digits and
full-width punctuation variants are folded in).  A run may span whitespace;
interior whitespace is removed, so ``"30 + 29 = 59"`` tokenizes to the single
token ``"30+29=59"``.  A run that contains no digit is not a math expression
and falls through to ordinary word splitting.

Outside math expressions, English text splits on whitespace/punctuation and
Chinese text segments per character (Latin letter runs inside Chinese text
stay whole).
"""
from __future__ import annotations

import re
from importlib import resources
from typing import Iterable, List

try:
    from tutorprompt._lcskernel import lcs_len_ids as _lcs_len_ids

    LCS_BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    from tutorprompt._lcs_py import lcs_len_ids as _lcs_len_ids

    LCS_BACKEND = "python"

from tutorprompt import _lcs_py

# Ordered token list; TokenSequence allows duplicates, TokenSet is deduplicated
# and stopword/operand free.
TokenSequence = List[str]
TokenSet = List[str]

_MATH_CHARS = r"0-9０-９.．/／%％×÷+\-−=:：()（）"
_MATH_RUN_RE = re.compile(rf"[{_MATH_CHARS}](?:[{_MATH_CHARS}\s]*[{_MATH_CHARS}])?")
_DIGIT_RE = re.compile(r"[0-9０-９]")
_CJK = "㐀-䶿一-鿿豈-﫿"
_EN_WORD_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")
_ZH_SEG_RE = re.compile(rf"[{_CJK}]|[A-Za-z]+(?:['’][A-Za-z]+)*")
_CJK_RE = re.compile(rf"[{_CJK}]")
# Signed integer or decimal, full-width digits folded beforehand.
_PURE_NUMBER_RE = re.compile(r"^[+\-−]?\d+(?:\.\d+)?$")
_NUMBER_RUN_RE = re.compile(r"[0-9０-９]+(?:[.．][0-9０-９]+)?")

_STOPWORDS: dict[str, frozenset[str]] = {}


def _words(segment: str, language: str) -> Iterable[str]:
    if language == "zh":
        return _ZH_SEG_RE.findall(segment)
    return _EN_WORD_RE.findall(segment)


def tokenize(text: str, language: str = "en") -> TokenSequence:
    """Split text into tokens, keeping each math expression as one token."""
    tokens: TokenSequence = []
    pos = 0
    for m in _MATH_RUN_RE.finditer(text):
        run = m.group()
        if not _DIGIT_RE.search(run):
            continue  # an operator/punctuation run, not a math expression
        tokens.extend(_words(text[pos : m.start()], language))
        tokens.append(re.sub(r"\s+", "", run))
        pos = m.end()
    tokens.extend(_words(text[pos:], language))
    return tokens


def load_stopwords(language: str, path: str | None = None) -> frozenset[str]:
    """Stopword list: one token per line, UTF-8, ``#`` comments."""
    if path is None:
        if language in _STOPWORDS:
            return _STOPWORDS[language]
        raw = (
            resources.files("tutorprompt")
            .joinpath(f"data/stopwords_{language}.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    words = set()
    for line in raw.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line)
    result = frozenset(words)
    if path is None:
        _STOPWORDS[language] = result
    return result


def is_operand(token: str) -> bool:
    """True for tokens with no alphabetic content: bare numbers like ``59``
    and operator-only math expressions like ``3+4`` or ``4/3``."""
    folded = _fold_width(token)
    return not any(ch.isalpha() for ch in folded)


def build_token_set(
    texts: Iterable[str], language: str = "en", stopwords: frozenset[str] | None = None
) -> TokenSet:
    """Union of tokenized texts minus stopwords and operands.

    First-occurrence order, deduplicated.
    """
    if stopwords is None:
        stopwords = load_stopwords(language)
    seen = set()
    out: TokenSet = []
    for text in texts:
        for tok in tokenize(text, language):
            if not tok or tok in seen:
                continue
            if tok.casefold() in stopwords or is_operand(tok):
                continue
            seen.add(tok)
            out.append(tok)
    return out


def lcs_length(a: TokenSequence, b: TokenSequence) -> int:
    """Classic LCS length over two token sequences."""
    if not a or not b:
        return 0
    ids: dict[str, int] = {}
    enc_a = _encode(a, ids)
    enc_b = _encode(b, ids)
    return _lcs_len_ids(enc_a, enc_b)


def lcs_length_pure(a: TokenSequence, b: TokenSequence) -> int:
    """Pure-Python LCS path, kept callable for benchmarking both kernels."""
    if not a or not b:
        return 0
    ids: dict[str, int] = {}
    return _lcs_py.lcs_len_ids(list(_encode_iter(a, ids)), list(_encode_iter(b, ids)))


def _encode_iter(tokens: TokenSequence, ids: dict[str, int]):
    for tok in tokens:
        if tok not in ids:
            ids[tok] = len(ids)
        yield ids[tok]


def _encode(tokens: TokenSequence, ids: dict[str, int]):
    import array

    return array.array("i", _encode_iter(tokens, ids))


_FULLWIDTH = str.maketrans("０１２３４５６７８９．％／（）：", "0123456789.%/():")


def _fold_width(text: str) -> str:
    return text.translate(_FULLWIDTH)


def numeric_skeleton(stem: str) -> str:
    """Stem with every maximal digit/decimal run replaced by ``#`` and
    whitespace normalized."""
    replaced = _NUMBER_RUN_RE.sub("#", stem)
    return " ".join(replaced.split())


def is_numeric_variant(a: str, b: str, language: str = "en") -> bool:
    """True iff the stems are identical or differ only in numeric literals."""
    del language  # same rule for zh and en
    if a == b:
        return True
    return numeric_skeleton(a) == numeric_skeleton(b)


def detect_language(text: str) -> str:
    """``zh`` iff CJK codepoints make up >= 0.3 of the letter-like codepoints.

    The threshold is low on purpose: short math stems are mostly digits, so a
    modest CJK share still signals Chinese.
    """
    cjk = len(_CJK_RE.findall(text))
    alpha = sum(1 for ch in text if ch.isalpha()) - cjk
    total = cjk + alpha
    if total == 0:
        return "en"
    return "zh" if cjk / total >= 0.3 else "en"
