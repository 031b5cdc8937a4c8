"""Arabic-aware normalization, tokenization with spans, and word n-grams.

Normalization rules (deterministic, idempotent):
  1. Drop diacritics U+064B..U+0652 (tanwin, short vowels, shadda, sukun).
  2. Drop tatweel U+0640.
  3. Unify alef variants: U+0623, U+0625, U+0622 -> U+0627.
  4. Unify alef maqsura: U+0649 -> U+064A.
  5. Everything else is preserved (taa marbuta stays distinct from haa).

Offsets everywhere are Unicode codepoint offsets into the original text,
so token surfaces can always be recovered by slicing.
"""

import unicodedata
from dataclasses import dataclass
from enum import Enum

_NORM_TABLE: dict[int, int | None] = {cp: None for cp in range(0x064B, 0x0653)}
_NORM_TABLE[0x0640] = None  # tatweel
_NORM_TABLE[0x0623] = 0x0627  # alef hamza above
_NORM_TABLE[0x0625] = 0x0627  # alef hamza below
_NORM_TABLE[0x0622] = 0x0627  # alef madda
_NORM_TABLE[0x0649] = 0x064A  # alef maqsura -> yaa


def normalize(text: str) -> str:
    """Return the normalized form of ``text`` per the module rules."""
    return text.translate(_NORM_TABLE)


class TokenKind(Enum):
    WORD = "word"
    PUNCT = "punct"
    NUM = "num"


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    start: int
    end: int
    kind: TokenKind


def _char_class(ch: str) -> str:
    if ch.isspace():
        return "space"
    cat = unicodedata.category(ch)
    if cat[0] in ("L", "M"):
        return "word"
    if cat == "Nd":
        return "num"
    return "punct"


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into WORD/NUM/PUNCT tokens ordered by start offset.

    Maximal runs of letters or combining marks become WORD tokens, maximal
    digit runs become NUM tokens, and every other non-space codepoint is a
    single PUNCT token. Whitespace separates and is never a token. A
    letter-class run that normalizes to the empty string (stray diacritics
    or tatweel with no letter) is emitted as PUNCT codepoints so that WORD
    norms are never empty.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        cls = _char_class(text[i])
        if cls == "space":
            i += 1
            continue
        if cls == "punct":
            ch = text[i]
            tokens.append(Token(ch, normalize(ch), i, i + 1, TokenKind.PUNCT))
            i += 1
            continue
        j = i + 1
        while j < n and _char_class(text[j]) == cls:
            j += 1
        surface = text[i:j]
        norm = normalize(surface)
        if cls == "num":
            tokens.append(Token(surface, norm, i, j, TokenKind.NUM))
        elif norm:
            tokens.append(Token(surface, norm, i, j, TokenKind.WORD))
        else:
            for k in range(i, j):
                ch = text[k]
                tokens.append(Token(ch, normalize(ch), k, k + 1, TokenKind.PUNCT))
        i = j
    return tokens


@dataclass(frozen=True)
class NgramCandidate:
    """A candidate keyphrase: normalized text over a contiguous token range."""

    text: str
    token_span: tuple[int, int]  # first and last token index, inclusive
    n: int


def word_ngrams(tokens: list[Token], n_min: int, n_max: int) -> list[NgramCandidate]:
    """All n-grams of consecutive WORD tokens for n in [n_min, n_max].

    Windows never cross a non-WORD token. Candidates are de-duplicated by
    normalized text keeping the first occurrence, and ordered by first
    token index, then by n ascending.
    """
    if n_min < 1 or n_min > n_max:
        raise ValueError(f"invalid n-gram range [{n_min}, {n_max}]")

    runs: list[tuple[int, int]] = []
    run_start: int | None = None
    for idx, tok in enumerate(tokens):
        if tok.kind is TokenKind.WORD:
            if run_start is None:
                run_start = idx
        elif run_start is not None:
            runs.append((run_start, idx))
            run_start = None
    if run_start is not None:
        runs.append((run_start, len(tokens)))

    seen: set[str] = set()
    out: list[NgramCandidate] = []
    for a, b in runs:
        for start in range(a, b):
            for n in range(n_min, min(n_max, b - start) + 1):
                text = " ".join(tokens[k].norm for k in range(start, start + n))
                if text not in seen:
                    seen.add(text)
                    out.append(NgramCandidate(text, (start, start + n - 1), n))
    return out
