"""Part-of-speech tagging and a pattern mini-language over tag sequences.

Two taggers speak the same contract (tokens in, one tag per token out):

* ``RuleTagger`` is deterministic and offline. It tags by token kind,
  a closed-class lexicon, and one heuristic: a word starting with "ال"
  directly after a NOUN or ADJ is an ADJ; everything else is a NOUN.
  It is deliberately coarse so the pipeline is testable without models.
* ``HttpTagger`` delegates to an external service.

Patterns are whitespace-separated terms, each a tag name (or "." for any
tag) with an optional quantifier: ``?`` ``*`` ``+``. Matching scans left to
right, takes the longest substring starting at each position that fully
matches any pattern, and resumes after the match (non-overlapping).
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from aqg.client import post_json
from aqg.errors import BackendError, CorpusError, PatternError
from aqg.textnorm import NgramCandidate, Token, TokenKind


class PosTag(Enum):
    NOUN = "NOUN"
    ADJ = "ADJ"
    VERB = "VERB"
    PART = "PART"
    PRON = "PRON"
    NUM = "NUM"
    PUNCT = "PUNCT"
    X = "X"


LEXICON_TAGS = (PosTag.PART, PosTag.PRON)


def load_lexicon(path: str | Path) -> dict[str, PosTag]:
    """Read a closed-class lexicon: UTF-8 lines of "form<TAB>TAG".

    Forms must already be in normalized orthography. Blank lines and lines
    starting with ``#`` are skipped.
    """
    lexicon: dict[str, PosTag] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read lexicon {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"{path} line {lineno}: expected 'form<TAB>TAG'")
        form, tag_name = parts[0].strip(), parts[1].strip()
        try:
            tag = PosTag[tag_name]
        except KeyError:
            raise CorpusError(f"{path} line {lineno}: unknown tag {tag_name!r}") from None
        if tag not in LEXICON_TAGS:
            raise CorpusError(f"{path} line {lineno}: lexicon tags must be PART or PRON")
        lexicon[form] = tag
    return lexicon


_DEFAULT_LEXICON: dict[str, PosTag] | None = None


def default_lexicon() -> dict[str, PosTag]:
    """The packaged closed-class lexicon (prepositions, conjunctions,
    interrogatives, negators, pronouns), loaded once."""
    global _DEFAULT_LEXICON
    if _DEFAULT_LEXICON is None:
        ref = resources.files("aqg").joinpath("data/closed_class_ar.tsv")
        with resources.as_file(ref) as path:
            _DEFAULT_LEXICON = load_lexicon(path)
    return _DEFAULT_LEXICON


def rule_tag(tokens: list[Token], lexicon: dict[str, PosTag]) -> list[tuple[Token, PosTag]]:
    """Deterministic rule tagging; total over any token sequence.

    Order of rules: PUNCT kind, NUM kind, lexicon hit on the normalized
    form, the "ال"-after-NOUN/ADJ heuristic, default NOUN.
    """
    tagged: list[tuple[Token, PosTag]] = []
    prev: PosTag | None = None  # last non-PUNCT tag
    for tok in tokens:
        if tok.kind is TokenKind.PUNCT:
            tag = PosTag.PUNCT
        elif tok.kind is TokenKind.NUM:
            tag = PosTag.NUM
        elif tok.norm in lexicon:
            tag = lexicon[tok.norm]
        elif tok.norm.startswith("ال") and prev in (PosTag.NOUN, PosTag.ADJ):
            tag = PosTag.ADJ
        else:
            tag = PosTag.NOUN
        tagged.append((tok, tag))
        if tag is not PosTag.PUNCT:
            prev = tag
    return tagged


class RuleTagger:
    def __init__(self, lexicon: dict[str, PosTag] | None = None):
        self.lexicon = default_lexicon() if lexicon is None else lexicon

    def tag(self, tokens: list[Token]) -> list[tuple[Token, PosTag]]:
        return rule_tag(tokens, self.lexicon)


class HttpTagger:
    """Client for an external tagging service.

    Protocol: POST {endpoint}/tag with {"tokens": [surface, ...]} and a
    response {"tags": [name, ...]} aligned one tag name per token. Tags
    outside the closed set are rejected.
    """

    def __init__(self, endpoint: str, timeout_ms: int = 10000, retries: int = 2, client=None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_ms = timeout_ms
        self.retries = retries
        self._client = client

    def tag(self, tokens: list[Token]) -> list[tuple[Token, PosTag]]:
        payload = {"tokens": [tok.surface for tok in tokens]}
        data = post_json(
            self.endpoint + "/tag",
            payload,
            timeout_ms=self.timeout_ms,
            retries=self.retries,
            client=self._client,
        )
        names = data.get("tags") if isinstance(data, dict) else None
        if not isinstance(names, list) or len(names) != len(tokens):
            raise BackendError(
                f"tagger returned {0 if not isinstance(names, list) else len(names)} tags "
                f"for {len(tokens)} tokens"
            )
        tagged = []
        for tok, name in zip(tokens, names):
            try:
                tagged.append((tok, PosTag[name]))
            except KeyError:
                raise BackendError(f"tagger returned unknown tag {name!r}") from None
        return tagged


class Quant(Enum):
    ONE = ""
    OPT = "?"
    STAR = "*"
    PLUS = "+"


_QUANT_CHARS = {"?": Quant.OPT, "*": Quant.STAR, "+": Quant.PLUS}


@dataclass(frozen=True)
class PatternTerm:
    tag: PosTag | None  # None is the "." wildcard
    quant: Quant

    def admits(self, tag: PosTag) -> bool:
        return self.tag is None or self.tag is tag

    def render(self) -> str:
        name = "." if self.tag is None else self.tag.value
        return name + self.quant.value


@dataclass(frozen=True)
class PosPattern:
    source: str
    terms: tuple[PatternTerm, ...]

    def canonical(self) -> str:
        return " ".join(term.render() for term in self.terms)


def parse_pattern(source: str) -> PosPattern:
    """Parse a pattern string, e.g. "NOUN+ ADJ*" or ". NOUN?"."""
    raw_terms = source.split()
    if not raw_terms:
        raise PatternError("empty pattern")
    terms = []
    for raw in raw_terms:
        quant = Quant.ONE
        name = raw
        if raw[-1] in _QUANT_CHARS:
            quant = _QUANT_CHARS[raw[-1]]
            name = raw[:-1]
        if not name:
            raise PatternError(f"dangling quantifier {raw!r} in pattern {source!r}")
        if name == ".":
            tag = None
        else:
            try:
                tag = PosTag[name]
            except KeyError:
                raise PatternError(f"unknown tag {name!r} in pattern {source!r}") from None
        terms.append(PatternTerm(tag, quant))
    return PosPattern(source, tuple(terms))


def _max_match_end(terms: tuple[PatternTerm, ...], tags: list[PosTag], start: int) -> int:
    """Largest end index such that terms fully consume tags[start:end], or -1."""
    n = len(tags)
    memo: dict[tuple[int, int], int] = {}

    def rec(t: int, p: int) -> int:
        if t == len(terms):
            return p
        key = (t, p)
        if key in memo:
            return memo[key]
        term = terms[t]
        run = 0
        while p + run < n and term.admits(tags[p + run]):
            run += 1
        if term.quant is Quant.ONE:
            counts = (1,) if run >= 1 else ()
        elif term.quant is Quant.OPT:
            counts = range(min(run, 1), -1, -1)
        elif term.quant is Quant.PLUS:
            counts = range(run, 0, -1)
        else:
            counts = range(run, -1, -1)
        best = -1
        for c in counts:
            end = rec(t + 1, p + c)
            if end > best:
                best = end
        memo[key] = best
        return best

    return rec(0, start)


def match_candidates(
    tagged: list[tuple[Token, PosTag]], patterns: list[PosPattern]
) -> list[NgramCandidate]:
    """Greedy leftmost-longest non-overlapping pattern matches as candidates.

    At each position the longest non-empty substring starting there that
    fully matches any pattern becomes a match; scanning resumes after it.
    """
    tokens = [tok for tok, _ in tagged]
    tags = [tag for _, tag in tagged]
    out: list[NgramCandidate] = []
    i = 0
    while i < len(tags):
        best_end = -1
        for pattern in patterns:
            end = _max_match_end(pattern.terms, tags, i)
            if end > best_end:
                best_end = end
        if best_end >= i + 1:
            text = " ".join(tok.norm for tok in tokens[i:best_end])
            out.append(NgramCandidate(text, (i, best_end - 1), best_end - i))
            i = best_end
        else:
            i += 1
    return out


@dataclass
class DocKeyphraseMatrix:
    """Documents x unique keyphrases matrix of occurrence counts."""

    doc_ids: list[str]
    phrases: list[str]
    counts: list[list[int]]

    def to_json(self) -> dict:
        return {"doc_ids": self.doc_ids, "phrases": self.phrases, "counts": self.counts}


def build_matrix(corpus, patterns: list[PosPattern], tagger) -> DocKeyphraseMatrix:
    """Count non-overlapping pattern matches per document and phrase.

    Phrases are ordered by first appearance across the corpus; counts are
    keyed by normalized phrase text.
    """
    from aqg.textnorm import tokenize

    if not corpus:
        raise ValueError("build_matrix requires a non-empty corpus")
    phrase_index: dict[str, int] = {}
    per_doc: list[Counter] = []
    for doc in corpus:
        candidates = match_candidates(tagger.tag(tokenize(doc.text)), patterns)
        per_doc.append(Counter(c.text for c in candidates))
        for cand in candidates:
            if cand.text not in phrase_index:
                phrase_index[cand.text] = len(phrase_index)
    phrases = list(phrase_index)
    counts = [[counter.get(p, 0) for p in phrases] for counter in per_doc]
    return DocKeyphraseMatrix([doc.id for doc in corpus], phrases, counts)
