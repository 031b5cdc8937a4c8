"""Keyphrase extraction: candidates -> embeddings -> cosine ranking.

Candidates come from word n-grams (NGRAM mode) or PoS-pattern matches (POS
mode). The document and all candidates are embedded in one batched call;
each candidate is scored by cosine similarity to the document vector. The
top_k survivors are returned either by plain score order or through
maximal-marginal-relevance selection.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from aqg.corpus import Document
from aqg.embed import EmbedderConfig, cosine, embed_texts
from aqg.errors import ConfigError
from aqg.postag import RuleTagger, match_candidates, parse_pattern
from aqg.textnorm import normalize, tokenize, word_ngrams

NGRAM_MODE = "ngram"
POS_MODE = "pos"

DIVERSIFY_NONE = "none"
DIVERSIFY_MMR = "mmr"

DEFAULT_PATTERN = "NOUN+ ADJ*"


@dataclass(frozen=True)
class ScoredKeyphrase:
    text: str  # normalized phrase
    surface: str  # original-orthography slice of the document
    score: float
    token_span: tuple[int, int]
    doc_id: str


@dataclass
class ExtractionConfig:
    mode: str = POS_MODE
    n_min: int = 1
    n_max: int = 3
    patterns: tuple[str, ...] = (DEFAULT_PATTERN,)
    top_k: int = 3
    diversify: str = DIVERSIFY_NONE
    mmr_lambda: float = 0.7
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)

    def validate(self) -> None:
        if self.mode not in (NGRAM_MODE, POS_MODE):
            raise ConfigError(f"unknown extraction mode {self.mode!r}")
        if self.mode == NGRAM_MODE and (self.n_min < 1 or self.n_min > self.n_max):
            raise ConfigError(f"invalid n-gram range [{self.n_min}, {self.n_max}]")
        if self.mode == POS_MODE and not self.patterns:
            raise ConfigError("pos mode requires at least one pattern")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.diversify not in (DIVERSIFY_NONE, DIVERSIFY_MMR):
            raise ConfigError(f"unknown diversify setting {self.diversify!r}")
        if not 0.0 <= self.mmr_lambda <= 1.0:
            raise ConfigError(f"mmr_lambda must be in [0, 1], got {self.mmr_lambda}")
        self.embedder.validate()


def extract_keyphrases(
    doc: Document, config: ExtractionConfig, tagger=None, client=None
) -> list[ScoredKeyphrase]:
    """Top-k keyphrases of one document by cosine to the document vector.

    With diversify off, ties in score break by earlier token span, then by
    normalized text, so output order is fully deterministic.
    """
    config.validate()
    tokens = tokenize(doc.text)
    if config.mode == NGRAM_MODE:
        candidates = word_ngrams(tokens, config.n_min, config.n_max)
    else:
        tagger = tagger or RuleTagger()
        patterns = [parse_pattern(p) for p in config.patterns]
        candidates = match_candidates(tagger.tag(tokens), patterns)
    if not candidates:
        return []

    vectors = embed_texts(
        [normalize(doc.text)] + [c.text for c in candidates], config.embedder, client=client
    )
    doc_vec, cand_vecs = vectors[0], vectors[1:]

    scored = []
    for cand, vec in zip(candidates, cand_vecs):
        first, last = cand.token_span
        surface = doc.text[tokens[first].start : tokens[last].end]
        scored.append(
            ScoredKeyphrase(cand.text, surface, cosine(vec, doc_vec), cand.token_span, doc.id)
        )

    if config.diversify == DIVERSIFY_MMR:
        return mmr_select(scored, doc_vec, cand_vecs, config.top_k, config.mmr_lambda)
    order = sorted(
        range(len(scored)),
        key=lambda i: (-scored[i].score, scored[i].token_span, scored[i].text),
    )
    return [scored[i] for i in order[: config.top_k]]


def mmr_select(
    candidates: list[ScoredKeyphrase],
    doc_vec: np.ndarray,
    cand_vecs: list[np.ndarray],
    k: int,
    lam: float,
) -> list[ScoredKeyphrase]:
    """Greedy maximal-marginal-relevance selection.

    First pick is the highest document cosine; every later pick maximizes
    lam * cos(c, doc) - (1 - lam) * max(cos(c, s) for selected s). Ties go
    to the earlier token span.
    """
    remaining = list(range(len(candidates)))
    selected: list[int] = []
    max_sim = [-np.inf] * len(candidates)  # redundancy vs the selected set

    while remaining and len(selected) < k:
        if not selected:
            objective = {i: candidates[i].score for i in remaining}
        else:
            objective = {
                i: lam * candidates[i].score - (1.0 - lam) * max_sim[i] for i in remaining
            }
        pick = min(remaining, key=lambda i: (-objective[i], candidates[i].token_span))
        selected.append(pick)
        remaining.remove(pick)
        for i in remaining:
            sim = cosine(cand_vecs[i], cand_vecs[pick])
            if sim > max_sim[i]:
                max_sim[i] = sim
    return [candidates[i] for i in selected]


def keyphrases_to_json(doc_id: str, phrases: list[ScoredKeyphrase]) -> dict:
    return {
        "doc_id": doc_id,
        "phrases": [
            {
                "text": p.text,
                "surface": p.surface,
                "score": p.score,
                "span": [p.token_span[0], p.token_span[1]],
            }
            for p in phrases
        ],
    }


def write_keyphrases(path: str | Path, per_doc: dict[str, list[ScoredKeyphrase]]) -> None:
    """One JSONL line per document, sorted by doc id."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id in sorted(per_doc):
            fh.write(json.dumps(keyphrases_to_json(doc_id, per_doc[doc_id]), ensure_ascii=False))
            fh.write("\n")


def read_keyphrases(path: str | Path) -> dict[str, list[ScoredKeyphrase]]:
    per_doc: dict[str, list[ScoredKeyphrase]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        per_doc[obj["doc_id"]] = [
            ScoredKeyphrase(
                p["text"], p["surface"], p["score"], (p["span"][0], p["span"][1]), obj["doc_id"]
            )
            for p in obj["phrases"]
        ]
    return per_doc
