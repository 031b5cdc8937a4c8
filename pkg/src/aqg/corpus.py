"""Corpus loading, validation, and bag-of-words statistics.

The corpus format is JSONL, one document object per line:
{"id": str, "topic": str, "section": str, "text": str}. Ids must be unique
and texts non-empty after whitespace trimming.
"""

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from aqg.errors import CorpusError
from aqg.postag import PosTag, RuleTagger
from aqg.textnorm import tokenize

DEFAULT_STOP_TAGS = frozenset({PosTag.PART, PosTag.PRON, PosTag.PUNCT, PosTag.NUM})

_FIELDS = ("id", "topic", "section", "text")


@dataclass(frozen=True)
class Document:
    id: str
    topic: str
    section: str
    text: str


@dataclass
class CorpusStats:
    doc_count: int
    top_words: list[tuple[str, int]]
    per_topic_counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "top_words": [[word, count] for word, count in self.top_words],
            "per_topic_counts": dict(self.per_topic_counts),
        }


def load_corpus(path: str | Path) -> list[Document]:
    """Parse a JSONL corpus file, preserving order and rejecting duplicates."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc

    documents: list[Document] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path} line {lineno}: malformed JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise CorpusError(f"{path} line {lineno}: expected a JSON object")
        for field in _FIELDS:
            if field not in obj:
                raise CorpusError(f"{path} line {lineno}: missing field {field!r}")
            if not isinstance(obj[field], str):
                raise CorpusError(f"{path} line {lineno}: field {field!r} must be a string")
        doc_id = obj["id"]
        if not doc_id:
            raise CorpusError(f"{path} line {lineno}: empty document id")
        if doc_id in seen_ids:
            raise CorpusError(f"{path} line {lineno}: duplicate document id {doc_id!r}")
        if not obj["text"].strip():
            raise CorpusError(f"{path} line {lineno}: empty text for id {doc_id!r}")
        seen_ids.add(doc_id)
        documents.append(Document(doc_id, obj["topic"], obj["section"], obj["text"]))
    return documents


def document_to_json(doc: Document) -> dict:
    return {"id": doc.id, "topic": doc.topic, "section": doc.section, "text": doc.text}


def save_corpus(path: str | Path, documents: list[Document]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(document_to_json(doc), ensure_ascii=False) + "\n")


def compute_stats(
    corpus: list[Document],
    top_n: int = 20,
    stop_tags: frozenset[PosTag] = DEFAULT_STOP_TAGS,
    tagger=None,
) -> CorpusStats:
    """Corpus-wide counts of normalized word forms, closed classes filtered.

    Words are normalized tokens whose tag is not in ``stop_tags``. Ties in
    count are broken lexicographically by normalized form.
    """
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    tagger = tagger or RuleTagger()
    counts: Counter[str] = Counter()
    topics: Counter[str] = Counter()
    for doc in corpus:
        topics[doc.topic] += 1
        for token, tag in tagger.tag(tokenize(doc.text)):
            if tag not in stop_tags:
                counts[token.norm] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return CorpusStats(len(corpus), ranked[:top_n], dict(topics))


def format_stats_table(stats: CorpusStats) -> str:
    """Aligned plain-text table of the top words."""
    lines = [f"documents: {stats.doc_count}"]
    if not stats.top_words:
        lines.append("(no countable words)")
        return "\n".join(lines)
    width = max(len(word) for word, _ in stats.top_words)
    width = max(width, len("word"))
    lines.append(f"{'word'.ljust(width)}  count")
    for word, count in stats.top_words:
        lines.append(f"{word.ljust(width)}  {count}")
    return "\n".join(lines)
