"""Token-overlap evaluation against reference questions and human ratings.

Pair scores are token-level: tokens are the normalized WORD/NUM tokens of
each question (punctuation dropped), overlap is multiset intersection,
precision = overlap / |generated tokens|, recall = overlap / |reference
tokens|, f1 their harmonic mean. Matching is greedy within each document:
repeatedly take the highest-f1 unmatched pair with f1 >= tau (ties go to
the lower generated index, then the lower reference index).

Corpus metrics are micro-aggregated: precision sums matched pair
precisions over the total generated count, recall sums pair recalls over
the total reference count. Unmatched questions contribute zero. F1 is the
harmonic mean of the aggregates.
"""

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

from aqg.errors import EvalError
from aqg.qgen import GeneratedQuestion
from aqg.textnorm import TokenKind, tokenize


@dataclass(frozen=True)
class PairScore:
    gen_id: str
    ref_id: str
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict:
        return {
            "gen_id": self.gen_id,
            "ref_id": self.ref_id,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass
class DocMatching:
    doc_id: str
    pairs: list[PairScore]
    unmatched_gen: list[str]
    unmatched_ref: list[str]
    gen_count: int
    ref_count: int


@dataclass
class RatingSummary:
    mean: float
    percent: float
    count: int
    share_above_3: float
    histogram: dict[int, int]

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "percent": self.percent,
            "count": self.count,
            "share_above_3": self.share_above_3,
            "histogram": {str(r): self.histogram.get(r, 0) for r in range(1, 6)},
        }


@dataclass
class EvaluationReport:
    precision: float
    recall: float
    f1: float
    matched_pairs: list[PairScore]
    unmatched_gen: list[str]
    unmatched_ref: list[str]
    human: RatingSummary | None = None

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "human_percent": self.human.percent if self.human else None,
            "matched": [p.to_json() for p in self.matched_pairs],
            "unmatched_gen": self.unmatched_gen,
            "unmatched_ref": self.unmatched_ref,
        }


def metric_tokens(text: str) -> list[str]:
    """Normalized WORD/NUM tokens used by the overlap metrics."""
    return [t.norm for t in tokenize(text) if t.kind is not TokenKind.PUNCT]


def token_f1(gen: str, ref: str) -> tuple[float, float, float]:
    """(precision, recall, f1) of the token multiset overlap of two strings."""
    gen_tokens = metric_tokens(gen)
    ref_tokens = metric_tokens(ref)
    overlap = sum((Counter(gen_tokens) & Counter(ref_tokens)).values())
    precision = overlap / len(gen_tokens) if gen_tokens else 0.0
    recall = overlap / len(ref_tokens) if ref_tokens else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def match_questions(
    gen: list[GeneratedQuestion], ref: list[GeneratedQuestion], tau: float = 0.0
) -> DocMatching:
    """Greedy maximum matching of one document's questions by pair f1."""
    if tau < 0:
        raise EvalError(f"tau must be >= 0, got {tau}")
    doc_id = gen[0].doc_id if gen else (ref[0].doc_id if ref else "")
    scores = []
    for gi, g in enumerate(gen):
        for ri, r in enumerate(ref):
            precision, recall, f1 = token_f1(g.question, r.question)
            scores.append((-f1, gi, ri, precision, recall, f1))
    scores.sort()

    matched_gen: set[int] = set()
    matched_ref: set[int] = set()
    pairs: list[PairScore] = []
    for neg_f1, gi, ri, precision, recall, f1 in scores:
        if f1 < tau or gi in matched_gen or ri in matched_ref:
            continue
        matched_gen.add(gi)
        matched_ref.add(ri)
        pairs.append(PairScore(gen[gi].question_id, ref[ri].question_id, precision, recall, f1))
    return DocMatching(
        doc_id,
        pairs,
        [g.question_id for gi, g in enumerate(gen) if gi not in matched_gen],
        [r.question_id for ri, r in enumerate(ref) if ri not in matched_ref],
        len(gen),
        len(ref),
    )


def match_corpus(
    gen: list[GeneratedQuestion], ref: list[GeneratedQuestion], tau: float = 0.0
) -> list[DocMatching]:
    """Per-document matchings over doc-id-sorted groups."""
    by_doc_gen: dict[str, list[GeneratedQuestion]] = defaultdict(list)
    by_doc_ref: dict[str, list[GeneratedQuestion]] = defaultdict(list)
    for q in gen:
        by_doc_gen[q.doc_id].append(q)
    for q in ref:
        by_doc_ref[q.doc_id].append(q)
    return [
        match_questions(by_doc_gen.get(doc_id, []), by_doc_ref.get(doc_id, []), tau)
        for doc_id in sorted(set(by_doc_gen) | set(by_doc_ref))
    ]


def corpus_metrics(
    matchings: list[DocMatching], human: RatingSummary | None = None
) -> EvaluationReport:
    """Micro-aggregate per-document matchings into one report."""
    total_gen = sum(m.gen_count for m in matchings)
    total_ref = sum(m.ref_count for m in matchings)
    if total_gen == 0 and total_ref == 0:
        raise EvalError("no generated and no reference questions; metrics are undefined")
    pairs = [p for m in matchings for p in m.pairs]
    precision = sum(p.precision for p in pairs) / total_gen if total_gen else 0.0
    recall = sum(p.recall for p in pairs) / total_ref if total_ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvaluationReport(
        precision,
        recall,
        f1,
        pairs,
        [qid for m in matchings for qid in m.unmatched_gen],
        [qid for m in matchings for qid in m.unmatched_ref],
        human,
    )


@dataclass(frozen=True)
class Rating:
    question_id: str
    rater: str
    rating: int


def read_ratings(path: str | Path) -> list[Rating]:
    """Ratings file: JSONL {"question_id": str, "rater": str, "rating": int}."""
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EvalError(f"{path} line {lineno}: malformed JSON: {exc.msg}") from exc
        try:
            out.append(Rating(obj["question_id"], obj["rater"], obj["rating"]))
        except (KeyError, TypeError):
            raise EvalError(f"{path} line {lineno}: expected question_id, rater, rating") from None
    return out


def summarize_ratings(ratings: list[Rating]) -> RatingSummary:
    """Aggregate 1-to-5 ratings; percent is mean * 20 exactly."""
    if not ratings:
        raise EvalError("no ratings to summarize")
    for record in ratings:
        if isinstance(record.rating, bool) or not isinstance(record.rating, int):
            raise EvalError(f"rating for {record.question_id!r} by {record.rater!r} is not an integer")
        if not 1 <= record.rating <= 5:
            raise EvalError(
                f"rating {record.rating} for {record.question_id!r} by {record.rater!r} "
                "is outside 1..5"
            )
    mean = sum(r.rating for r in ratings) / len(ratings)
    per_question: dict[str, list[int]] = defaultdict(list)
    for record in ratings:
        per_question[record.question_id].append(record.rating)
    above = sum(1 for values in per_question.values() if sum(values) / len(values) > 3)
    histogram = Counter(r.rating for r in ratings)
    return RatingSummary(
        mean=mean,
        percent=mean * 20.0,
        count=len(ratings),
        share_above_3=above / len(per_question),
        histogram=dict(histogram),
    )


def format_report_table(report: EvaluationReport) -> str:
    """Text table with the four familiar columns."""
    human = f"{report.human.percent:.2f}%" if report.human else "-"
    cells = [
        f"{report.precision * 100:.2f}%",
        f"{report.recall * 100:.2f}%",
        f"{report.f1 * 100:.2f}%",
        human,
    ]
    headers = ["Precision", "Recall", "F1 Score", "Human Evaluation"]
    widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
    head = " | ".join(h.ljust(w) for h, w in zip(headers, widths))
    row = " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    return head + "\n" + row
