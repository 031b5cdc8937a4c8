"""Arabic question generation toolkit.

Turns a corpus of Arabic educational passages into assessment questions in
three stages: keyphrase extraction (embedding cosine over n-gram or
PoS-pattern candidates), question generation through pluggable backends,
and ranking. Ships an evaluation harness (token-overlap precision/recall/F1
against reference questions plus human-rating aggregation).
"""

__version__ = "0.1.0"

from aqg.corpus import Document, CorpusStats, load_corpus, compute_stats
from aqg.keyphrase import ExtractionConfig, ScoredKeyphrase, extract_keyphrases
from aqg.qgen import GeneratedQuestion, GenerationConfig, rank_questions

__all__ = [
    "Document",
    "CorpusStats",
    "load_corpus",
    "compute_stats",
    "ExtractionConfig",
    "ScoredKeyphrase",
    "extract_keyphrases",
    "GeneratedQuestion",
    "GenerationConfig",
    "rank_questions",
]
