"""Pipeline orchestration: ingest -> extract -> generate -> rank -> evaluate.

Each stage writes one artifact into the output directory; a manifest
records the config hash, timestamps, and artifact names. Stage files are
written to a temp name and renamed on success, so a failing stage never
leaves a partial artifact behind. Re-running with the same config and
offline backends reproduces every artifact byte for byte (the manifest
timestamps aside).
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from aqg.corpus import Document, load_corpus, save_corpus
from aqg.embed import EmbedderConfig
from aqg.errors import AqgError, ConfigError
from aqg.evaluation import (
    EvaluationReport,
    corpus_metrics,
    format_report_table,
    match_corpus,
    read_ratings,
    summarize_ratings,
)
from aqg.keyphrase import ExtractionConfig, ScoredKeyphrase, extract_keyphrases, write_keyphrases
from aqg.postag import HttpTagger, RuleTagger, load_lexicon
from aqg.qgen import (
    CHAT_BACKEND,
    TEMPLATE_BACKEND,
    GeneratedQuestion,
    GenerationConfig,
    generate_benchmark,
    generate_seq2seq,
    generate_template,
    rank_questions,
    read_questions,
    write_questions,
)


def default_jobs() -> int:
    return min(4, os.cpu_count() or 1)


@dataclass
class EvaluationSettings:
    tau: float = 0.0
    reference: Path | None = None
    ratings: Path | None = None

    def validate(self) -> None:
        if self.tau < 0:
            raise ConfigError(f"tau must be >= 0, got {self.tau}")


@dataclass
class PipelineConfig:
    corpus: Path
    output_dir: Path
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)
    jobs: int = field(default_factory=default_jobs)
    keep_top: int | None = None
    lexicon: Path | None = None
    tagger_endpoint: str | None = None
    config_hash: str = ""

    def validate(self) -> None:
        if not Path(self.corpus).is_file():
            raise ConfigError(f"corpus file not found: {self.corpus}")
        for label, path in (
            ("reference", self.evaluation.reference),
            ("ratings", self.evaluation.ratings),
            ("lexicon", self.lexicon),
        ):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} file not found: {path}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.keep_top is not None and self.keep_top < 1:
            raise ConfigError(f"keep_top must be >= 1, got {self.keep_top}")
        self.extraction.validate()
        self.generation.validate()
        self.evaluation.validate()


_EMBEDDER_KEYS = {"backend", "dim", "endpoint", "timeout_ms", "retries"}
_EXTRACTION_KEYS = {"mode", "n_min", "n_max", "patterns", "top_k", "diversify", "mmr_lambda", "embedder"}
_GENERATION_KEYS = {
    "backend",
    "endpoint",
    "timeout_ms",
    "retries",
    "questions_per_keyphrase",
    "prompt_template",
    "model_name",
}
_EVALUATION_KEYS = {"tau", "reference", "ratings"}
_TOP_KEYS = {
    "corpus",
    "output_dir",
    "extraction",
    "generation",
    "evaluation",
    "jobs",
    "keep_top",
    "lexicon",
    "tagger_endpoint",
}


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def embedder_config_from_dict(section: dict) -> EmbedderConfig:
    _check_keys(section, _EMBEDDER_KEYS, "embedder config")
    return EmbedderConfig(**section)


def extraction_config_from_dict(section: dict) -> ExtractionConfig:
    _check_keys(section, _EXTRACTION_KEYS, "extraction config")
    section = dict(section)
    embedder = embedder_config_from_dict(section.pop("embedder", {}))
    if "patterns" in section:
        section["patterns"] = tuple(section["patterns"])
    return ExtractionConfig(embedder=embedder, **section)


def generation_config_from_dict(section: dict) -> GenerationConfig:
    _check_keys(section, _GENERATION_KEYS, "generation config")
    return GenerationConfig(**section)


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    for required in ("corpus", "output_dir"):
        if required not in raw:
            raise ConfigError(f"{path}: missing required key {required!r}")
    evaluation = dict(raw.get("evaluation", {}))
    _check_keys(evaluation, _EVALUATION_KEYS, "evaluation config")
    try:
        config = PipelineConfig(
            corpus=Path(raw["corpus"]),
            output_dir=Path(raw["output_dir"]),
            extraction=extraction_config_from_dict(raw.get("extraction", {})),
            generation=generation_config_from_dict(raw.get("generation", {})),
            evaluation=EvaluationSettings(
                tau=evaluation.get("tau", 0.0),
                reference=Path(evaluation["reference"]) if evaluation.get("reference") else None,
                ratings=Path(evaluation["ratings"]) if evaluation.get("ratings") else None,
            ),
            jobs=raw.get("jobs", default_jobs()),
            keep_top=raw.get("keep_top"),
            lexicon=Path(raw["lexicon"]) if raw.get("lexicon") else None,
            tagger_endpoint=raw.get("tagger_endpoint"),
        )
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    config.config_hash = config_digest(config)
    return config


def config_digest(config: PipelineConfig) -> str:
    payload = asdict(config)
    payload.pop("config_hash", None)
    canonical = json.dumps(payload, ensure_ascii=False, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_tagger(config: PipelineConfig):
    if config.tagger_endpoint:
        return HttpTagger(config.tagger_endpoint)
    if config.lexicon:
        return RuleTagger(load_lexicon(config.lexicon))
    return RuleTagger()


def extract_corpus(
    documents: list[Document],
    config: ExtractionConfig,
    tagger=None,
    jobs: int = 1,
    client=None,
) -> dict[str, list[ScoredKeyphrase]]:
    """Extract keyphrases for every document, keyed by doc id."""
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = pool.map(
            lambda doc: (doc.id, extract_keyphrases(doc, config, tagger=tagger, client=client)),
            documents,
        )
        return dict(results)


def generate_questions(
    documents: list[Document],
    per_doc: dict[str, list[ScoredKeyphrase]],
    config: GenerationConfig,
    jobs: int = 1,
    client=None,
) -> list[GeneratedQuestion]:
    """Generate questions for every document, emitted sorted by doc id.

    Keyphrase-conditioned backends run once per distinct keyphrase text in
    extraction order; the chat benchmark runs once per document.
    """
    config.validate()

    def for_doc(doc: Document) -> list[GeneratedQuestion]:
        if config.backend == CHAT_BACKEND:
            return generate_benchmark(doc, config, client=client)
        out: list[GeneratedQuestion] = []
        seen: set[str] = set()
        for kp in per_doc.get(doc.id, []):
            if kp.text in seen:
                continue
            seen.add(kp.text)
            if config.backend == TEMPLATE_BACKEND:
                out.extend(generate_template(doc, kp, config.questions_per_keyphrase))
            else:
                out.extend(generate_seq2seq(doc, kp, config, client=client))
        return out

    ordered = sorted(documents, key=lambda d: d.id)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        batches = list(pool.map(for_doc, ordered))
    return [q for batch in batches for q in batch]


def rank_all(
    questions: list[GeneratedQuestion],
    documents: list[Document],
    embedder: EmbedderConfig,
    keep_top: int | None = None,
    client=None,
) -> list[GeneratedQuestion]:
    """Rank questions per document; output sorted by doc id, then rank."""
    docs_by_id = {doc.id: doc for doc in documents}
    grouped: dict[str, list[GeneratedQuestion]] = {}
    for q in questions:
        grouped.setdefault(q.doc_id, []).append(q)
    ranked: list[GeneratedQuestion] = []
    for doc_id in sorted(grouped):
        if doc_id not in docs_by_id:
            raise ConfigError(f"questions reference unknown document {doc_id!r}")
        doc_ranked = rank_questions(grouped[doc_id], docs_by_id[doc_id], embedder, client=client)
        if keep_top is not None:
            doc_ranked = doc_ranked[:keep_top]
        ranked.extend(doc_ranked)
    return ranked


def evaluate_questions(
    generated: list[GeneratedQuestion],
    reference: list[GeneratedQuestion],
    tau: float = 0.0,
    ratings_path: str | Path | None = None,
) -> EvaluationReport:
    human = summarize_ratings(read_ratings(ratings_path)) if ratings_path else None
    return corpus_metrics(match_corpus(generated, reference, tau), human)


@contextmanager
def _stage(name: str):
    try:
        yield
    except AqgError as exc:
        raise type(exc)(f"stage {name}: {exc}") from exc


def _commit(write, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        write(tmp)
        tmp.replace(path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def run_pipeline(config: PipelineConfig) -> Path:
    """Run all stages; returns the manifest path."""
    started_at = _utcnow()
    config.validate()
    out_dir = Path(config.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}") from exc

    artifacts: dict[str, str] = {}
    counts: dict[str, int] = {}

    with _stage("ingest"):
        documents = load_corpus(config.corpus)
        _commit(lambda p: save_corpus(p, documents), out_dir / "documents.jsonl")
        artifacts["documents"] = "documents.jsonl"
        counts["documents"] = len(documents)

    with _stage("extract"):
        tagger = build_tagger(config)
        per_doc = extract_corpus(documents, config.extraction, tagger=tagger, jobs=config.jobs)
        _commit(lambda p: write_keyphrases(p, per_doc), out_dir / "keyphrases.jsonl")
        artifacts["keyphrases"] = "keyphrases.jsonl"
        counts["keyphrases"] = sum(len(v) for v in per_doc.values())

    with _stage("generate"):
        questions = generate_questions(documents, per_doc, config.generation, jobs=config.jobs)
        _commit(lambda p: write_questions(p, questions), out_dir / "questions.jsonl")
        artifacts["questions"] = "questions.jsonl"
        counts["questions"] = len(questions)

    with _stage("rank"):
        ranked = rank_all(questions, documents, config.extraction.embedder, keep_top=config.keep_top)
        _commit(lambda p: write_questions(p, ranked), out_dir / "questions_ranked.jsonl")
        artifacts["ranked"] = "questions_ranked.jsonl"

    if config.evaluation.reference is not None:
        with _stage("evaluate"):
            reference = read_questions(config.evaluation.reference)
            report = evaluate_questions(
                ranked, reference, config.evaluation.tau, config.evaluation.ratings
            )
            _commit(
                lambda p: p.write_text(
                    json.dumps(report.to_json(), ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8",
                ),
                out_dir / "report.json",
            )
            _commit(
                lambda p: p.write_text(format_report_table(report) + "\n", encoding="utf-8"),
                out_dir / "report.txt",
            )
            artifacts["report"] = "report.json"
            artifacts["report_table"] = "report.txt"

    manifest = {
        "config_sha256": config.config_hash or config_digest(config),
        "started_at": started_at,
        "finished_at": _utcnow(),
        "artifacts": artifacts,
        "counts": counts,
    }
    manifest_path = out_dir / "manifest.json"
    _commit(
        lambda p: p.write_text(
            json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        ),
        manifest_path,
    )
    return manifest_path
