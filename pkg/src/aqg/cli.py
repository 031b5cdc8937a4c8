"""Command-line interface.

Subcommands run exactly one stage each; ``pipeline`` chains them from a
JSON config. Exit codes: 0 success, 1 validation/IO error, 2 backend or
network error, 64 usage error.
"""

import argparse
import json
import sys
from pathlib import Path

from aqg import __version__
from aqg.corpus import compute_stats, format_stats_table, load_corpus, save_corpus
from aqg.embed import EmbedderConfig
from aqg.errors import AqgError, UsageError
from aqg.evaluation import format_report_table, read_ratings, summarize_ratings
from aqg.keyphrase import ExtractionConfig, write_keyphrases
from aqg.pipeline import (
    PipelineConfig,
    build_tagger,
    default_jobs,
    evaluate_questions,
    extract_corpus,
    generate_questions,
    load_pipeline_config,
    rank_all,
    run_pipeline,
)
from aqg.postag import RuleTagger, load_lexicon
from aqg.qgen import GenerationConfig, read_questions, write_questions


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump_json(obj, out: str | None) -> None:
    text = json.dumps(obj, ensure_ascii=False, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _base_config(args) -> PipelineConfig | None:
    if getattr(args, "config", None):
        return load_pipeline_config(args.config)
    return None


def _override(value, fallback):
    return fallback if value is None else value


def cmd_ingest(args) -> int:
    documents = load_corpus(args.corpus)
    if args.out:
        save_corpus(args.out, documents)
    else:
        from aqg.corpus import document_to_json

        for doc in documents:
            print(json.dumps(document_to_json(doc), ensure_ascii=False))
    print(f"ingested {len(documents)} documents", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    documents = load_corpus(args.corpus)
    tagger = RuleTagger(load_lexicon(args.lexicon)) if args.lexicon else RuleTagger()
    stats = compute_stats(documents, top_n=args.top, tagger=tagger)
    print(format_stats_table(stats))
    if args.out:
        _dump_json(stats.to_json(), args.out)
    return 0


def _extraction_from_args(args, base: PipelineConfig | None) -> ExtractionConfig:
    cfg = base.extraction if base else ExtractionConfig()
    embedder = EmbedderConfig(
        backend=_override(args.backend, cfg.embedder.backend),
        dim=_override(args.dim, cfg.embedder.dim),
        endpoint=_override(args.endpoint, cfg.embedder.endpoint),
        timeout_ms=cfg.embedder.timeout_ms,
        retries=cfg.embedder.retries,
    )
    return ExtractionConfig(
        mode=_override(args.mode, cfg.mode),
        n_min=_override(args.n_min, cfg.n_min),
        n_max=_override(args.n_max, cfg.n_max),
        patterns=tuple(args.patterns) if args.patterns else cfg.patterns,
        top_k=_override(args.top_k, cfg.top_k),
        diversify=_override(args.diversify, cfg.diversify),
        mmr_lambda=_override(args.mmr_lambda, cfg.mmr_lambda),
        embedder=embedder,
    )


def cmd_extract(args) -> int:
    base = _base_config(args)
    corpus_path = args.corpus or (base.corpus if base else None)
    if not corpus_path:
        raise UsageError("extract needs --corpus (or a config with one)")
    documents = load_corpus(corpus_path)
    config = _extraction_from_args(args, base)
    if args.lexicon:
        tagger = RuleTagger(load_lexicon(args.lexicon))
    elif base:
        tagger = build_tagger(base)
    else:
        tagger = RuleTagger()
    jobs = _override(args.jobs, base.jobs if base else default_jobs())
    per_doc = extract_corpus(documents, config, tagger=tagger, jobs=jobs)
    if args.out:
        write_keyphrases(args.out, per_doc)
    else:
        from aqg.keyphrase import keyphrases_to_json

        for doc_id in sorted(per_doc):
            print(json.dumps(keyphrases_to_json(doc_id, per_doc[doc_id]), ensure_ascii=False))
    return 0


def _generation_from_args(args, base: PipelineConfig | None) -> GenerationConfig:
    cfg = base.generation if base else GenerationConfig()
    return GenerationConfig(
        backend=_override(args.backend, cfg.backend),
        endpoint=_override(args.endpoint, cfg.endpoint),
        timeout_ms=cfg.timeout_ms,
        retries=cfg.retries,
        questions_per_keyphrase=_override(args.n, cfg.questions_per_keyphrase),
        prompt_template=_override(args.prompt_template, cfg.prompt_template),
        model_name=_override(args.model_name, cfg.model_name),
    )


def cmd_generate(args) -> int:
    base = _base_config(args)
    corpus_path = args.corpus or (base.corpus if base else None)
    if not corpus_path:
        raise UsageError("generate needs --corpus (or a config with one)")
    documents = load_corpus(corpus_path)
    config = _generation_from_args(args, base)
    if config.backend == "chat_http":
        per_doc = {}
    elif args.keyphrases:
        from aqg.keyphrase import read_keyphrases

        per_doc = read_keyphrases(args.keyphrases)
    else:
        raise UsageError("generate needs --keyphrases for keyphrase-conditioned backends")
    jobs = _override(args.jobs, base.jobs if base else default_jobs())
    questions = generate_questions(documents, per_doc, config, jobs=jobs)
    if args.out:
        write_questions(args.out, questions)
    else:
        for q in questions:
            print(json.dumps(q.to_json(), ensure_ascii=False))
    return 0


def cmd_rank(args) -> int:
    base = _base_config(args)
    embedder = (base.extraction.embedder if base else EmbedderConfig())
    embedder = EmbedderConfig(
        backend=_override(args.backend, embedder.backend),
        dim=_override(args.dim, embedder.dim),
        endpoint=_override(args.endpoint, embedder.endpoint),
        timeout_ms=embedder.timeout_ms,
        retries=embedder.retries,
    )
    corpus_path = args.corpus or (base.corpus if base else None)
    if not corpus_path:
        raise UsageError("rank needs --corpus (or a config with one)")
    documents = load_corpus(corpus_path)
    questions = read_questions(args.questions)
    ranked = rank_all(questions, documents, embedder, keep_top=args.keep_top)
    if args.out:
        write_questions(args.out, ranked)
    else:
        for q in ranked:
            print(json.dumps(q.to_json(), ensure_ascii=False))
    return 0


def cmd_eval(args) -> int:
    generated = read_questions(args.generated)
    reference = read_questions(args.reference)
    report = evaluate_questions(generated, reference, args.tau, args.ratings)
    print(format_report_table(report))
    if args.out:
        _dump_json(report.to_json(), args.out)
    return 0


def cmd_ratings(args) -> int:
    summary = summarize_ratings(read_ratings(args.ratings))
    _dump_json(summary.to_json(), args.out)
    return 0


def cmd_pipeline(args) -> int:
    config = load_pipeline_config(args.config)
    if args.out_dir:
        config.output_dir = Path(args.out_dir)
    if args.jobs is not None:
        config.jobs = args.jobs
    manifest_path = run_pipeline(config)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    for name in sorted(manifest["artifacts"].values()):
        print(Path(config.output_dir) / name)
    print(manifest_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aqg", description="Arabic question generation toolkit")
    parser.add_argument("--version", action="version", version=f"aqg {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate a corpus file and re-emit it")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="bag-of-words statistics for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--lexicon")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("extract", help="extract keyphrases per document")
    p.add_argument("--corpus")
    p.add_argument("--config")
    p.add_argument("--mode", choices=["pos", "ngram"])
    p.add_argument("--patterns", action="append", help="PoS pattern (repeatable)")
    p.add_argument("--n-min", type=int, dest="n_min")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--top-k", type=int, dest="top_k")
    p.add_argument("--diversify", choices=["none", "mmr"])
    p.add_argument("--mmr-lambda", type=float, dest="mmr_lambda")
    p.add_argument("--backend", choices=["hash", "http"])
    p.add_argument("--dim", type=int)
    p.add_argument("--endpoint")
    p.add_argument("--lexicon")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="generate questions from keyphrases")
    p.add_argument("--corpus")
    p.add_argument("--config")
    p.add_argument("--keyphrases", help="extraction output JSONL")
    p.add_argument("--backend", choices=["template", "seq2seq_http", "chat_http"])
    p.add_argument("--endpoint")
    p.add_argument("--model-name", dest="model_name")
    p.add_argument("--n", type=int, help="questions per keyphrase")
    p.add_argument("--prompt-template", dest="prompt_template")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rank", help="rank questions by document similarity")
    p.add_argument("--corpus")
    p.add_argument("--config")
    p.add_argument("--questions", required=True)
    p.add_argument("--backend", choices=["hash", "http"])
    p.add_argument("--dim", type=int)
    p.add_argument("--endpoint")
    p.add_argument("--keep-top", type=int, dest="keep_top")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="score generated questions against references")
    p.add_argument("--generated", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--ratings")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ratings", help="summarize human ratings")
    p.add_argument("--ratings", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ratings)

    p = sub.add_parser("pipeline", help="run every stage from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return UsageError.exit_code
        return args.func(args)
    except AqgError as exc:
        print(f"aqg: error: {exc}", file=sys.stderr)
        return exc.exit_code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
