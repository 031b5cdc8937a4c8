"""Question generation backends and question ranking.

Three backends share one output type:

* ``template``: offline, deterministic; cycles three Arabic question
  templates over the keyphrase surface form.
* ``seq2seq_http``: POSTs {endpoint}/generate with
  {"context", "keyphrase", "n", "prompt"} and reads {"questions": [...]}.
* ``chat_http``: benchmark generation. POSTs a chat-completions-style
  request conditioned on the document only (no keyphrase) and parses one
  question per line of choices[0].message.content.

Ranking scores each question by cosine similarity to its document and
sorts descending; ties prefer the shorter question, then lexicographic
order, so the result is invariant under input permutation.
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path

from aqg.client import post_json
from aqg.corpus import Document
from aqg.embed import EmbedderConfig, cosine, embed_texts
from aqg.errors import BackendError, ConfigError
from aqg.keyphrase import ScoredKeyphrase
from aqg.textnorm import normalize

TEMPLATE_BACKEND = "template"
SEQ2SEQ_BACKEND = "seq2seq_http"
CHAT_BACKEND = "chat_http"

QUESTION_TEMPLATES = ("ما هي {}؟", "عرّف {}.", "اذكر أهمية {}.")

DEFAULT_PROMPT_TEMPLATE = "أنشئ سؤالاً عن: {keyphrase}\nالنص: {text}"

CHAT_SYSTEM_PROMPT = "أنت مساعد تعليمي يكتب أسئلة تقييم واضحة وسليمة باللغة العربية."
CHAT_USER_TEMPLATE = "اكتب أسئلة تقييم عن النص الآتي، سؤالاً واحداً في كل سطر:\n{text}"


@dataclass(frozen=True)
class GeneratedQuestion:
    question_id: str
    doc_id: str
    keyphrase: str | None  # normalized phrase; None for the chat benchmark
    question: str
    backend: str
    rank_score: float = 0.0

    def to_json(self) -> dict:
        return {
            "question_id": self.question_id,
            "doc_id": self.doc_id,
            "keyphrase": self.keyphrase,
            "question": self.question,
            "backend": self.backend,
            "rank_score": self.rank_score,
        }


@dataclass
class GenerationConfig:
    backend: str = TEMPLATE_BACKEND
    endpoint: str | None = None
    timeout_ms: int = 30000
    retries: int = 2
    questions_per_keyphrase: int = 1
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    model_name: str = ""

    def validate(self) -> None:
        if self.backend not in (TEMPLATE_BACKEND, SEQ2SEQ_BACKEND, CHAT_BACKEND):
            raise ConfigError(f"unknown generation backend {self.backend!r}")
        if self.questions_per_keyphrase < 1:
            raise ConfigError("questions_per_keyphrase must be >= 1")
        if self.backend in (SEQ2SEQ_BACKEND, CHAT_BACKEND) and not self.endpoint:
            raise ConfigError(f"{self.backend} backend requires an endpoint")
        if self.backend == CHAT_BACKEND and not self.model_name:
            raise ConfigError("chat_http backend requires a model_name")
        if self.backend == SEQ2SEQ_BACKEND and (
            "{keyphrase}" not in self.prompt_template or "{text}" not in self.prompt_template
        ):
            raise ConfigError("prompt_template needs both {text} and {keyphrase} slots")
        if self.retries < 0:
            raise ConfigError("retries must be >= 0")


def question_id(doc_id: str, keyphrase: str | None, backend: str, ordinal: int) -> str:
    return "::".join([doc_id, keyphrase or "", backend, str(ordinal)])


def generate_template(doc: Document, kp: ScoredKeyphrase, n: int) -> list[GeneratedQuestion]:
    """Exactly n questions, cycling the template list over the surface form."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = []
    for ordinal in range(1, n + 1):
        template = QUESTION_TEMPLATES[(ordinal - 1) % len(QUESTION_TEMPLATES)]
        out.append(
            GeneratedQuestion(
                question_id(doc.id, kp.text, TEMPLATE_BACKEND, ordinal),
                doc.id,
                kp.text,
                template.format(kp.surface),
                TEMPLATE_BACKEND,
            )
        )
    return out


def render_prompt(template: str, doc: Document, kp: ScoredKeyphrase) -> str:
    return template.format(text=doc.text, keyphrase=kp.surface)


def generate_seq2seq(
    doc: Document, kp: ScoredKeyphrase, config: GenerationConfig, client=None
) -> list[GeneratedQuestion]:
    """Questions from the external seq2seq service, trimmed, empties dropped."""
    config.validate()
    n = config.questions_per_keyphrase
    data = post_json(
        config.endpoint.rstrip("/") + "/generate",
        {
            "context": doc.text,
            "keyphrase": kp.surface,
            "n": n,
            "prompt": render_prompt(config.prompt_template, doc, kp),
        },
        timeout_ms=config.timeout_ms,
        retries=config.retries,
        client=client,
    )
    raw = data.get("questions")
    if not isinstance(raw, list) or not all(isinstance(q, str) for q in raw):
        raise BackendError("generation response missing a 'questions' list of strings")
    texts = [q.strip() for q in raw]
    texts = [q for q in texts if q][:n]
    if not texts:
        raise BackendError(f"generation backend returned no usable questions for {doc.id!r}")
    return [
        GeneratedQuestion(
            question_id(doc.id, kp.text, SEQ2SEQ_BACKEND, ordinal), doc.id, kp.text, q, SEQ2SEQ_BACKEND
        )
        for ordinal, q in enumerate(texts, start=1)
    ]


def generate_benchmark(doc: Document, config: GenerationConfig, client=None) -> list[GeneratedQuestion]:
    """Benchmark questions for the whole document from a chat-style service."""
    config.validate()
    data = post_json(
        config.endpoint,
        {
            "model": config.model_name,
            "messages": [
                {"role": "system", "content": CHAT_SYSTEM_PROMPT},
                {"role": "user", "content": CHAT_USER_TEMPLATE.format(text=doc.text)},
            ],
        },
        timeout_ms=config.timeout_ms,
        retries=config.retries,
        client=client,
    )
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise BackendError("chat response missing choices[0].message.content") from None
    if not isinstance(content, str):
        raise BackendError("chat response content is not a string")
    texts = [line.strip() for line in content.splitlines()]
    texts = [q for q in texts if q]
    if not texts:
        raise BackendError(f"chat backend returned no questions for {doc.id!r}")
    return [
        GeneratedQuestion(
            question_id(doc.id, None, CHAT_BACKEND, ordinal), doc.id, None, q, CHAT_BACKEND
        )
        for ordinal, q in enumerate(texts, start=1)
    ]


def rank_questions(
    questions: list[GeneratedQuestion], doc: Document, embedder: EmbedderConfig, client=None
) -> list[GeneratedQuestion]:
    """Sort a document's questions by cosine similarity to the document.

    Returns a permutation of the input with rank_score filled in. Ties are
    broken by shorter question, lexicographic text, then question id.
    """
    if not questions:
        return []
    vectors = embed_texts(
        [normalize(doc.text)] + [q.question for q in questions], embedder, client=client
    )
    doc_vec = vectors[0]
    ranked = [
        replace(q, rank_score=cosine(vec, doc_vec)) for q, vec in zip(questions, vectors[1:])
    ]
    ranked.sort(key=lambda q: (-q.rank_score, len(q.question), q.question, q.question_id))
    return ranked


def write_questions(path: str | Path, questions: list[GeneratedQuestion]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for q in questions:
            fh.write(json.dumps(q.to_json(), ensure_ascii=False) + "\n")


def read_questions(path: str | Path) -> list[GeneratedQuestion]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out.append(
            GeneratedQuestion(
                obj["question_id"],
                obj["doc_id"],
                obj.get("keyphrase"),
                obj["question"],
                obj.get("backend", TEMPLATE_BACKEND),
                obj.get("rank_score", 0.0),
            )
        )
    return out
