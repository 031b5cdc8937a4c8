"""Text-to-vector backends and similarity math.

The "hash" backend is a fully specified deterministic embedder so cosine
ranking is testable offline and reproducible to the bit:

  1. Normalize the text (textnorm rules); an empty normalized text embeds
     as the zero vector (flagged in the log, not an error).
  2. Wrap as "^" + text + "$" and take every window of 3 codepoints (the
     whole string if shorter than 3).
  3. Hash each trigram's UTF-8 bytes with FNV-1a 64 and add 1 at
     hash mod dim.
  4. L2-normalize unless all-zero.

The "http" backend POSTs {endpoint}/embed with {"texts": [...]} and expects
{"vectors": [[...], ...], "dim": d}, one vector per text in order.
"""

import logging
from dataclasses import dataclass

import numpy as np

from aqg.client import post_json
from aqg.errors import BackendError, ConfigError
from aqg.textnorm import normalize

logger = logging.getLogger(__name__)

FNV64_OFFSET_BASIS = 14695981039346656037
FNV64_PRIME = 1099511628211
_U64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _U64
    return h


def hash_embed(text: str, dim: int) -> np.ndarray:
    """Deterministic character-trigram feature-hash embedding (float64)."""
    if dim < 2:
        raise ConfigError(f"embedding dim must be >= 2, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    norm_text = normalize(text)
    if not norm_text:
        return vec
    wrapped = "^" + norm_text + "$"
    if len(wrapped) < 3:
        grams = [wrapped]
    else:
        grams = [wrapped[i : i + 3] for i in range(len(wrapped) - 2)]
    for gram in grams:
        vec[fnv1a_64(gram.encode("utf-8")) % dim] += 1.0
    length = float(np.linalg.norm(vec))
    if length > 0.0:
        vec /= length
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|); 0.0 by convention if either norm is zero."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))


HASH_BACKEND = "hash"
HTTP_BACKEND = "http"


@dataclass
class EmbedderConfig:
    backend: str = HASH_BACKEND
    dim: int = 256
    endpoint: str | None = None
    timeout_ms: int = 10000
    retries: int = 2

    def validate(self) -> None:
        if self.backend not in (HASH_BACKEND, HTTP_BACKEND):
            raise ConfigError(f"unknown embedding backend {self.backend!r}")
        if self.dim < 2:
            raise ConfigError(f"embedding dim must be >= 2, got {self.dim}")
        if self.backend == HTTP_BACKEND and not self.endpoint:
            raise ConfigError("http embedding backend requires an endpoint")
        if self.retries < 0:
            raise ConfigError("retries must be >= 0")


def embed_texts(texts: list[str], config: EmbedderConfig, client=None) -> list[np.ndarray]:
    """One vector per input text, order-aligned."""
    config.validate()
    if config.backend == HASH_BACKEND:
        vectors = []
        for text in texts:
            vec = hash_embed(text, config.dim)
            if not vec.any():
                logger.warning("empty text embedded as the zero vector")
            vectors.append(vec)
        return vectors

    data = post_json(
        config.endpoint.rstrip("/") + "/embed",
        {"texts": list(texts)},
        timeout_ms=config.timeout_ms,
        retries=config.retries,
        client=client,
    )
    raw = data.get("vectors")
    dim = data.get("dim")
    if not isinstance(raw, list) or not isinstance(dim, int):
        raise BackendError("embedding response missing 'vectors' or 'dim'")
    if len(raw) != len(texts):
        raise BackendError(f"embedding server returned {len(raw)} vectors for {len(texts)} texts")
    vectors = []
    for row in raw:
        vec = np.asarray(row, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != dim:
            raise BackendError(f"embedding server returned a vector of dim {vec.shape}, expected {dim}")
        if not np.all(np.isfinite(vec)):
            raise BackendError("embedding server returned non-finite values")
        vectors.append(vec)
    return vectors
