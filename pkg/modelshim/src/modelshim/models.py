"""Model loading for the shim.

Two embedding implementations and two generators share tiny interfaces:
an embedder has ``dim`` and ``encode(texts) -> list[list[float]]``, a
generator has ``generate(context, keyphrase, prompt, n) -> list[str]``.
Built-ins ("hash:<dim>", "template") are deterministic and dependency
free so the service always starts; real model identifiers are loaded
lazily through sentence-transformers / transformers and decode
deterministically (beam search, no sampling).
"""

import math


class HashEmbedder:
    """Character-trigram feature hasher (FNV-1a 64), L2-normalized."""

    _PRIME = 0x100000001B3
    _BASIS = 0xCBF29CE484222325

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError(f"embedding dim must be >= 2, got {dim}")
        self.dim = dim

    def _bucket(self, gram: str) -> int:
        h = self._BASIS
        for byte in gram.encode("utf-8"):
            h = ((h ^ byte) * self._PRIME) % 2**64
        return h % self.dim

    def encode(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            counts = [0.0] * self.dim
            if text:
                wrapped = "^" + text + "$"
                grams = (
                    [wrapped]
                    if len(wrapped) < 3
                    else [wrapped[i : i + 3] for i in range(len(wrapped) - 2)]
                )
                for gram in grams:
                    counts[self._bucket(gram)] += 1.0
                length = math.sqrt(sum(c * c for c in counts))
                if length:
                    counts = [c / length for c in counts]
            out.append(counts)
        return out


class SentenceEmbedder:
    """sentence-transformers wrapper; deterministic inference."""

    def __init__(self, name: str, device: str = "cpu"):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(name, device=device)
        self.dim = int(self.model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> list[list[float]]:
        if not texts:
            return []
        vectors = self.model.encode(texts, convert_to_numpy=True, show_progress_bar=False)
        return [[float(x) for x in row] for row in vectors]


TEMPLATES = ("ما هو {}؟", "اشرح {}.", "لماذا يعد {} مهماً؟")


class TemplateGenerator:
    """Deterministic offline generator; keyphrase first, context words otherwise."""

    def generate(self, context: str, keyphrase: str | None, prompt: str, n: int) -> list[str]:
        subject = keyphrase or " ".join(context.split()[:3])
        return [TEMPLATES[i % len(TEMPLATES)].format(subject) for i in range(n)]


class Seq2SeqGenerator:
    """transformers seq2seq wrapper with beam-search decoding (no sampling)."""

    def __init__(self, name: str, device: str = "cpu", num_beams: int = 4):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(name)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(name).to(device).eval()
        self.device = device
        self.num_beams = num_beams

    def generate(self, context: str, keyphrase: str | None, prompt: str, n: int) -> list[str]:
        import torch

        text = prompt or (f"{keyphrase}: {context}" if keyphrase else context)
        inputs = self.tokenizer(text, return_tensors="pt", truncation=True).to(self.device)
        beams = max(self.num_beams, n)
        with torch.no_grad():
            outputs = self.model.generate(
                **inputs,
                num_beams=beams,
                do_sample=False,
                num_return_sequences=min(n, beams),
                max_new_tokens=64,
            )
        return [self.tokenizer.decode(seq, skip_special_tokens=True) for seq in outputs]


def load_embedder(identifier: str, device: str = "cpu"):
    if identifier.startswith("hash:"):
        return HashEmbedder(int(identifier.split(":", 1)[1]))
    return SentenceEmbedder(identifier, device=device)


def load_generator(identifier: str, device: str = "cpu"):
    if identifier == "template":
        return TemplateGenerator()
    return Seq2SeqGenerator(identifier, device=device)
