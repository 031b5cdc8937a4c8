import json

import httpx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqg.embed import EmbedderConfig, cosine, embed_texts, fnv1a_64, hash_embed
from aqg.errors import BackendError, ConfigError

from oracles import fnv1a_64_ref, hash_embed_ref


def mock_client(handler):
    return httpx.Client(transport=httpx.MockTransport(handler))


class TestFnv:
    # published FNV-1a 64 vectors, plus the independent implementation
    VECTORS = {
        b"": 0xCBF29CE484222325,
        b"a": 0xAF63DC4C8601EC8C,
        b"foobar": 0x85944171F73967E8,
    }

    def test_known_vectors(self):
        for data, expected in self.VECTORS.items():
            assert fnv1a_64(data) == expected
            assert fnv1a_64_ref(data) == expected

    @given(st.binary(max_size=32))
    def test_agrees_with_reference(self, data):
        assert fnv1a_64(data) == fnv1a_64_ref(data)


class TestHashEmbed:
    def test_unit_norm_for_nonempty(self):
        for text in ("اب", "الدم", "خلية عصبية", "DNA", "a"):
            assert np.linalg.norm(hash_embed(text, 256)) == pytest.approx(1.0, abs=1e-12)

    def test_empty_is_zero_vector(self):
        assert not hash_embed("", 256).any()

    def test_diacritics_only_is_zero_vector(self):
        assert not hash_embed("ًّ", 256).any()

    def test_committed_fixture_bit_for_bit(self, fixtures_dir):
        fixture = json.loads((fixtures_dir / "hash_embed_ab_256.json").read_text("utf-8"))
        got = hash_embed(fixture["text"], fixture["dim"])
        assert [float(x) for x in got] == fixture["vector"]

    def test_matches_reference_implementation(self):
        for text in ("اب", "الدم في الجسم", "عناصر أساسية"):
            assert [float(x) for x in hash_embed(text, 64)] == hash_embed_ref(text, 64)

    def test_trigram_bag_property(self):
        # same trigram multiset, different strings: the two interior loops
        # on the pair "ab" are swapped
        a = hash_embed("zabxabyabw", 128)
        b = hash_embed("zabyabxabw", 128)
        assert np.array_equal(a, b)
        c = hash_embed("zabxabyabv", 128)
        assert not np.array_equal(a, c)

    def test_single_char_text(self):
        vec = hash_embed("ا", 16)
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)

    def test_dim_too_small(self):
        with pytest.raises(ConfigError):
            hash_embed("اب", 1)


class TestCosine:
    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_positive_scaling(self):
        assert cosine(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == pytest.approx(1.0, abs=1e-12)

    def test_closed_form(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.70710678, abs=1e-8)

    def test_zero_norm_convention(self):
        assert cosine(np.zeros(4), np.ones(4)) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.ones(3), np.ones(4))

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = rng.normal(size=16)
            b = rng.normal(size=16)
            assert cosine(a, b) == cosine(b, a)
            assert abs(cosine(a, b)) <= 1 + 1e-12

    def test_scale_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a = rng.normal(size=16)
            b = rng.normal(size=16)
            alpha, beta = rng.uniform(0.01, 100, size=2)
            assert cosine(alpha * a, beta * b) == pytest.approx(cosine(a, b), abs=1e-9)


class TestEmbedTexts:
    def test_hash_determinism(self):
        config = EmbedderConfig()
        first = embed_texts(["x", "x"], config)
        assert np.array_equal(first[0], first[1])
        again = embed_texts(["x", "x"], config)
        assert np.array_equal(first[0], again[0])

    def test_empty_text_flagged_not_error(self, caplog):
        with caplog.at_level("WARNING"):
            vectors = embed_texts([""], EmbedderConfig(dim=32))
        assert not vectors[0].any()
        assert vectors[0].shape == (32,)
        assert any("zero vector" in r.message for r in caplog.records)

    def test_http_requires_endpoint(self):
        with pytest.raises(ConfigError):
            embed_texts(["x"], EmbedderConfig(backend="http"))

    def test_unknown_backend(self):
        with pytest.raises(ConfigError):
            embed_texts(["x"], EmbedderConfig(backend="bert"))


class TestHttpBackend:
    CONFIG = EmbedderConfig(backend="http", endpoint="http://embed.test", retries=0)

    def test_replays_recorded_exchange(self, fixtures_dir):
        fixture = json.loads((fixtures_dir / "http" / "embed_batch.json").read_text("utf-8"))

        def handler(request):
            assert request.url.path == "/embed"
            assert json.loads(request.content) == fixture["request"]
            return httpx.Response(200, json=fixture["response"])

        vectors = embed_texts(
            fixture["request"]["texts"], self.CONFIG, client=mock_client(handler)
        )
        assert [list(v) for v in vectors] == fixture["response"]["vectors"]

    def test_count_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"vectors": [[1.0], [2.0], [3.0]], "dim": 1})

        with pytest.raises(BackendError, match="3 vectors for 2 texts"):
            embed_texts(["a", "b"], self.CONFIG, client=mock_client(handler))

    def test_row_dim_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"vectors": [[1.0, 2.0]], "dim": 3})

        with pytest.raises(BackendError):
            embed_texts(["a"], self.CONFIG, client=mock_client(handler))

    def test_non_200(self):
        def handler(request):
            return httpx.Response(503)

        with pytest.raises(BackendError, match="503"):
            embed_texts(["a"], self.CONFIG, client=mock_client(handler))

    def test_malformed_body(self):
        def handler(request):
            return httpx.Response(200, content=b"not json")

        with pytest.raises(BackendError, match="non-JSON"):
            embed_texts(["a"], self.CONFIG, client=mock_client(handler))

    def test_non_finite_rejected(self):
        def handler(request):
            return httpx.Response(200, content=b'{"vectors": [[1.0, NaN]], "dim": 2}')

        with pytest.raises(BackendError):
            embed_texts(["a"], self.CONFIG, client=mock_client(handler))

    def test_retries_then_success(self, monkeypatch):
        sleeps = []
        monkeypatch.setattr("aqg.client.time.sleep", sleeps.append)
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] < 3:
                raise httpx.ConnectError("boom")
            return httpx.Response(200, json={"vectors": [[1.0, 0.0]], "dim": 2})

        config = EmbedderConfig(backend="http", endpoint="http://embed.test", retries=2)
        vectors = embed_texts(["a"], config, client=mock_client(handler))
        assert list(vectors[0]) == [1.0, 0.0]
        assert calls["n"] == 3
        assert sleeps == [0.2, 0.4]

    def test_retries_exhausted(self, monkeypatch):
        monkeypatch.setattr("aqg.client.time.sleep", lambda s: None)
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            raise httpx.ConnectTimeout("slow")

        config = EmbedderConfig(backend="http", endpoint="http://embed.test", retries=1)
        with pytest.raises(BackendError, match="after 2 attempt"):
            embed_texts(["a"], config, client=mock_client(handler))
        assert calls["n"] == 2

    def test_bearer_token_attached(self, monkeypatch):
        monkeypatch.setenv("AQG_ENDPOINT_TOKEN", "sesame")

        def handler(request):
            assert request.headers["Authorization"] == "Bearer sesame"
            return httpx.Response(200, json={"vectors": [[1.0, 0.0]], "dim": 2})

        embed_texts(["a"], self.CONFIG, client=mock_client(handler))
