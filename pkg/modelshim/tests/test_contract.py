"""Contract tests: shim responses must validate against the pipeline's wire
schemas, driven by the recorded fixture requests from the main repository."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from jsonschema import validate

from modelshim.app import create_app
from modelshim.config import ShimConfig

HTTP_FIXTURES = Path(__file__).resolve().parents[2] / "fixtures" / "http"

EMBED_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["vectors", "dim"],
    "properties": {
        "vectors": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "dim": {"type": "integer", "minimum": 2},
    },
}

GENERATE_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["questions"],
    "properties": {"questions": {"type": "array", "items": {"type": "string", "minLength": 1}}},
}


@pytest.fixture(scope="module")
def client():
    app = create_app(ShimConfig(embed_model="hash:64", gen_model="template", max_batch=8))
    return TestClient(app)


def fixture_request(name: str) -> dict:
    return json.loads((HTTP_FIXTURES / name).read_text("utf-8"))["request"]


class TestHealth:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.text == "ok"


class TestEmbedContract:
    def test_recorded_fixture_request(self, client):
        request = fixture_request("embed_batch.json")
        response = client.post("/embed", json=request)
        assert response.status_code == 200
        body = response.json()
        validate(body, EMBED_RESPONSE_SCHEMA)
        assert len(body["vectors"]) == len(request["texts"])
        assert all(len(row) == body["dim"] for row in body["vectors"])

    def test_identical_texts_identical_vectors(self, client):
        body = client.post("/embed", json={"texts": ["x", "x"]}).json()
        assert body["vectors"][0] == body["vectors"][1]

    def test_empty_batch(self, client):
        response = client.post("/embed", json={"texts": []})
        assert response.status_code == 200
        body = response.json()
        assert body == {"vectors": [], "dim": 64}

    def test_dim_constant_across_requests(self, client):
        first = client.post("/embed", json={"texts": ["a"]}).json()["dim"]
        second = client.post("/embed", json={"texts": ["b", "c"]}).json()["dim"]
        assert first == second == 64

    def test_batch_over_limit_is_413(self, client):
        response = client.post("/embed", json={"texts": ["x"] * 9})
        assert response.status_code == 413

    def test_malformed_body_is_400(self, client):
        response = client.post("/embed", json={"text": "x"})
        assert response.status_code == 400
        response = client.post("/embed", content=b"not json")
        assert response.status_code == 400


class TestGenerateContract:
    def test_recorded_fixture_request(self, client):
        request = fixture_request("generate_elements.json")
        response = client.post("/generate", json=request)
        assert response.status_code == 200
        body = response.json()
        validate(body, GENERATE_RESPONSE_SCHEMA)
        assert 1 <= len(body["questions"]) <= request["n"]
        for question in body["questions"]:
            assert question == question.strip()
            assert question != request["prompt"]

    def test_at_most_n_questions(self, client):
        request = fixture_request("generate_elements.json") | {"n": 2}
        body = client.post("/generate", json=request).json()
        assert len(body["questions"]) <= 2

    def test_empty_context_is_400(self, client):
        response = client.post(
            "/generate", json={"context": "", "keyphrase": None, "n": 1, "prompt": ""}
        )
        assert response.status_code == 400

    def test_bad_n_is_400(self, client):
        response = client.post(
            "/generate", json={"context": "نص", "keyphrase": None, "n": 0, "prompt": ""}
        )
        assert response.status_code == 400

    def test_missing_context_is_400(self, client):
        response = client.post("/generate", json={"n": 1})
        assert response.status_code == 400

    def test_never_echoes_prompt(self, client):
        prompt = "أنشئ سؤالاً عن: الدم\nالنص: الدم سائل"
        body = client.post(
            "/generate",
            json={"context": "الدم سائل", "keyphrase": "الدم", "n": 3, "prompt": prompt},
        ).json()
        assert prompt not in body["questions"]


class TestAuth:
    def test_token_required_when_configured(self):
        app = create_app(ShimConfig(embed_model="hash:16", gen_model="template", token="sesame"))
        client = TestClient(app)
        assert client.post("/embed", json={"texts": ["x"]}).status_code == 401
        ok = client.post(
            "/embed", json={"texts": ["x"]}, headers={"Authorization": "Bearer sesame"}
        )
        assert ok.status_code == 200
        assert client.get("/healthz").status_code == 200  # health stays open
