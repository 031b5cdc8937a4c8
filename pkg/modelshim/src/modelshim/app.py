"""FastAPI application: GET /healthz, POST /embed, POST /generate.

Responses follow the pipeline's wire formats exactly:
/embed   {"texts": [...]}                  -> {"vectors": [[...], ...], "dim": d}
/generate {"context", "keyphrase", "n", "prompt"} -> {"questions": [...]}

Malformed bodies get 400, batches over the limit 413, model failures 500.
Model access is serialized with a lock so concurrent requests never
interleave inference.
"""

import logging
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from modelshim.config import ShimConfig
from modelshim.models import load_embedder, load_generator

logger = logging.getLogger(__name__)


class EmbedRequest(BaseModel):
    texts: list[str]


class GenerateRequest(BaseModel):
    context: str
    keyphrase: str | None = None
    n: int = 1
    prompt: str = ""


def create_app(config: ShimConfig | None = None) -> FastAPI:
    config = config or ShimConfig.from_env()
    config.validate()
    embedder = load_embedder(config.embed_model, device=config.device)
    generator = load_generator(config.gen_model, device=config.device)
    lock = threading.Lock()
    app = FastAPI(title="modelshim", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    def check_auth(request: Request) -> JSONResponse | None:
        if config.token is None:
            return None
        if request.headers.get("Authorization") != f"Bearer {config.token}":
            return JSONResponse(status_code=401, content={"error": "unauthorized"})
        return None

    @app.get("/healthz")
    def healthz():
        return PlainTextResponse("ok")

    @app.post("/embed")
    def embed(body: EmbedRequest, request: Request):
        denied = check_auth(request)
        if denied:
            return denied
        if len(body.texts) > config.max_batch:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(body.texts)} exceeds limit {config.max_batch}"},
            )
        try:
            with lock:
                vectors = embedder.encode(body.texts)
        except Exception:
            logger.exception("embedding failed")
            return JSONResponse(status_code=500, content={"error": "embedding model failure"})
        return {"vectors": vectors, "dim": embedder.dim}

    @app.post("/generate")
    def generate(body: GenerateRequest, request: Request):
        denied = check_auth(request)
        if denied:
            return denied
        if not body.context.strip():
            return JSONResponse(status_code=400, content={"error": "context must be non-empty"})
        if body.n < 1:
            return JSONResponse(status_code=400, content={"error": "n must be >= 1"})
        try:
            with lock:
                raw = generator.generate(body.context, body.keyphrase, body.prompt, body.n)
        except Exception:
            logger.exception("generation failed")
            return JSONResponse(status_code=500, content={"error": "generation model failure"})
        questions = []
        for text in raw:
            text = text.strip()
            # never echo the prompt (or the raw context) back as a question
            if not text or text == body.prompt.strip() or text == body.context.strip():
                continue
            questions.append(text)
        return {"questions": questions[: body.n]}

    return app
