"""Shared HTTP plumbing for backend clients (embedding, generation, tagging).

POSTs JSON and retries transport-level failures (timeouts, connection
errors) up to ``retries`` extra attempts with doubling backoff starting at
200 ms. Non-200 responses and malformed bodies fail immediately. A bearer
token is attached from the AQG_ENDPOINT_TOKEN environment variable when set.
"""

import os
import time

import httpx

from aqg.errors import BackendError

AUTH_TOKEN_ENV = "AQG_ENDPOINT_TOKEN"
BACKOFF_INITIAL_S = 0.2


def post_json(
    url: str,
    payload: dict,
    *,
    timeout_ms: int = 10000,
    retries: int = 2,
    client: httpx.Client | None = None,
) -> dict:
    headers = {}
    token = os.environ.get(AUTH_TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    timeout = timeout_ms / 1000.0
    own_client = client is None
    cl = httpx.Client(timeout=timeout) if own_client else client
    try:
        delay = BACKOFF_INITIAL_S
        attempts = retries + 1
        for attempt in range(1, attempts + 1):
            try:
                response = cl.post(url, json=payload, headers=headers, timeout=timeout)
            except httpx.HTTPError as exc:
                if attempt == attempts:
                    raise BackendError(
                        f"request to {url} failed after {attempts} attempt(s): {exc}"
                    ) from exc
                time.sleep(delay)
                delay *= 2
                continue
            if response.status_code != 200:
                raise BackendError(f"{url} returned HTTP {response.status_code}")
            try:
                data = response.json()
            except ValueError as exc:
                raise BackendError(f"{url} returned a non-JSON body") from exc
            if not isinstance(data, dict):
                raise BackendError(f"{url} returned {type(data).__name__}, expected an object")
            return data
        raise BackendError(f"request to {url} failed")  # pragma: no cover
    finally:
        if own_client:
            cl.close()
