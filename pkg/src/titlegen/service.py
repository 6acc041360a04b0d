"""REST suggestion backend: one deployment serves many clients.

POST /api/v1/suggest passes each request's description to the configured
generator and returns {"title", "generator"}; the request/response bodies
match the remote-generator protocol so services can be chained. The server
keeps no per-client state between requests.

Error taxonomy: 400 malformed/empty input, 404 unknown route, 413 oversize
body, 502 upstream generator failure, 504 upstream timeout.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .generation import (
    GeneratorSpec,
    RemoteGeneratorError,
    RemoteTimeoutError,
    make_generator,
)

logger = logging.getLogger("titlegen.service")

DEFAULT_BIND = "127.0.0.1:8765"
DEFAULT_MAX_BODY_BYTES = 65536
# The Userscript calls from the issue-tracker page, so its origin must be
# granted by default; anything else needs an explicit allow-list entry.
DEFAULT_CORS_ORIGINS = ("https://github.com",)


@dataclass(frozen=True)
class ServiceConfig:
    bind_address: str = DEFAULT_BIND
    generator: GeneratorSpec = field(default_factory=lambda: GeneratorSpec(kind="lead"))
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES
    cors_allowed_origins: tuple[str, ...] = DEFAULT_CORS_ORIGINS

    def __post_init__(self):
        if self.max_body_bytes < 1024:
            raise ValueError("max_body_bytes must be >= 1024")
        self.port  # validate bind address eagerly

    @property
    def host(self) -> str:
        host, _, _ = self.bind_address.rpartition(":")
        if not host:
            raise ValueError(f"bind_address must be host:port, got {self.bind_address!r}")
        return host

    @property
    def port(self) -> int:
        _, _, port = self.bind_address.rpartition(":")
        try:
            value = int(port)
        except ValueError:
            raise ValueError(f"bind_address must be host:port, got {self.bind_address!r}") from None
        if not 1 <= value <= 65535:
            raise ValueError(f"bind port must be in [1, 65535], got {value}")
        return value


def _error(status_code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": message})


def create_app(cfg: ServiceConfig | None = None) -> FastAPI:
    """Build the application around an immutable config; no other shared state."""
    cfg = cfg or ServiceConfig()
    generate = make_generator(cfg.generator)
    generator_label = cfg.generator.label

    app = FastAPI(title="titlegen suggestion service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cfg.cors_allowed_origins),
        allow_methods=["GET", "POST", "OPTIONS"],
        allow_headers=["Content-Type"],
    )

    @app.middleware("http")
    async def log_request(request: Request, call_next):
        start = time.monotonic()
        response = await call_next(request)
        logger.info(
            json.dumps(
                {
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "ms": round(1000 * (time.monotonic() - start), 2),
                }
            )
        )
        return response

    @app.post("/api/v1/suggest")
    async def suggest(request: Request) -> Response:
        content_length = request.headers.get("content-length")
        if content_length and content_length.isdigit() and int(content_length) > cfg.max_body_bytes:
            return _error(413, f"request body exceeds {cfg.max_body_bytes} bytes")
        content_type = request.headers.get("content-type", "")
        if "application/json" not in content_type:
            return _error(400, "Content-Type must be application/json")
        body = await request.body()
        if len(body) > cfg.max_body_bytes:
            return _error(413, f"request body exceeds {cfg.max_body_bytes} bytes")
        try:
            payload = json.loads(body)
        except (UnicodeDecodeError, json.JSONDecodeError):
            return _error(400, "request body is not valid JSON")
        description = payload.get("description") if isinstance(payload, dict) else None
        if not isinstance(description, str) or not description.strip():
            return _error(400, 'request must carry a non-empty string "description"')
        try:
            suggestion = await run_in_threadpool(generate, description)
        except RemoteTimeoutError:
            return _error(504, f"upstream generator timed out ({generator_label})")
        except RemoteGeneratorError as exc:
            return _error(502, f"upstream generator failed: {exc}")
        return JSONResponse({"title": suggestion.title, "generator": suggestion.generator_name})

    @app.get("/health")
    async def health() -> dict:
        # Reflects this service only, not any remote upstream.
        return {"status": "ok", "generator": generator_label}

    @app.head("/health")
    async def health_head() -> Response:
        return Response(status_code=200)

    return app


def run(cfg: ServiceConfig) -> None:
    """Serve until interrupted; in-flight requests finish on shutdown."""
    import uvicorn

    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="info")
