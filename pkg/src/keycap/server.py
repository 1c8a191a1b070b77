"""HTTP surface for the verification service.

Bodies are parsed by hand rather than through response models so that
malformed input gets the same {decision, reason, retry_allowed} envelope
the protocol uses everywhere else (reason "bad_request", HTTP 400).
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .features import KeystrokeTrace
from .service import CaptchaService, VerifyResponse
from .store import StoreFullError, StoreSweeper


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={
            "decision": "error",
            "reason": "bad_request",
            "retry_allowed": False,
            "detail": detail,
        },
    )


def create_app(
    service: CaptchaService,
    static_dir: str | Path | None = None,
    sweep_interval_s: float = 30.0,
) -> FastAPI:
    sweeper = StoreSweeper(service.store, interval_s=sweep_interval_s)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        sweeper.start()
        try:
            yield
        finally:
            sweeper.stop()

    app = FastAPI(title="keycap", lifespan=lifespan)

    @app.get("/api/health")
    async def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/challenge")
    async def issue_challenge(request: Request) -> JSONResponse:
        body = await request.body()
        category = None
        if body:
            try:
                parsed = await request.json()
            except Exception:
                return _bad_request("body must be a JSON object")
            if not isinstance(parsed, dict):
                return _bad_request("body must be a JSON object")
            category = parsed.get("category")
            if category is not None and not isinstance(category, str):
                return _bad_request("category must be a string")
        try:
            issued = service.issue_challenge(category)
        except ValueError:
            return JSONResponse(status_code=400, content={"error": "unknown_category"})
        except StoreFullError:
            return JSONResponse(status_code=503, content={"error": "store_full"})
        return JSONResponse(status_code=200, content=issued)

    @app.post("/api/verify")
    async def verify(request: Request) -> JSONResponse:
        try:
            parsed = await request.json()
        except Exception:
            return _bad_request("body must be a JSON object")
        if not isinstance(parsed, dict):
            return _bad_request("body must be a JSON object")
        challenge_id = parsed.get("challenge_id")
        typed_text = parsed.get("typed_text")
        if not isinstance(challenge_id, str) or not isinstance(typed_text, str):
            return _bad_request("challenge_id and typed_text must be strings")
        try:
            trace = KeystrokeTrace.from_dict(parsed.get("trace"))
        except ValueError as exc:
            return _bad_request(str(exc))
        trace.typed_text = typed_text
        result: VerifyResponse = service.verify(challenge_id, typed_text, trace)
        return JSONResponse(status_code=200, content=result.to_dict())

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="client")

    return app
