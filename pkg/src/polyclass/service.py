"""HTTP classification service over a ClassStore.

Systems are submitted as plain text bodies in the `.pols` grammar; all
responses are JSON except the canonical-text download.  Classification
(`POST /v1/classify`) never writes; registration (`POST /v1/systems`) is
idempotent on the canonical key.  Canonization runs in a bounded worker
pool under a per-request deadline, so a pathological input produces 504
(or 429 when the pool is saturated) rather than an unbounded hang.

Auth, when enabled, is a static bearer-token list applied to the mutating
endpoint only.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.concurrency import run_in_threadpool

from . import __version__
from .canon import (
    CanonicalForm,
    CanonizationTimeout,
    FORMAT_VERSION,
    SymmetryGenerators,
    canonical_form_of_system,
)
from .parser import ParseError, parse_system
from .store import ClassStore

MAX_BODY_BYTES = 10 * 2**20
_KEY_RE = re.compile(r"^[0-9a-f]{64}$")


class _Saturated(RuntimeError):
    pass


@dataclass
class ServiceConfig:
    deadline_s: float = 30.0
    max_body_bytes: int = MAX_BODY_BYTES
    workers: int | None = None  # None: one per CPU core


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": message, **extra}, status_code=status)


def _counts_payload(form: CanonicalForm) -> dict:
    return {
        "n_node_variable": form.counts.n_node_variable,
        "n_node_monomial": form.counts.n_node_monomial,
        "n_node_equation": form.counts.n_node_equation,
        "n_node_degree": form.counts.n_node_degree,
        "n_degree": form.n_degree,
        "degrees": list(form.degrees),
    }


def create_app(
    store: ClassStore,
    tokens: frozenset[str] | None = None,
    config: ServiceConfig | None = None,
) -> FastAPI:
    cfg = config or ServiceConfig()
    workers = cfg.workers or (__import__("os").cpu_count() or 2)
    slots = threading.Semaphore(workers)
    app = FastAPI(title="polyclass", version=__version__)

    def canonize(body: bytes) -> tuple[CanonicalForm, SymmetryGenerators]:
        # Runs on a worker thread; refuses rather than queues when saturated.
        if not slots.acquire(blocking=False):
            raise _Saturated()
        try:
            system = parse_system(body.decode("utf-8", errors="strict"))
            return canonical_form_of_system(system, deadline_s=cfg.deadline_s)
        finally:
            slots.release()

    async def read_and_canonize(request: Request):
        body = await request.body()
        if len(body) > cfg.max_body_bytes:
            return _error(413, f"body exceeds {cfg.max_body_bytes} bytes")
        try:
            form, gens = await run_in_threadpool(canonize, body)
        except ParseError as exc:
            return _error(400, exc.message, line=exc.line, column=exc.column)
        except UnicodeDecodeError:
            return _error(400, "body is not valid UTF-8")
        except CanonizationTimeout:
            return _error(504, f"canonization exceeded {cfg.deadline_s} s")
        except _Saturated:
            return _error(429, "all workers busy, retry later")
        return form, gens

    def authorized(request: Request) -> bool:
        if tokens is None:
            return True
        header = request.headers.get("authorization", "")
        return header.startswith("Bearer ") and header[len("Bearer ") :] in tokens

    @app.post("/v1/classify")
    async def classify(request: Request):
        outcome = await read_and_canonize(request)
        if isinstance(outcome, JSONResponse):
            return outcome
        form, gens = outcome
        record = store.lookup(form)
        return {
            "key": form.key,
            "known": record is not None,
            "counts": _counts_payload(form),
            "symmetry_generator_count": len(gens.generators),
            "variable_generators": [list(g) for g in gens.generators],
        }

    @app.post("/v1/systems")
    async def submit(request: Request, note: str = ""):
        if not authorized(request):
            return _error(401, "missing or invalid API token")
        body = await request.body()
        if len(body) > cfg.max_body_bytes:
            return _error(413, f"body exceeds {cfg.max_body_bytes} bytes")
        try:
            form, _gens = await run_in_threadpool(canonize, body)
            system = parse_system(body.decode("utf-8"))
            key, created = store.insert(form, system, note=note)
        except ParseError as exc:
            return _error(400, exc.message, line=exc.line, column=exc.column)
        except UnicodeDecodeError:
            return _error(400, "body is not valid UTF-8")
        except CanonizationTimeout:
            return _error(504, f"canonization exceeded {cfg.deadline_s} s")
        except _Saturated:
            return _error(429, "all workers busy, retry later")
        except OSError as exc:
            return _error(500, f"store failure: {exc}")
        return {"key": key, "created": created}

    @app.get("/v1/systems/{key}")
    def fetch(key: str, include: str = ""):
        if not _KEY_RE.fullmatch(key):
            return _error(400, "key must be 64 lowercase hex characters")
        record = store.get(key)
        if record is None:
            return _error(404, "unknown key")
        if include == "graph":
            return PlainTextResponse(
                store.graph_text(record),
                headers={
                    "Content-Disposition": f'attachment; filename="{key}.graph"'
                },
            )
        return {
            "key": record.key,
            "counts": {
                "n_node_variable": record.n_node_variable,
                "n_node_monomial": record.n_node_monomial,
                "n_node_equation": record.n_node_equation,
                "n_node_degree": record.n_node_degree,
                "n_degree": record.n_degree,
                "degrees": record.degrees,
            },
            "graph_length": record.graph_length,
            "graph_filename": record.graph_filename,
            "poly_filename": record.poly_filename,
            "note": record.note,
            "created_at": record.created_at,
        }

    @app.get("/v1/health")
    def health():
        status = "ok" if store.writable() else "degraded"
        return {
            "status": status,
            "store_records": store.stats().records,
            "version": f"{__version__}+{FORMAT_VERSION}",
        }

    return app


def serve(
    store: ClassStore,
    host: str,
    port: int,
    tokens: frozenset[str] | None = None,
    config: ServiceConfig | None = None,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(
        create_app(store, tokens=tokens, config=config),
        host=host,
        port=port,
        log_level="warning",
    )
