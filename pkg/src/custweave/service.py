"""HTTP session service: models, guidance, and per-tenant operation streams.

Models are immutable once loaded; each session owns one customization and a
lock, so operations on a session apply in a single total order while
distinct sessions proceed in parallel. Invalid operations are domain results
(200 plus verdict), not transport errors. All JSON responses are canonical
bytes, so two identical op streams produce byte-identical response bodies.
"""

from __future__ import annotations

import json
import secrets
import socket
import sys
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from starlette.concurrency import run_in_threadpool

from .engine import Session
from .errors import (
    CustomizationInvalid,
    CustweaveError,
    ModelInvalid,
    ParseError,
    RevisionMismatch,
    SchemaError,
    UnknownConcern,
    UnknownElement,
)
from .model import AppModel, concern_guidance
from .model_io import (
    canonical_json,
    load_customization,
    load_model,
    save_customization,
    save_model,
)

DEFAULT_LISTEN = "127.0.0.1:8080"
DEFAULT_MAX_SESSIONS = 10000

_OP_FIELDS = {"op", "component", "concern", "revision"}


@dataclass
class SessionRecord:
    session: Session
    model_id: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)


class ServiceState:
    def __init__(self, snapshot_dir: Optional[str] = None,
                 max_sessions: int = DEFAULT_MAX_SESSIONS):
        self.models: dict[str, tuple[AppModel, bytes]] = {}
        self.sessions: dict[str, SessionRecord] = {}
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        self.max_sessions = max_sessions
        self.lock = threading.Lock()
        if self.snapshot_dir:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)

    def snapshot(self, record: SessionRecord, op: dict, decision):
        if not self.snapshot_dir:
            return
        line = json.dumps({
            "session": record.session.id,
            "state_version": decision.state_version,
            "op": op,
            "decision": decision.to_dict(),
            "state": json.loads(save_customization(record.session.customization)),
        }, sort_keys=True)
        path = self.snapshot_dir / f"{record.session.id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _reply(status: int, payload) -> Response:
    return Response(content=canonical_json(payload),
                    media_type="application/json", status_code=status)


def _error(status: int, code: str, message: str) -> Response:
    return _reply(status, {"error": code, "message": message})


def create_app(snapshot_dir: Optional[str] = None,
               max_sessions: int = DEFAULT_MAX_SESSIONS) -> FastAPI:
    app = FastAPI(title="custweave", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = ServiceState(snapshot_dir, max_sessions)
    app.state.service = state

    @app.post("/v1/models")
    async def post_model(request: Request) -> Response:
        return await run_in_threadpool(_post_model, state, await request.body())

    @app.get("/v1/models/{model_id}")
    async def get_model(model_id: str) -> Response:
        return await run_in_threadpool(_get_model, state, model_id)

    @app.post("/v1/models/{model_id}/sessions")
    async def post_session(model_id: str, request: Request) -> Response:
        return await run_in_threadpool(_post_session, state, model_id,
                                       await request.body())

    @app.post("/v1/sessions/{session_id}/ops")
    async def post_op(session_id: str, request: Request) -> Response:
        return await run_in_threadpool(_post_op, state, session_id,
                                       await request.body())

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str) -> Response:
        return await run_in_threadpool(_get_session, state, session_id)

    @app.get("/v1/models/{model_id}/concerns/{concern_id}/paths")
    async def get_paths(model_id: str, concern_id: str,
                        target: Optional[str] = None) -> Response:
        return await run_in_threadpool(_get_paths, state, model_id, concern_id, target)

    return app


def _post_model(state: ServiceState, body: bytes) -> Response:
    try:
        model = load_model(body)
    except (ParseError, SchemaError) as exc:
        return _error(400, exc.code, str(exc))
    except ModelInvalid as exc:
        return _reply(422, {
            "error": exc.code,
            "violations": [
                {"code": v.code, "location": v.location, "message": v.message}
                for v in exc.report.violations
            ],
        })
    with state.lock:
        if model.id in state.models:
            return _error(409, "DuplicateModel", f"model {model.id} already loaded")
        state.models[model.id] = (model, save_model(model))
    concerns = sum(len(d.concerns) for d in model.dimensions)
    return _reply(201, {
        "id": model.id,
        "revision": model.revision,
        "components": len(model.components),
        "concerns": concerns,
    })


def _get_model(state: ServiceState, model_id: str) -> Response:
    with state.lock:
        entry = state.models.get(model_id)
    if entry is None:
        return _error(404, "UnknownModel", model_id)
    return Response(content=entry[1], media_type="application/json")


def _post_session(state: ServiceState, model_id: str, body: bytes) -> Response:
    with state.lock:
        entry = state.models.get(model_id)
    if entry is None:
        return _error(404, "UnknownModel", model_id)
    model = entry[0]

    customization = None
    tenant = "default"
    if body.strip():
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, "ParseError", exc.msg)
        if not isinstance(doc, dict):
            return _error(400, "SchemaError", "body must be an object")
        if "concerns" in doc or "format_version" in doc:
            try:
                customization = load_customization(body, model)
            except (ParseError, SchemaError) as exc:
                return _error(400, exc.code, str(exc))
            except RevisionMismatch as exc:
                return _error(409, exc.code, str(exc))
            except CustomizationInvalid as exc:
                return _reply(422, {"error": exc.code, "violations": exc.violations})
        elif set(doc) <= {"tenant"}:
            tenant = doc.get("tenant", "default")
            if not isinstance(tenant, str) or not tenant:
                return _error(400, "SchemaError", "tenant must be a non-empty string")
        else:
            return _error(400, "SchemaError", f"unexpected fields {sorted(doc)}")

    with state.lock:
        if len(state.sessions) >= state.max_sessions:
            return _error(429, "TooManySessions", f"limit {state.max_sessions} reached")
        session_id = secrets.token_urlsafe(12)
        session = Session(session_id, model, customization)
        if customization is None:
            session.customization.tenant = tenant
        record = SessionRecord(session, model_id)
        state.sessions[session_id] = record
    return _reply(201, {
        "id": session_id,
        "model": model_id,
        "revision": model.revision,
        "state_version": session.state_version,
        "tenant": session.customization.tenant,
    })


def _post_op(state: ServiceState, session_id: str, body: bytes) -> Response:
    with state.lock:
        record = state.sessions.get(session_id)
    if record is None:
        return _error(404, "UnknownSession", session_id)
    try:
        op = json.loads(body)
    except json.JSONDecodeError as exc:
        return _error(400, "ParseError", exc.msg)
    if (
        not isinstance(op, dict)
        or op.get("op") not in ("add", "delete")
        or not isinstance(op.get("component"), str)
        or not op["component"]
        or not set(op) <= _OP_FIELDS
        or (op["op"] == "add" and not op.get("concern"))
    ):
        return _error(400, "MalformedOperation", "expected "
                      '{"op": "add"|"delete", "component": str, "concern": str?}')
    with record.lock:
        try:
            decision = record.session.apply(op)
        except RevisionMismatch as exc:
            return _error(409, exc.code, str(exc))
        record.updated_at = time.time()
        if decision.valid:
            state.snapshot(record, op, decision)
    return _reply(200, decision.to_dict())


def _get_session(state: ServiceState, session_id: str) -> Response:
    with state.lock:
        record = state.sessions.get(session_id)
    if record is None:
        return _error(404, "UnknownSession", session_id)
    with record.lock:
        body = save_customization(record.session.customization)
    return Response(content=body, media_type="application/json")


def _get_paths(state: ServiceState, model_id: str, concern_id: str,
               target: Optional[str]) -> Response:
    with state.lock:
        entry = state.models.get(model_id)
    if entry is None:
        return _error(404, "UnknownModel", model_id)
    try:
        entries = concern_guidance(entry[0], concern_id, target)
    except (UnknownConcern, UnknownElement) as exc:
        return _error(404, exc.code, str(exc))
    return _reply(200, [g.to_dict() for g in entries])


class ServiceThread:
    """Run the app under uvicorn in a background thread (tests and bench)."""

    def __init__(self, app: Optional[FastAPI] = None, host: str = "127.0.0.1",
                 port: int = 0):
        import uvicorn

        self.app = app or create_app()
        config = uvicorn.Config(self.app, host=host, port=port, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.base_url = ""

    def __enter__(self) -> "ServiceThread":
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline or not self.thread.is_alive():
                raise RuntimeError("service failed to start")
            time.sleep(0.01)
        sock = self.server.servers[0].sockets[0]
        host, port = sock.getsockname()[:2]
        self.base_url = f"http://{host}:{port}"
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


def serve(listen: str = DEFAULT_LISTEN, snapshot_dir: Optional[str] = None,
          max_sessions: int = DEFAULT_MAX_SESSIONS) -> int:
    """Run the service in the foreground; returns a process exit code."""
    import uvicorn

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"invalid listen address {listen!r}, expected host:port", file=sys.stderr)
        return 1
    port = int(port_text)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"cannot listen on {listen}: {exc}", file=sys.stderr)
        return 1
    finally:
        probe.close()
    app = create_app(snapshot_dir=snapshot_dir, max_sessions=max_sessions)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0
