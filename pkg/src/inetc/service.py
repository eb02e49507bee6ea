"""HTTP session service: documents, per-redex steering, strategies, traces.

In-memory store, one lock and one revision counter per document.  Handlers
parse their own JSON so the error codes stay exactly as documented (400 on
a bad create body, 422 on bad op payloads).  Built for desk scale: one
writer per document, readers any time.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .dsl import parse_document, parse_strategy
from .errors import (
    DocumentError,
    InetError,
    ParseError,
    RedexStale,
    ResolveError,
    RuleMismatch,
    StepLimitExceeded,
    UnknownNode,
)
from .export import ep_from_obj, net_to_obj, trace_to_obj
from .net import validate_net
from .printer import print_document
from .strategy import DEFAULT_MAX_STEPS
from .trace import Document, apply_redex, explore, run_strategy

MAX_DOCUMENT_BYTES = 2 * 1024 * 1024


@dataclass
class Session:
    doc: Document
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


def _diag_obj(exc: Exception) -> dict:
    if isinstance(exc, ParseError):
        return {"line": exc.line, "col": exc.col, "code": "SyntaxError", "message": exc.message}
    if isinstance(exc, ResolveError):
        return {"line": exc.line, "col": exc.col, "code": exc.code, "message": exc.message}
    return {"line": 0, "col": 0, "code": type(exc).__name__, "message": str(exc)}


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def _diagnostics(status: int, diags: list[dict]) -> JSONResponse:
    return JSONResponse(status_code=status, content={"diagnostics": diags})


def create_app(persist_dir: Optional[str] = None,
               max_steps: int = DEFAULT_MAX_STEPS) -> FastAPI:
    app = FastAPI(title="inetc")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def persist(doc_id: str, session: Session) -> None:
        if persist_dir is None:
            return
        target = Path(persist_dir)
        target.mkdir(parents=True, exist_ok=True)
        (target / f"{doc_id}.inet").write_text(print_document(session.doc), encoding="utf-8")

    async def read_body(request: Request) -> Optional[dict]:
        try:
            body = await request.json()
        except Exception:
            return None
        return body if isinstance(body, dict) else None

    def get_session(doc_id: str) -> Optional[Session]:
        return sessions.get(doc_id)

    def stale(request: Request, session: Session) -> Optional[JSONResponse]:
        header = request.headers.get("if-match")
        if header is None:
            return None
        if header.strip().strip('"') != str(session.revision):
            return JSONResponse(
                status_code=409,
                content={"error": "StaleRevision", "revision": session.revision},
            )
        return None

    @app.post("/documents")
    async def create_document(request: Request):
        raw = await request.body()
        if len(raw) > MAX_DOCUMENT_BYTES:
            return _error(413, "TooLarge", f"document over {MAX_DOCUMENT_BYTES} bytes")
        body = await read_body(request)
        if body is None or not isinstance(body.get("text"), str):
            return _diagnostics(400, [
                {"line": 0, "col": 0, "code": "BadRequest",
                 "message": "body must be a JSON object with a text field"},
            ])
        try:
            doc = parse_document(body["text"])
        except (ParseError, ResolveError) as exc:
            return _diagnostics(400, [_diag_obj(exc)])
        except DocumentError as exc:
            return _diagnostics(400, [
                {"line": v.line, "col": v.col, "code": v.code, "message": v.message}
                for v in exc.violations
            ])
        doc_id = uuid.uuid4().hex
        sessions[doc_id] = Session(doc)
        persist(doc_id, sessions[doc_id])
        return {"docId": doc_id, "diagnostics": []}

    def node_id_of(raw: str) -> Optional[int]:
        try:
            return int(raw)
        except ValueError:
            return None

    @app.get("/documents/{d}/nodes/{n}")
    async def get_state(d: str, n: str):
        session = get_session(d)
        node = node_id_of(n)
        if session is None or node is None or node not in session.doc.trace.nodes:
            return _error(404, "NotFound", "no such document or node")
        net = session.doc.trace.nodes[node]
        redexes = []
        for redex in net.find_active_pairs():
            rule = session.doc.rules.for_pair(*redex.symbols)
            redexes.append({
                "edgeId": redex.edge,
                "agents": [redex.left_agent, redex.right_agent],
                "rule": rule.name if rule else None,
            })
        return {"net": net_to_obj(net), "redexes": redexes}

    @app.post("/documents/{d}/nodes/{n}/apply")
    async def apply_step(d: str, n: str, request: Request):
        session = get_session(d)
        node = node_id_of(n)
        if session is None or node is None:
            return _error(404, "NotFound", "no such document or node")
        body = await read_body(request)
        if body is None or not isinstance(body.get("edgeId"), int):
            return _error(422, "BadRequest", "body must carry an integer edgeId")
        with session.lock:
            conflict = stale(request, session)
            if conflict is not None:
                return conflict
            before = session.doc.trace.next_id
            try:
                child = apply_redex(session.doc, node, body["edgeId"])
            except UnknownNode:
                return _error(404, "NotFound", "no such node")
            except RedexStale as exc:
                return _error(409, "StaleRedex", str(exc))
            except RuleMismatch as exc:
                return _error(422, "NoRuleForPair", str(exc))
            if session.doc.trace.next_id != before:
                session.revision += 1
                persist(d, session)
            return {"childId": child, "revision": session.revision}

    @app.post("/documents/{d}/nodes/{n}/strategy")
    async def run_strategy_ep(d: str, n: str, request: Request):
        session = get_session(d)
        node = node_id_of(n)
        if session is None or node is None:
            return _error(404, "NotFound", "no such document or node")
        body = await read_body(request)
        if body is None or not isinstance(body.get("expr"), str):
            return _error(422, "BadRequest", "body must carry a strategy expr string")
        text = body["expr"]
        with session.lock:
            conflict = stale(request, session)
            if conflict is not None:
                return conflict
            try:
                spec = text if text in session.doc.strategies else parse_strategy(text)
                status, path = run_strategy(session.doc, node, spec, max_steps=max_steps)
            except UnknownNode:
                return _error(404, "NotFound", "no such node")
            except StepLimitExceeded as exc:
                return _error(409, "StepLimitExceeded", str(exc))
            except (ParseError, InetError) as exc:
                return JSONResponse(status_code=422, content={"diagnostics": [_diag_obj(exc)]})
            if path:
                session.revision += 1
                persist(d, session)
            return {"status": status, "path": path, "revision": session.revision}

    @app.post("/documents/{d}/nodes/{n}/explore")
    async def explore_ep(d: str, n: str, request: Request):
        session = get_session(d)
        node = node_id_of(n)
        if session is None or node is None:
            return _error(404, "NotFound", "no such document or node")
        with session.lock:
            conflict = stale(request, session)
            if conflict is not None:
                return conflict
            before = session.doc.trace.next_id
            try:
                children = explore(session.doc, node)
            except UnknownNode:
                return _error(404, "NotFound", "no such node")
            if session.doc.trace.next_id != before:
                session.revision += 1
                persist(d, session)
            return {"children": children}

    @app.get("/documents/{d}/trace")
    async def get_trace(d: str):
        session = get_session(d)
        if session is None:
            return _error(404, "NotFound", "no such document")
        return trace_to_obj(session.doc)

    @app.post("/documents/{d}/edit")
    async def edit_net(d: str, request: Request):
        session = get_session(d)
        if session is None:
            return _error(404, "NotFound", "no such document")
        body = await read_body(request)
        if body is None or not isinstance(body.get("ops"), list):
            return _error(422, "BadRequest", "body must carry an ops list")
        with session.lock:
            conflict = stale(request, session)
            if conflict is not None:
                return conflict
            doc = session.doc
            if len(doc.trace.nodes) > 1:
                return _error(409, "TraceNotPristine", "edit requires an unexplored trace")
            draft = doc.m0.copy()
            try:
                _apply_ops(draft, body["ops"])
            except (InetError, _OpError) as exc:
                return _diagnostics(422, [_diag_obj(exc)])
            report = validate_net(draft)
            if not report.ok:
                return _diagnostics(422, [
                    {"line": v.line, "col": v.col, "code": v.code, "message": v.message}
                    for v in report.violations
                ])
            doc.m0 = draft
            doc.trace.nodes[doc.trace.root] = draft.copy()
            session.revision += 1
            persist(d, session)
            return {"revision": session.revision, "diagnostics": []}

    return app


class _OpError(Exception):
    pass


def _apply_ops(net, ops: list) -> None:
    for i, op in enumerate(ops):
        if not isinstance(op, dict) or "op" not in op:
            raise _OpError(f"op {i}: not an operation object")
        kind = op["op"]
        try:
            if kind == "addAgent":
                net.add_agent(op["symbol"])
            elif kind == "deleteAgent":
                net.delete_agent(int(op["agent"]))
            elif kind == "connect":
                net.connect(ep_from_obj(op["a"]), ep_from_obj(op["b"]))
            elif kind == "disconnect":
                ref = ep_from_obj(op["at"])
                eid = net.edge_at(ref)
                if eid is None:
                    raise _OpError(f"op {i}: {ref} is not connected")
                net.disconnect(eid)
            elif kind == "addFree":
                net.declare_free(op["name"])
            elif kind == "nameSelection":
                net.select(op["name"], {int(a) for a in op["agents"]})
            else:
                raise _OpError(f"op {i}: unknown op {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise _OpError(f"op {i}: malformed payload: {exc}") from None
