"""Local JSON gateway exposing the live engine over HTTP.

Endpoints (all JSON unless noted; every response carries a monotonically
increasing `version`):

    POST /query        {"session": str, "terms": [str, ...]}
                       -> {"version", "token", "terms": [ids],
                           "results": [{"rank", "object", "provenance",
                                        "riv"}]}
    POST /click        {"session": str, "token": str, "object": int}
                       -> {"version", "total", "promoted":
                           [{"term_id", "term", "object"}]}
                       409 when the token is not the session's latest
                       presentation (stale; nothing is mutated).
    GET  /metrics      -> {"version", "generator_size", "pool_size",
                           "total_riv", "links", "objects",
                           "top_objects": {term: [{"object", "riv"}]},
                           "p"?}   (p only when a truth graph is loaded)
    POST /deconstruct  {"object": int, "term"?: str} -> {"version", "removed"}
    GET  /snapshot     -> text/plain store snapshot (the persistence format)

Human-entered term strings are mapped to term ids through a dictionary that
can be persisted next to the snapshot, so terms stay stable across restarts.
Mutations are applied strictly one at a time under a lock, and every applied
mutation is appended to an in-memory log that can be replayed sequentially
to reproduce the exact store state (used by the concurrency stress test).

On the first occurrence of a term the gateway links a uniform random sample
of objects to it at r_init, so a fresh term is immediately searchable and
its list mixes exploit and explore entries.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .engine import EngineConfig, Feedback, Query, apply_feedback, select_action
from .selection import MQList
from .store import IndexClass, IndexStore
from .usersim import GroundTruth

__all__ = ["TermDictionary", "SearchGateway", "GatewayError", "serve", "make_server"]

log = logging.getLogger(__name__)


class GatewayError(Exception):
    """Request-level failure with an HTTP status."""

    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.message = message


class TermDictionary:
    """Stable mapping from term strings to dense term ids."""

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self._ids: dict[str, int] = {}
        if self.path is not None and self.path.exists():
            self._ids = {
                str(k): int(v)
                for k, v in json.loads(self.path.read_text(encoding="utf-8")).items()
            }

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def lookup(self, term: str) -> int | None:
        return self._ids.get(term)

    def intern(self, term: str) -> tuple[int, bool]:
        """Return (id, created) for the term, assigning the next free id."""
        existing = self._ids.get(term)
        if existing is not None:
            return existing, False
        new_id = len(self._ids)
        self._ids[term] = new_id
        if self.path is not None:
            self.path.write_text(json.dumps(self._ids, sort_keys=True), encoding="utf-8")
        return new_id, True

    def strings(self) -> dict[str, int]:
        return dict(self._ids)


@dataclass
class _Session:
    token: str | None = None
    query: Query | None = None
    presented: MQList | None = None


@dataclass
class _LogEntry:
    """One applied mutation, sufficient for sequential replay."""

    kind: str  # "init_term" | "click" | "deconstruct"
    terms: tuple[int, ...] = ()
    objects: tuple[int, ...] = ()
    exploit: tuple[bool, ...] = ()
    clicked: int | None = None
    term: int | None = None


class SearchGateway:
    """Engine state plus the session/version bookkeeping behind the HTTP API."""

    def __init__(
        self,
        store: IndexStore | None = None,
        cfg: EngineConfig | None = None,
        rng: np.random.Generator | None = None,
        truth: GroundTruth | None = None,
        object_universe: int = 0,
        term_dict: TermDictionary | None = None,
        init_links: int | None = None,
    ) -> None:
        self.store = store if store is not None else IndexStore()
        self.cfg = cfg if cfg is not None else EngineConfig()
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.truth = truth
        self.terms = term_dict if term_dict is not None else TermDictionary()
        self.init_links = init_links if init_links is not None else self.cfg.m
        # ids the gateway may link new terms to, even before they carry links
        universe = set(self.store.objects_sorted())
        universe.update(range(object_universe))
        self.object_universe: list[int] = sorted(universe)
        self.version = 0
        self.lock = threading.Lock()
        self.sessions: dict[str, _Session] = {}
        self.mutation_log: list[_LogEntry] = []
        self._token_counter = 0

    # ------------------------------------------------------------------

    def _bump(self) -> int:
        self.version += 1
        return self.version

    def _init_new_term(self, term_id: int) -> None:
        pool = [o for o in self.object_universe]
        if not pool or self.init_links <= 0:
            return
        n = min(self.init_links, len(pool))
        picks = self.rng.choice(len(pool), size=n, replace=False)
        objects = tuple(int(pool[int(i)]) for i in picks)
        for obj in objects:
            self.store.init_minimal_index(obj, (term_id,))
        self.mutation_log.append(
            _LogEntry(kind="init_term", terms=(term_id,), objects=objects)
        )

    def handle_query(self, session_id: str, term_strings: list[str]) -> dict:
        if not term_strings or not all(
            isinstance(t, str) and t.strip() for t in term_strings
        ):
            raise GatewayError(400, "terms must be a non-empty list of non-empty strings")
        cleaned = [t.strip() for t in term_strings]
        if len(set(cleaned)) != len(cleaned):
            raise GatewayError(400, "terms must be distinct")
        with self.lock:
            ids = []
            for t in cleaned:
                term_id, created = self.terms.intern(t)
                ids.append(term_id)
                if created:
                    self._init_new_term(term_id)
            query = Query(tuple(ids))
            presented = select_action(self.store, query, self.cfg, self.rng)
            session = self.sessions.setdefault(session_id, _Session())
            self._token_counter += 1
            token = f"p{self._token_counter}"
            session.token = token
            session.query = query
            session.presented = presented
            version = self._bump()
            results = [
                {
                    "rank": rank,
                    "object": obj,
                    "provenance": "exploit" if exploit else "explore",
                    "riv": self.store.cumulative_riv(query.terms, obj),
                }
                for rank, obj, exploit in presented
            ]
            return {
                "version": version,
                "token": token,
                "terms": ids,
                "results": results,
            }

    def handle_click(self, session_id: str, token: str, obj) -> dict:
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise GatewayError(400, "object must be an integer id")
        with self.lock:
            session = self.sessions.get(session_id)
            if session is None or session.presented is None:
                raise GatewayError(409, "session has no active presentation")
            if token != session.token:
                raise GatewayError(
                    409, "stale presentation token; re-query before clicking"
                )
            assert session.query is not None
            try:
                signal = apply_feedback(
                    self.store,
                    session.query,
                    session.presented,
                    Feedback((obj,)),
                    self.cfg,
                )
            except ValueError as exc:
                raise GatewayError(400, str(exc))
            self.mutation_log.append(
                _LogEntry(
                    kind="click",
                    terms=session.query.terms,
                    objects=tuple(session.presented.objects),
                    exploit=tuple(session.presented.exploit),
                    clicked=obj,
                )
            )
            id_to_term = {v: k for k, v in self.terms.strings().items()}
            promoted = [
                {"term_id": t, "term": id_to_term.get(t, str(t)), "object": o}
                for t, o in signal.promoted
            ]
            return {
                "version": self._bump(),
                "total": signal.total,
                "promoted": promoted,
            }

    def handle_metrics(self) -> dict:
        with self.lock:
            top: dict[str, list[dict]] = {}
            for term, term_id in sorted(self.terms.strings().items()):
                ranked = self.store.top_objects(term_id, 5)
                if ranked:
                    top[term] = [{"object": o, "riv": r} for o, r in ranked]
            payload = {
                "version": self.version,
                "generator_size": self.store.unexplored_count,
                "pool_size": self.store.explored_count,
                "total_riv": self.store.total_riv,
                "links": self.store.link_count,
                "objects": self.store.object_count,
                "top_objects": top,
            }
            if self.truth is not None:
                promoted = sum(
                    1
                    for t, o in self.truth.pairs
                    if self.store.classify(t, o) is IndexClass.EXPLORED
                )
                payload["p"] = promoted / self.truth.size
            return payload

    def handle_deconstruct(self, obj, term_string: str | None = None) -> dict:
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise GatewayError(400, "object must be an integer id")
        with self.lock:
            if term_string is not None:
                term_id = self.terms.lookup(term_string)
                removed = (
                    self.store.deconstruct(obj, term_id) if term_id is not None else 0
                )
                logged_term = term_id
            else:
                removed = self.store.deconstruct(obj)
                logged_term = None
            self.mutation_log.append(
                _LogEntry(kind="deconstruct", objects=(obj,), term=logged_term)
            )
            return {"version": self._bump(), "removed": removed}

    def snapshot_text(self) -> str:
        with self.lock:
            return self.store.to_text()

    # ------------------------------------------------------------------

    def replay_log(self) -> IndexStore:
        """Apply the mutation log sequentially to a fresh store.

        The result must match the live store exactly; this is the inverse
        check used by the concurrency stress test.
        """
        with self.lock:
            entries = list(self.mutation_log)
            threshold = self.store.threshold
            base = self.store.relevance_base
            r_init = self.store.r_init
        fresh = IndexStore(threshold, base, r_init)
        for entry in entries:
            if entry.kind == "init_term":
                for obj in entry.objects:
                    fresh.init_minimal_index(obj, entry.terms)
            elif entry.kind == "click":
                presented = MQList(list(entry.objects), list(entry.exploit))
                assert entry.clicked is not None
                apply_feedback(
                    fresh,
                    Query(entry.terms),
                    presented,
                    Feedback((entry.clicked,)),
                    self.cfg,
                )
            elif entry.kind == "deconstruct":
                fresh.deconstruct(entry.objects[0], entry.term)
        return fresh


class _Handler(BaseHTTPRequestHandler):
    gateway: SearchGateway  # set by make_server
    ui_dir: Path | None = None

    def log_message(self, fmt, *args):  # silence default stderr chatter
        log.debug("gateway: " + fmt, *args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise GatewayError(400, "request body must be JSON")
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError:
            raise GatewayError(400, "request body is not valid JSON")
        if not isinstance(payload, dict):
            raise GatewayError(400, "request body must be a JSON object")
        return payload

    def do_OPTIONS(self):  # CORS preflight for browser clients
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        try:
            if self.path == "/metrics":
                self._send_json(200, self.gateway.handle_metrics())
            elif self.path == "/snapshot":
                body = self.gateway.snapshot_text().encode("ascii")
                self.send_response(200)
                self.send_header("Content-Type", "text/plain")
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(body)
            elif self.path in ("/", "/index.html") and self.ui_dir is not None:
                index = self.ui_dir / "index.html"
                if not index.exists():
                    self._send_json(404, {"error": "console not built"})
                    return
                body = index.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", "text/html")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            elif self.ui_dir is not None and self.path.startswith("/dist/"):
                target = (self.ui_dir / self.path.lstrip("/")).resolve()
                if self.ui_dir.resolve() not in target.parents or not target.is_file():
                    self._send_json(404, {"error": "not found"})
                    return
                body = target.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", "text/javascript")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            else:
                self._send_json(404, {"error": f"no such path {self.path}"})
        except GatewayError as exc:
            self._send_json(exc.status, {"error": exc.message})

    def do_POST(self):
        try:
            payload = self._read_json()
            if self.path == "/query":
                session = payload.get("session")
                terms = payload.get("terms")
                if not isinstance(session, str) or not session:
                    raise GatewayError(400, "session must be a non-empty string")
                if not isinstance(terms, list):
                    raise GatewayError(400, "terms must be a list of strings")
                self._send_json(200, self.gateway.handle_query(session, terms))
            elif self.path == "/click":
                session = payload.get("session")
                token = payload.get("token")
                if not isinstance(session, str) or not isinstance(token, str):
                    raise GatewayError(400, "session and token must be strings")
                self._send_json(
                    200,
                    self.gateway.handle_click(session, token, payload.get("object")),
                )
            elif self.path == "/deconstruct":
                term = payload.get("term")
                if term is not None and not isinstance(term, str):
                    raise GatewayError(400, "term must be a string when given")
                self._send_json(
                    200,
                    self.gateway.handle_deconstruct(payload.get("object"), term),
                )
            else:
                self._send_json(404, {"error": f"no such path {self.path}"})
        except GatewayError as exc:
            self._send_json(exc.status, {"error": exc.message})
        except Exception as exc:  # defensive: never leave a request hanging
            log.exception("gateway request failed")
            self._send_json(500, {"error": f"internal error: {exc}"})


def make_server(
    gateway: SearchGateway, port: int = 0, ui_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    """Bind a threading HTTP server for the gateway (port 0 picks a free one)."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {"gateway": gateway, "ui_dir": Path(ui_dir) if ui_dir else None},
    )
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(
    gateway: SearchGateway, port: int, ui_dir: str | Path | None = None
) -> None:
    """Blocking serve loop (Ctrl-C to stop)."""
    server = make_server(gateway, port, ui_dir)
    host, bound_port = server.server_address[:2]
    print(f"gateway listening on http://{host}:{bound_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
