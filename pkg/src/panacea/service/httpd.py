"""HTTP API over the engine and job queue (stdlib threading server).

Endpoints (JSON bodies, UTF-8):
  GET  /api/health
  GET  /api/autocomplete?q=<text>&limit=<n>
  POST /api/factcheck   {"claim": ...}      -> {"job_id", "state"}
  GET  /api/factcheck/<job_id>
  POST /api/rumour      {"claim": ...}      -> {"job_id", "state"}
  GET  /api/rumour/<job_id>
  GET  /api/claims/<claim_id>
  GET  /api/trees/<tree_id>
  POST /api/admin/ingest {"kind", "path"}   (X-Admin-Token header required)
Static UI files are served under /ui when a bundle directory is configured.
Client identity is the requester address unless X-Client-Id is present.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from ..errors import EmptyClaim, MalformedRecord, PanaceaError, QueueFull, UnknownJob
from .config import ServiceConfig
from .engine import PanaceaEngine, build_engine, build_indexes
from .jobs import JobKind, JobService

logger = logging.getLogger(__name__)

KIND_BY_PATH = {"factcheck": JobKind.FACT_CHECK, "rumour": JobKind.RUMOUR}


class PanaceaServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, engine: PanaceaEngine, service: JobService,
                 config: ServiceConfig):
        super().__init__(address, ApiHandler)
        self.engine = engine
        self.service = service
        self.config = config


class ApiHandler(BaseHTTPRequestHandler):
    server: PanaceaServer

    # --- plumbing -----------------------------------------------------------

    def log_message(self, fmt, *args):  # route through logging, not stderr
        logger.debug("%s " + fmt, self.address_string(), *args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def _client_id(self) -> str:
        return self.headers.get("X-Client-Id") or self.client_address[0]

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise ValueError("empty request body")
        return json.loads(raw)

    # --- routing ------------------------------------------------------------

    def do_GET(self):
        parsed = urlparse(self.path)
        parts = [p for p in parsed.path.split("/") if p]
        try:
            if parts == ["api", "health"]:
                self._send_json(200, {"status": "ok"})
            elif parts == ["api", "autocomplete"]:
                self._get_autocomplete(parse_qs(parsed.query))
            elif len(parts) == 3 and parts[0] == "api" and parts[1] in KIND_BY_PATH:
                self._get_job(parts[1], parts[2])
            elif len(parts) == 3 and parts[:2] == ["api", "claims"]:
                self._get_claim(parts[2])
            elif len(parts) == 3 and parts[:2] == ["api", "trees"]:
                self._get_tree(parts[2])
            elif parts and parts[0] == "ui" or parsed.path == "/":
                self._get_static(parts[1:] if parts else [])
            else:
                self._error(404, "unknown resource")
        except Exception as exc:
            logger.exception("GET %s failed", self.path)
            self._error(500, str(exc))

    def do_POST(self):
        parsed = urlparse(self.path)
        parts = [p for p in parsed.path.split("/") if p]
        try:
            if len(parts) == 2 and parts[0] == "api" and parts[1] in KIND_BY_PATH:
                self._post_job(KIND_BY_PATH[parts[1]])
            elif parts == ["api", "admin", "ingest"]:
                self._post_ingest()
            else:
                self._error(404, "unknown resource")
        except Exception as exc:
            logger.exception("POST %s failed", self.path)
            self._error(500, str(exc))

    # --- handlers -----------------------------------------------------------

    def _get_autocomplete(self, query: dict) -> None:
        text = (query.get("q") or [""])[0]
        try:
            limit = int((query.get("limit") or ["10"])[0])
        except ValueError:
            self._error(400, "limit must be an integer")
            return
        suggestions = self.server.engine.autocomplete(text, limit=limit)
        self._send_json(200, {"query": text, "suggestions": suggestions})

    def _post_job(self, kind: JobKind) -> None:
        try:
            body = self._read_body()
        except (ValueError, json.JSONDecodeError) as exc:
            self._error(400, f"malformed request body: {exc}")
            return
        claim = body.get("claim", "")
        if not isinstance(claim, str):
            self._error(400, "claim must be a string")
            return
        try:
            job = self.server.service.submit(self._client_id(), kind, claim)
        except EmptyClaim:
            self._error(400, "claim text is empty")
            return
        except QueueFull:
            self._error(503, "queue full, retry later")
            return
        self._send_json(200, {"job_id": job.job_id, "state": job.state.value})

    def _get_job(self, kind_path: str, job_id: str) -> None:
        try:
            job = self.server.service.job_status(job_id)
        except UnknownJob:
            self._error(404, f"unknown job {job_id}")
            return
        if job.kind is not KIND_BY_PATH[kind_path]:
            self._error(404, f"job {job_id} is not a {kind_path} job")
            return
        doc = job.to_json()
        position = self.server.service.queue_position(job_id)
        if position is not None:
            doc["queue_position"] = position
        self._send_json(200, doc)

    def _get_claim(self, claim_id: str) -> None:
        claim = self.server.engine.store.claims.get(claim_id)
        if claim is None:
            self._error(404, f"unknown claim {claim_id}")
            return
        self._send_json(200, {"claim_id": claim.claim_id, "text": claim.text,
                              "label": claim.label.value, "source": claim.source,
                              "subtype": claim.subtype})

    def _get_tree(self, tree_id: str) -> None:
        if tree_id not in self.server.engine.store.trees:
            self._error(404, f"unknown tree {tree_id}")
            return
        self._send_json(200, self.server.engine.store.tree_export(tree_id))

    def _post_ingest(self) -> None:
        token = self.headers.get("X-Admin-Token", "")
        if token != self.server.config.admin_token:
            self._error(403, "admin token required")
            return
        try:
            body = self._read_body()
            kind = body["kind"]
            path = body["path"]
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            self._error(400, f"malformed request body: {exc}")
            return
        store = self.server.engine.store
        try:
            if kind == "docs":
                docs, paras = store.ingest_documents(path)
                counts = {"documents": docs, "paragraphs": paras}
            elif kind == "claims":
                counts = {"claims": store.ingest_claims(path)}
            elif kind == "trees":
                accepted, rejected = store.ingest_trees(path)
                counts = {"accepted": accepted, "rejected": rejected}
            else:
                self._error(400, f"unknown ingest kind {kind!r}")
                return
        except FileNotFoundError:
            self._error(400, f"no such file: {path}")
            return
        except (MalformedRecord, PanaceaError) as exc:
            self._error(400, str(exc))
            return
        # refresh the indexes so new data is searchable
        para_index, tree_index = build_indexes(store, persist=True)
        self.server.engine.paragraph_index = para_index
        self.server.engine.tree_index = tree_index
        self._send_json(200, counts)

    def _get_static(self, parts: list[str]) -> None:
        ui_dir = self.server.config.ui_dir
        if not ui_dir:
            self._error(404, "no ui bundle configured")
            return
        root = Path(ui_dir).resolve()
        target = (root / Path(*parts)) if parts else root / "index.html"
        target = target.resolve()
        if root not in target.parents and target != root:
            self._error(404, "not found")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.exists():
            self._error(404, "not found")
            return
        content = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(content)))
        self.end_headers()
        self.wfile.write(content)


def create_server(config: ServiceConfig, engine: PanaceaEngine | None = None
                  ) -> PanaceaServer:
    """Bind the API server (port 0 picks a free port); workers are started."""
    engine = engine or build_engine(config)
    service = JobService(engine, slots=config.slots, ttl_seconds=config.ttl_seconds,
                         queue_bound=config.queue_bound, data_dir=config.data_dir)
    server = PanaceaServer((config.host, config.port), engine, service, config)
    service.start()
    return server


def api_serve(config: ServiceConfig) -> None:
    """Blocking entry point used by the CLI serve command."""
    server = create_server(config)
    logger.info("serving on %s:%d", *server.server_address)
    try:
        server.serve_forever()
    finally:
        server.service.stop()
        server.server_close()


def serve_in_thread(config: ServiceConfig, engine: PanaceaEngine | None = None
                    ) -> tuple[PanaceaServer, threading.Thread]:
    """Test helper: server on a background thread, caller owns shutdown."""
    server = create_server(config, engine)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
