"""HTTP JSON API over an immutable index snapshot.

All endpoints are GET with query parameters; responses are UTF-8 JSON with
stable key order and fixed boundary rounding (rates 1 decimal, sentiment 2,
shares 3), so an unchanged snapshot plus the stub backend reproduces bodies
byte-for-byte. The index is loaded once and never mutated; generation
results are cached on disk.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import signal
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .config import AppConfig
from .curation import read_curated, curated_to_record
from .index import InvertedIndex, QueryError, compare, term_stats
from .paper_edition import assemble, render
from .rag import (
    BackendError,
    GenerationCache,
    GenerationRequest,
    InsufficientDataError,
    PromptTemplates,
    cached_generate,
    sample_matches,
)
from .scatter import ClusterParams, ScatterError, build_scatter

log = logging.getLogger("bd.http")


class BindError(OSError):
    """The configured address cannot be bound."""


def _round_opt(value: float | None, digits: int) -> float | None:
    return None if value is None else round(value, digits)


class ApiError(Exception):
    def __init__(self, status: int, message: str, code: str):
        super().__init__(message)
        self.status = status
        self.message = message
        self.code = code


class App:
    """Shared request-handling state: index, cache, backend, config."""

    def __init__(
        self,
        config: AppConfig,
        index: InvertedIndex,
        cache: GenerationCache,
        backend,
        templates: PromptTemplates,
    ):
        self.config = config
        self.index = index
        self.cache = cache
        self.backend = backend
        self.templates = templates
        self.names = config.display_names()
        self._paper_html: bytes | None = None
        self._paper_lock = threading.Lock()

    # -- helpers -----------------------------------------------------------

    def slot_label(self, slot: int) -> str:
        return self.index.labels[slot - 1]

    def _require_term(self, params: dict) -> str:
        term = params.get("term", [""])[0].strip()
        if not term:
            raise ApiError(400, "empty query", "empty_query")
        return term

    def _require_community(self, params: dict) -> int:
        raw = params.get("community", [""])[0]
        if raw not in ("1", "2"):
            raise ApiError(400, "community must be 1 or 2", "bad_parameter")
        return int(raw)

    def _seed(self, params: dict) -> int:
        raw = params.get("seed", [None])[0]
        if raw is None:
            return self.config.rag.seed
        try:
            return int(raw)
        except ValueError:
            raise ApiError(400, "seed must be an integer", "bad_parameter") from None

    def _sample(self, term: str, slot: int, seed: int):
        label = self.slot_label(slot)
        try:
            return sample_matches(self.index, term, label, self.config.rag.cap, seed)
        except QueryError as exc:
            raise ApiError(400, str(exc), "empty_query") from exc

    def _generate(self, request: GenerationRequest):
        try:
            return cached_generate(
                self.cache,
                self.backend,
                request,
                self.templates,
                char_budget=self.config.rag.prompt_char_budget,
                sample_char_limit=self.config.rag.sample_char_limit,
                max_output_chars=self.config.rag.max_output_chars,
            )
        except InsufficientDataError as exc:
            raise ApiError(422, str(exc), "insufficient_data") from exc
        except BackendError as exc:
            raise ApiError(502, f"generation backend failed: {exc}", "backend_failure") from exc

    # -- endpoints ---------------------------------------------------------

    def handle_health(self, params: dict) -> dict:
        labels = self.index.labels
        return {
            "status": "ok",
            "docs": {label: self.index.totals[label] for label in labels},
            "terms": self.index.term_count(),
            "communities": [
                {"slot": i + 1, "label": label, "name": name}
                for i, (label, name) in enumerate(zip(labels, self.names))
            ],
        }

    def handle_stats(self, params: dict) -> dict:
        term = self._require_term(params)
        try:
            stats = term_stats(self.index, term)
        except QueryError as exc:
            raise ApiError(400, str(exc), "empty_query") from exc
        labels = self.index.labels
        view = compare(stats, labels)
        slot_of = {label: i + 1 for i, label in enumerate(labels)}

        def winner(value: str | None):
            if value is None:
                return None
            return "tie" if value == "tie" else slot_of[value]

        return {
            "term": stats.term,
            "communities": list(self.names),
            "doc_count": [stats.doc_count[l] for l in labels],
            "rate_per_k": [round(stats.rate_per_k[l], 1) for l in labels],
            "share": (
                [round(stats.share[l], 3) for l in labels] if stats.share else None
            ),
            "sentiment_mean": [_round_opt(stats.sentiment_mean[l], 2) for l in labels],
            "comparative": {
                "higher_rate": winner(view.higher_rate),
                "rate_delta": round(view.rate_delta, 1),
                "higher_sentiment": winner(view.higher_sentiment),
                "sentiment_delta": _round_opt(view.sentiment_delta, 2),
            },
        }

    def _generation_body(self, kind: str, params: dict) -> dict:
        term = self._require_term(params)
        slot = self._require_community(params)
        seed = self._seed(params)
        sample_set = self._sample(term, slot, seed)
        result = self._generate(
            GenerationRequest(
                kind=kind,
                term=sample_set.term,
                samples=(sample_set,),
                model_id=self.config.rag.model_id,
                seed=seed,
            )
        )
        return {
            "term": sample_set.term,
            "kind": kind,
            "community": slot,
            "name": self.names[slot - 1],
            "seed": seed,
            "text": result.output,
            "provenance": list(result.provenance[0]),
            "model_id": self.config.rag.model_id,
            "backend": result.backend_id,
            "truncated": result.truncated,
        }

    def handle_summary(self, params: dict) -> dict:
        return self._generation_body("summary", params)

    def handle_definition(self, params: dict) -> dict:
        return self._generation_body("definition", params)

    def handle_alternatives(self, params: dict) -> dict:
        term = self._require_term(params)
        seed = self._seed(params)
        sets = tuple(self._sample(term, slot, seed) for slot in (1, 2))
        result = self._generate(
            GenerationRequest(
                kind="alternatives",
                term=sets[0].term,
                samples=sets,
                model_id=self.config.rag.model_id,
                seed=seed,
            )
        )
        return {
            "term": sets[0].term,
            "kind": "alternatives",
            "seed": seed,
            "text": result.output,
            "provenance": {
                "1": list(result.provenance[0]),
                "2": list(result.provenance[1]),
            },
            "model_id": self.config.rag.model_id,
            "backend": result.backend_id,
            "truncated": result.truncated,
        }

    def handle_samples(self, params: dict) -> dict:
        term = self._require_term(params)
        slot = self._require_community(params)
        seed = self._seed(params)
        sample_set = self._sample(term, slot, seed)
        return {
            "term": sample_set.term,
            "community": slot,
            "name": self.names[slot - 1],
            "seed": seed,
            "doc_ids": list(sample_set.doc_ids),
            "texts": list(sample_set.texts),
        }

    def handle_scatter(self, params: dict) -> dict:
        term = self._require_term(params)
        seed = self._seed(params)
        sets = tuple(self._sample(term, slot, seed) for slot in (1, 2))
        try:
            payload = build_scatter(
                self.index,
                term,
                seed=seed,
                cap=self.config.rag.cap,
                params=ClusterParams(
                    eps=self.config.scatter.eps, min_pts=self.config.scatter.min_pts
                ),
                dim=self.config.scatter.dim,
                samples=sets,  # type: ignore[arg-type]
            )
        except ScatterError as exc:
            raise ApiError(422, str(exc), "insufficient_data") from exc
        slot_of = {label: i + 1 for i, label in enumerate(self.index.labels)}
        return {
            "term": payload.term,
            "x": [round(v, 6) for v in payload.x],
            "y": [round(v, 6) for v in payload.y],
            "label": payload.label,
            "community": [slot_of[c] for c in payload.community],
            "doc_id": payload.doc_id,
            "text": payload.text,
            "params": payload.params,
        }

    def handle_curated(self, params: dict) -> dict:
        path = self.config.resolve(self.config.paths.output_dir) / "curated-terms.jsonl"
        if not path.exists():
            raise ApiError(
                404, "no curated terms file; run 'bd curate' first", "missing_input"
            )
        terms = read_curated(path)
        return {"count": len(terms), "terms": [curated_to_record(t) for t in terms]}

    def handle_paper_edition(self, params: dict) -> bytes:
        with self._paper_lock:
            if self._paper_html is not None:
                return self._paper_html
            path = self.config.resolve(self.config.paths.output_dir) / "curated-terms.jsonl"
            if not path.exists():
                raise ApiError(
                    404, "no curated terms file; run 'bd curate' first", "missing_input"
                )
            curated = read_curated(path)
            if not curated:
                raise ApiError(404, "curated terms file is empty", "missing_input")
            try:
                edition = assemble(
                    self.index,
                    curated,
                    self.names,
                    self.cache,
                    self.backend,
                    self.templates,
                    model_id=self.config.rag.model_id,
                    seed=self.config.rag.seed,
                    cap=self.config.rag.cap,
                    parallelism=self.config.rag.parallelism,
                    char_budget=self.config.rag.prompt_char_budget,
                    sample_char_limit=self.config.rag.sample_char_limit,
                    max_output_chars=self.config.rag.max_output_chars,
                    config_digest=self.config.digest(),
                    dataset_description=f"Corpus: {self.config.corpus_path}",
                )
            except BackendError as exc:
                raise ApiError(502, f"generation backend failed: {exc}", "backend_failure") from exc
            self._paper_html = render(edition, "html")
            return self._paper_html


ROUTES = {
    "/api/health": "handle_health",
    "/api/stats": "handle_stats",
    "/api/summary": "handle_summary",
    "/api/definition": "handle_definition",
    "/api/alternatives": "handle_alternatives",
    "/api/scatter": "handle_scatter",
    "/api/samples": "handle_samples",
    "/api/curated": "handle_curated",
    "/api/paper-edition": "handle_paper_edition",
}


def make_handler(app: App):
    cors_origin = app.config.server.cors_origin
    static_dir = (
        app.config.resolve(app.config.server.static_dir)
        if app.config.server.static_dir
        else None
    )

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "bd"

        def log_message(self, fmt, *args):  # silenced; structured logging below
            pass

        def _send(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            if cors_origin:
                self.send_header("Access-Control-Allow-Origin", cors_origin)
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, obj) -> None:
            body = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
            self._send(status, body.encode("utf-8"), "application/json; charset=utf-8")

        def _serve_static(self, path: str) -> None:
            assert static_dir is not None
            rel = path.lstrip("/") or "index.html"
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_json(404, {"error": "not found", "code": "not_found"})
                return
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            self._send(200, target.read_bytes(), ctype)

        def do_POST(self) -> None:
            # drain the body so keep-alive connections stay parseable
            length = int(self.headers.get("Content-Length") or 0)
            if length > 0:
                self.rfile.read(length)
            self._send_json(405, {"error": "method not allowed", "code": "method_not_allowed"})

        def do_GET(self) -> None:
            started = time.monotonic()
            parsed = urlparse(self.path)
            params = parse_qs(parsed.query, keep_blank_values=True)
            status = 200
            try:
                route = ROUTES.get(parsed.path)
                if route is not None:
                    result = getattr(app, route)(params)
                    if isinstance(result, bytes):
                        self._send(200, result, "text/html; charset=utf-8")
                    else:
                        self._send_json(200, result)
                elif static_dir is not None and not parsed.path.startswith("/api/"):
                    self._serve_static(parsed.path)
                else:
                    status = 404
                    self._send_json(404, {"error": "not found", "code": "not_found"})
            except ApiError as exc:
                status = exc.status
                self._send_json(exc.status, {"error": exc.message, "code": exc.code})
            except BrokenPipeError:  # client went away; nothing to send
                status = 499
            except Exception as exc:  # defensive: never leak a stack trace as HTML
                log.exception("unhandled error for %s", self.path)
                status = 500
                self._send_json(500, {"error": f"internal error: {exc}", "code": "internal"})
            elapsed_ms = (time.monotonic() - started) * 1000.0
            log.info(
                '%s',
                json.dumps(
                    {
                        "method": "GET",
                        "path": self.path,
                        "status": status,
                        "ms": round(elapsed_ms, 2),
                    },
                    sort_keys=True,
                ),
            )

    return Handler


def make_server(app: App) -> ThreadingHTTPServer:
    cfg = app.config.server
    handler = make_handler(app)
    try:
        server = ThreadingHTTPServer((cfg.host, cfg.port), handler)
    except OSError as exc:
        raise BindError(f"cannot bind {cfg.host}:{cfg.port}: {exc}") from exc
    return server


def serve_forever(server: ThreadingHTTPServer, install_signals: bool = True) -> None:
    """Run until SIGTERM/SIGINT; in-flight requests complete before exit."""

    def _shutdown(signum, frame):
        log.info("signal %s received; shutting down", signum)
        threading.Thread(target=server.shutdown, daemon=True).start()

    if install_signals:
        signal.signal(signal.SIGTERM, _shutdown)
        signal.signal(signal.SIGINT, _shutdown)
    host, port = server.server_address[:2]
    log.info("serving on http://%s:%s/", host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
