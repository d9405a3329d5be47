"""JSON API over the union catalog, plus static file serving for the
web front end.

Endpoints (all GET, all UTF-8 JSON):

  /api/search?clause=<element>:<code|text|any>:<value>&clause=...
      -> array of entry summaries
  /api/entry/<identifier>?selected=<lang>&display=<lang>
      -> rendered view of one entry
  /api/facets/<element>?display=<lang>
      -> object mapping canonical code to {"count", "label"}
  /api/join?left=<clause>&right=<clause>&on=<element>
      -> array of {"left", "right", "shared"} pairs
  /api/providers
      -> array of harvest states

Failures are JSON too: {"error": {"code", "message"}} with HTTP 400
for bad requests and 404 for missing things. Any path outside /api/
serves the static bundle (single-page app: unknown paths fall back to
index.html).
"""

from __future__ import annotations

import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, unquote, urlsplit

from olac.catalog import (
    BadQuery,
    Catalog,
    CatalogError,
    NotCodedElement,
    NotFound,
    Query,
    clause_from_text,
)
from olac.harvester import provider_states
from olac.model import (
    SelectedNotAlternative,
    UnknownElement,
    canonical_element_name,
    descriptor_for,
)
from olac.vocab import CodeAmbiguous, CodeUnknown

log = logging.getLogger(__name__)

JSON_TYPE = "application/json; charset=utf-8"


class ApiError(Exception):
    """Carries the HTTP status and machine-readable code for a reply."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _translate(exc: Exception) -> ApiError:
    mapping = [
        (NotFound, 404, "not_found"),
        (SelectedNotAlternative, 400, "selected_not_alternative"),
        (CodeAmbiguous, 400, "code_ambiguous"),
        (CodeUnknown, 400, "code_unknown"),
        (UnknownElement, 400, "unknown_element"),
        (NotCodedElement, 400, "element_not_coded"),
        (BadQuery, 400, "bad_query"),
    ]
    for kind, status, code in mapping:
        if isinstance(exc, kind):
            return ApiError(status, code, str(exc))
    if isinstance(exc, CatalogError):
        return ApiError(400, "bad_request", str(exc))
    raise exc


def parse_clause(text: str) -> Clause:
    """element:kind:value with the value free to contain colons."""
    if len(text.split(":", 2)) != 3:
        raise ApiError(400, "bad_clause",
                       f"clause {text!r} is not element:kind:value")
    try:
        return clause_from_text(text)
    except (BadQuery, UnknownElement) as exc:
        raise _translate(exc) from exc


def entry_summary(catalog: Catalog, entry, query: Optional[Query]) -> dict:
    title = ""
    for element in entry.record.elements:
        if element.name == "Title":
            title = element.content
            break
    matched = []
    if query is not None:
        matched = [{"element": name, "code": code}
                   for name, code in catalog.codes_matching(entry.identifier, query)]
    return {"identifier": entry.identifier,
            "provider": entry.provider_id,
            "datestamp": entry.datestamp,
            "title": title,
            "matched_codes": matched}


def join_payload(catalog: Catalog, left: Query, right: Query,
                 join_on: str) -> list[dict]:
    """Join results in the documented wire shape (also what the CLI
    prints with --json)."""
    join_on = canonical_element_name(join_on)
    pairs = catalog.join_query(left, right, join_on)
    out = []
    for l_entry, r_entry in pairs:
        l_codes = set(catalog.entry_codes(l_entry.identifier).get(join_on, []))
        r_codes = set(catalog.entry_codes(r_entry.identifier).get(join_on, []))
        out.append({"left": entry_summary(catalog, l_entry, None),
                    "right": entry_summary(catalog, r_entry, None),
                    "shared": sorted(l_codes & r_codes)})
    return out


class CatalogApp:
    """Route table and handlers, separated from the socket plumbing so
    tests can call it directly."""

    def __init__(self, catalog: Catalog, static_dir: Optional[Path] = None):
        self.catalog = catalog
        self.static_dir = Path(static_dir) if static_dir else None

    # every handler returns (status, payload-object)

    def handle(self, path: str, params: dict[str, list[str]]):
        if path == "/api/search":
            return self._search(params)
        if path.startswith("/api/entry/"):
            return self._entry(unquote(path[len("/api/entry/"):]), params)
        if path.startswith("/api/facets/"):
            return self._facets(unquote(path[len("/api/facets/"):]), params)
        if path == "/api/join":
            return self._join(params)
        if path == "/api/providers":
            return self._providers()
        raise ApiError(404, "no_such_api", f"no API route at {path}")

    def _query_from(self, params: dict[str, list[str]], key: str) -> Query:
        texts = params.get(key, [])
        if not texts:
            raise ApiError(400, "missing_clause",
                           f"at least one {key} parameter is required")
        return Query(tuple(parse_clause(text) for text in texts))

    def _single(self, params: dict[str, list[str]], key: str,
                default: Optional[str] = None) -> Optional[str]:
        values = params.get(key, [])
        if len(values) > 1:
            raise ApiError(400, "bad_request", f"parameter {key} repeats")
        return values[0] if values else default

    def _search(self, params):
        query = self._query_from(params, "clause")
        try:
            hits = self.catalog.search(query)
            return 200, [entry_summary(self.catalog, entry, query)
                         for entry in hits]
        except Exception as exc:
            raise _translate(exc) from exc

    def _entry(self, identifier, params):
        selected = self._single(params, "selected")
        display = self._single(params, "display", "en") or "en"
        try:
            rendered = self.catalog.render_entry(identifier, selected=selected,
                                                 display_lang=display)
        except Exception as exc:
            raise _translate(exc) from exc
        return 200, {
            "identifier": rendered.identifier,
            "provider": rendered.provider_id,
            "datestamp": rendered.datestamp,
            "alternatives": list(rendered.alternatives),
            "elements": [
                {"name": row.name, "refine": row.refine,
                 "refine_label": row.refine_label, "code": row.code,
                 "code_label": row.code_label, "content": row.content,
                 "lang": row.lang}
                for row in rendered.elements],
        }

    def _facets(self, element, params):
        display = self._single(params, "display", "en") or "en"
        try:
            element = canonical_element_name(element)
            counts = self.catalog.facet_counts(element)
            vocabulary_id = descriptor_for(element).code_vocabulary
        except Exception as exc:
            raise _translate(exc) from exc
        payload = {}
        for code, count in counts.items():
            payload[code] = {
                "count": count,
                "label": self.catalog.registry.label(vocabulary_id, code,
                                                     display),
            }
        return 200, payload

    def _join(self, params):
        left = self._query_from(params, "left")
        right = self._query_from(params, "right")
        join_on = self._single(params, "on")
        if not join_on:
            raise ApiError(400, "bad_request", "parameter on is required")
        try:
            return 200, join_payload(self.catalog, left, right, join_on)
        except Exception as exc:
            raise _translate(exc) from exc

    def _providers(self):
        return 200, [
            {"archive_id": state.provider.archive_id,
             "name": state.provider.name,
             "base_url": state.provider.base_url,
             "earliest_datestamp": state.provider.earliest_datestamp,
             "last_success": state.last_success,
             "items_held": state.items_held,
             "last_error": state.last_error}
            for state in provider_states(self.catalog)]

    # -- static bundle -------------------------------------------------

    def static_file(self, path: str) -> Optional[tuple[bytes, str]]:
        """Resolve a non-API path inside the static directory; unknown
        paths fall back to index.html so the app owns its URLs."""
        if self.static_dir is None:
            return None
        relative = unquote(path).lstrip("/")
        candidate = (self.static_dir / relative) if relative else (
            self.static_dir / "index.html")
        try:
            root = self.static_dir.resolve()
            resolved = candidate.resolve()
        except OSError:
            return None
        if not resolved.is_relative_to(root):
            return None  # no escaping the bundle directory
        if resolved.is_dir():
            resolved = resolved / "index.html"
        if not resolved.is_file():
            fallback = root / "index.html"
            if not fallback.is_file():
                return None
            resolved = fallback
        content_type = mimetypes.guess_type(str(resolved))[0] or "application/octet-stream"
        if content_type.startswith("text/") or content_type in (
                "application/javascript", "application/json"):
            content_type += "; charset=utf-8"
        return resolved.read_bytes(), content_type


class _Handler(BaseHTTPRequestHandler):
    server_version = "olac-catalog"
    protocol_version = "HTTP/1.1"

    def do_GET(self):
        app: CatalogApp = self.server.app  # type: ignore[attr-defined]
        split = urlsplit(self.path)
        path = split.path
        if path.startswith("/api/") or path == "/api":
            params = parse_qs(split.query, keep_blank_values=True)
            try:
                status, payload = app.handle(path, params)
            except ApiError as exc:
                status = exc.status
                payload = {"error": {"code": exc.code, "message": str(exc)}}
            except Exception:
                log.exception("unhandled error for %s", self.path)
                status = 500
                payload = {"error": {"code": "internal",
                                     "message": "internal server error"}}
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self._reply(status, body, JSON_TYPE)
            return
        found = app.static_file(path)
        if found is None:
            body = json.dumps({"error": {
                "code": "not_found",
                "message": "no static bundle is configured; the API lives "
                           "under /api/"}}).encode("utf-8")
            self._reply(404, body, JSON_TYPE)
            return
        content, content_type = found
        self._reply(200, content, content_type)

    def do_POST(self):
        self._refuse()

    def do_PUT(self):
        self._refuse()

    def do_DELETE(self):
        self._refuse()

    def _refuse(self):
        body = json.dumps({"error": {"code": "method_not_allowed",
                                     "message": "GET only"}}).encode("utf-8")
        self.send_response(405)
        self.send_header("Allow", "GET")
        self.send_header("Content-Type", JSON_TYPE)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _reply(self, status: int, body: bytes, content_type: str):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        log.debug("%s %s", self.address_string(), format % args)


class CatalogServer:
    """Serves a catalog's JSON API (and optionally the web bundle)."""

    def __init__(self, catalog: Catalog, host: str = "127.0.0.1",
                 port: int = 0, static_dir: Optional[Path] = None):
        self.app = CatalogApp(catalog, static_dir=static_dir)
        self.host = host
        self.port = port
        self._httpd: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        if self._httpd is None:
            raise RuntimeError("server is not started")
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/"

    def _bind(self) -> ThreadingHTTPServer:
        httpd = ThreadingHTTPServer((self.host, self.port), _Handler)
        httpd.daemon_threads = True
        httpd.app = self.app  # type: ignore[attr-defined]
        self._httpd = httpd
        log.info("catalog API listening on %s", self.base_url)
        return httpd

    def start(self) -> "CatalogServer":
        if self._httpd is not None:
            raise RuntimeError("server is already started")
        httpd = self._bind()
        self._thread = threading.Thread(target=httpd.serve_forever,
                                        name="catalog-api", daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        if self._httpd is not None:
            raise RuntimeError("server is already started")
        self._bind().serve_forever()

    def stop(self) -> None:
        if self._httpd is None:
            return
        self._httpd.shutdown()
        self._httpd.server_close()
        self._httpd = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "CatalogServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()
