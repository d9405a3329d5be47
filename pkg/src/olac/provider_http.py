"""HTTP front for a repository: one GET endpoint speaking the harvest
protocol.

Transport stays dumb on purpose: every answerable request gets HTTP
200 with an XML envelope, and protocol failures ride inside it as
error elements, so a harvester needs exactly one parser. Only
transport-level impossibilities (non-GET methods) surface as HTTP
errors.
"""

from __future__ import annotations

import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlsplit

from olac import protocol
from olac.repository import Repository
from olac.vocab import Registry

log = logging.getLogger(__name__)

CONTENT_TYPE = "text/xml; charset=utf-8"


def _split_params(query: str) -> tuple[dict[str, str], Optional[str]]:
    """Query string as a flat dict, plus a complaint when a parameter
    repeats (the protocol allows each argument once)."""
    parsed = parse_qs(query, keep_blank_values=True)
    duplicates = sorted(name for name, values in parsed.items()
                        if len(values) > 1)
    params = {name: values[0] for name, values in parsed.items()}
    if duplicates:
        return params, ("argument repeats: " + ", ".join(duplicates))
    return params, None


class _Handler(BaseHTTPRequestHandler):
    server_version = "olac-provider"
    protocol_version = "HTTP/1.1"

    def do_GET(self):
        provider: "ProviderServer" = self.server.provider  # type: ignore[attr-defined]
        params, complaint = _split_params(urlsplit(self.path).query)
        if complaint is None:
            payload = protocol.handle_request(
                provider.repo, provider.base_url, params,
                page_size=provider.page_size, registry=provider.registry)
        else:
            payload = protocol.error_response(
                provider.repo, provider.base_url, params,
                protocol.BAD_ARGUMENT, complaint)
        self.send_response(200)
        self.send_header("Content-Type", CONTENT_TYPE)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_POST(self):
        self._refuse_method()

    def do_PUT(self):
        self._refuse_method()

    def do_DELETE(self):
        self._refuse_method()

    def _refuse_method(self):
        body = b"this endpoint answers GET requests only\n"
        self.send_response(405)
        self.send_header("Allow", "GET")
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        log.debug("%s %s", self.address_string(), format % args)


class ProviderServer:
    """Serves one repository over HTTP.

    Binds lazily in start(); port 0 picks a free port, so tests can
    run any number of providers side by side. Usable as a context
    manager.
    """

    def __init__(self, repo: Repository, host: str = "127.0.0.1",
                 port: int = 0, page_size: int = protocol.DEFAULT_PAGE_SIZE,
                 registry: Optional[Registry] = None):
        self.repo = repo
        self.host = host
        self.port = port
        self.page_size = page_size
        self.registry = registry
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
        httpd.provider = self  # type: ignore[attr-defined]
        self._httpd = httpd
        log.info("provider %s listening on %s", self.repo.archive_id,
                 self.base_url)
        return httpd

    def start(self) -> "ProviderServer":
        """Bind and serve on a background thread."""
        if self._httpd is not None:
            raise RuntimeError("server is already started")
        httpd = self._bind()
        self._thread = threading.Thread(
            target=httpd.serve_forever,
            name=f"provider-{self.repo.archive_id}", daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        """Bind and serve on the calling thread (CLI entry point)."""
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

    def __enter__(self) -> "ProviderServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()
