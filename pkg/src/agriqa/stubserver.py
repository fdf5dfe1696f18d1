"""In-process HTTP provider stub for tests and demos.

Serves the provider wire contract (POST {"input", "model"} ->
{"output"}) from a :class:`~agriqa.modelgw.FixtureStore`, with switchable
fault modes so retry/timeout/fallback behavior can be exercised against a
real socket.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .modelgw import FixtureStore, ProviderStatusError

# Fault modes: "ok", "fail_times" (500 for the first N requests),
# "always_500", "malformed", "empty", "hang".
MODES = ("ok", "fail_times", "always_500", "malformed", "empty", "hang")


class StubProviderServer:
    """Fixture-backed provider endpoint on a local port.

    Use as a context manager; ``url`` is the base URL to point a
    ProviderConfig at. ``request_count`` counts POSTs received.
    """

    def __init__(self, fixture_path: str | Path, mode: str = "ok", fail_times: int = 0,
                 hang_seconds: float = 30.0):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.store = FixtureStore(fixture_path)
        self.mode = mode
        self.fail_times = fail_times
        self.hang_seconds = hang_seconds
        self.request_count = 0
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), self._make_handler())
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/"

    def start(self) -> "StubProviderServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "StubProviderServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    def _make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def _send(self, status: int, body: bytes, content_type="application/json"):
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                self._send(200, b'{"status": "ok"}')

            def do_POST(self):
                with server._lock:
                    server.request_count += 1
                    count = server.request_count

                if server.mode == "hang":
                    time.sleep(server.hang_seconds)
                    return
                if server.mode == "always_500" or (
                    server.mode == "fail_times" and count <= server.fail_times
                ):
                    self._send(500, b'{"error": "injected failure"}')
                    return
                if server.mode == "malformed":
                    self._send(200, b"this is not json", content_type="text/plain")
                    return

                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length))
                    input_text = payload["input"]
                except (json.JSONDecodeError, KeyError):
                    self._send(400, b'{"error": "bad request body"}')
                    return

                if server.mode == "empty":
                    self._send(200, json.dumps({"output": ""}).encode())
                    return
                try:
                    output = server.store.lookup(input_text)
                except ProviderStatusError as exc:
                    self._send(exc.status, json.dumps({"error": str(exc)}).encode())
                    return
                self._send(200, json.dumps({"output": output}, ensure_ascii=False).encode())

        return Handler
