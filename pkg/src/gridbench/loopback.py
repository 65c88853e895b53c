"""Local chat-completion server for offline end-to-end runs.

The server answers ``POST .../chat/completions`` using a responder callable
that maps the user prompt to reply text. A fault script can make the first
requests fail (HTTP status or a stall) to exercise client retries.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Iterable

Responder = Callable[[str], str]


class ChatStub:
    def __init__(
        self,
        responder: Responder,
        faults: Iterable[int | str] = (),
        stall_s: float = 1.0,
        delay_s: float = 0.0,
    ):
        self.responder = responder
        self.faults = list(faults)
        self.stall_s = stall_s
        self.delay_s = delay_s
        self.requests = 0
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), self._handler_class())
        self._server.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def __enter__(self) -> ChatStub:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()

    def _next_fault(self) -> int | str | None:
        with self._lock:
            self.requests += 1
            return self.faults.pop(0) if self.faults else None

    def _handler_class(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    stub.in_flight += 1
                    stub.max_in_flight = max(stub.max_in_flight, stub.in_flight)
                try:
                    fault = stub._next_fault()
                    if fault == "stall":
                        time.sleep(stub.stall_s)
                        return
                    if isinstance(fault, int):
                        self._send(fault, {"error": {"message": f"scripted {fault}"}})
                        return
                    if stub.delay_s:
                        time.sleep(stub.delay_s)
                    prompt = body["messages"][-1]["content"]
                    text = stub.responder(prompt)
                    self._send(200, {
                        "id": "chatcmpl-loopback",
                        "object": "chat.completion",
                        "model": body.get("model", ""),
                        "choices": [{
                            "index": 0,
                            "message": {"role": "assistant", "content": text},
                            "finish_reason": "stop",
                        }],
                    })
                finally:
                    with stub._lock:
                        stub.in_flight -= 1

            def _send(self, status: int, payload: dict):
                data = json.dumps(payload).encode("utf-8")
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

        return Handler
