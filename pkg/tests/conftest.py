"""Shared fixtures: the golden curation corpus and a stub upstream model server."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from titlegen.corpus import Corpus, Issue

# Eight-issue golden corpus: one clean keeper, one violator per rule
# (two for the length rule: short and long), and one keeper sitting exactly
# at each threshold (15 words; 7/10 words missing; shared run of 7/10).
# Expected outcomes hand-checked token by token.
CURATION_CASES = [
    (
        Issue(
            id="keep-clean",
            repo="acme/app",
            title="parser fails on empty config file",
            body="When the parser loads an empty config file it fails with a traceback. "
            "Expected graceful error.",
        ),
        "kept",
        None,
    ),
    (
        Issue(
            id="rej-short",
            repo="acme/app",
            title="crash on save",
            body="Saving a document crashes the whole app immediately.",
        ),
        "rejected",
        "length",
    ),
    (
        Issue(
            id="rej-long",
            repo="acme/app",
            title="app crashes when clicking the save button twice in a row on the main editor window",
            body="Double clicking save crashes it.",
        ),
        "rejected",
        "length",
    ),
    (
        Issue(
            id="rej-missing",
            repo="acme/app",
            title="installer corrupts registry hive during rollback phase",
            body="Nothing works anymore after the update.",
        ),
        "rejected",
        "missing",
    ),
    (
        Issue(
            id="rej-extractive",
            repo="acme/app",
            title="editor freezes when opening large files from the network share",
            body="The editor freezes when opening large files from the network. "
            "It happens every time.",
        ),
        "rejected",
        "extractive",
    ),
    (
        Issue(
            id="keep-band-edge",
            repo="acme/app",
            title="search results render slowly when filters include unicode characters "
            "and very large result pages overflow",
            body="Filtering with unicode characters makes the search slow. "
            "Results take seconds to render.",
        ),
        "kept",
        None,
    ),
    (
        Issue(
            id="keep-missing-edge",
            repo="acme/app",
            title="scheduler drops recurring events after daylight saving time transition occurs",
            body="The scheduler misbehaves. Some events vanish and the time shown is wrong.",
        ),
        "kept",
        None,
    ),
    (
        Issue(
            id="keep-extractive-edge",
            repo="acme/app",
            title="uploads fail silently when the proxy strips chunked encoding headers",
            body="Large uploads break when the proxy strips chunked encoding headers "
            "from requests.",
        ),
        "kept",
        None,
    ),
]

EXPECTED_KEEP_IDS = [issue.id for issue, outcome, _ in CURATION_CASES if outcome == "kept"]
EXPECTED_RULES = {issue.id: rule for issue, _, rule in CURATION_CASES}


@pytest.fixture()
def curation_corpus() -> Corpus:
    return Corpus(issues=[issue for issue, _, _ in CURATION_CASES], source="golden")


class _StubHandler(BaseHTTPRequestHandler):
    """Upstream model stub: path selects the failure mode."""

    slow_seconds = 1.0

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        if self.path == "/fail":
            self.send_response(500)
            self.end_headers()
            self.wfile.write(b"internal error")
        elif self.path == "/slow":
            time.sleep(self.slow_seconds)
            self._json({"title": "eventually produced title"})
        elif self.path == "/garbage":
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(b"this is not json")
        elif self.path == "/echo":
            description = json.loads(raw)["description"]
            self._json({"title": description})
        else:
            self._json({"title": "fix crash"})

    def _json(self, payload: dict):
        data = json.dumps(payload).encode("utf-8")
        try:
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
        except (BrokenPipeError, ConnectionResetError):
            # client gave up (timeout tests); nothing to report
            pass

    def log_message(self, *args):
        pass


@pytest.fixture(scope="session")
def stub_server() -> str:
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    thread.join(timeout=5)
