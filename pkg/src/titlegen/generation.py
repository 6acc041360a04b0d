"""Pluggable title generators.

Two deterministic extractive baselines (lead sentence and keyword) plus a
remote adapter that delegates to an external seq2seq model server over the
JSON protocol POST {"description": ...} -> {"title": ...}.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable
from urllib.parse import urlsplit

import httpx

from .corpus import tokenize
from .stopwords import ENGLISH_STOPWORDS

KIND_LEAD = "lead"
KIND_KEYWORD = "keyword"
KIND_REMOTE = "remote"
GENERATOR_KINDS = (KIND_LEAD, KIND_KEYWORD, KIND_REMOTE)

_FENCE_RE = re.compile(r"^\s*```")
_HEADING_RE = re.compile(r"^\s*#+\s*")
# Sentence-final means followed by whitespace or end of line, so the dot in
# "v1.2" does not end the sentence.
_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class TitleBand:
    """Target word-count band for generated titles; mirrors the curation band."""

    min_words: int = 5
    max_words: int = 15

    def __post_init__(self):
        if not 1 <= self.min_words <= self.max_words:
            raise ValueError("title band must satisfy 1 <= min <= max")


@dataclass(frozen=True)
class GeneratorSpec:
    """Which generator to run; endpoint and timeout apply to the remote kind."""

    kind: str
    endpoint: str | None = None
    timeout: float = 10.0

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == KIND_REMOTE:
            parts = urlsplit(self.endpoint or "")
            if parts.scheme not in ("http", "https") or not parts.netloc:
                raise ValueError(f"remote generator requires an absolute http(s) URL, got {self.endpoint!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @property
    def label(self) -> str:
        if self.kind == KIND_REMOTE:
            return f"remote:{urlsplit(self.endpoint).netloc}"
        return self.kind


@dataclass(frozen=True)
class TitleSuggestion:
    """A generated title: single line, no surrounding whitespace."""

    title: str
    generator_name: str
    truncated: bool = False
    word_count: int = field(init=False, default=0)

    def __post_init__(self):
        if self.title != self.title.strip() or "\n" in self.title or "\r" in self.title:
            raise ValueError("title must be a stripped single-line string")
        object.__setattr__(self, "word_count", len(tokenize(self.title)))


class RemoteGeneratorError(Exception):
    """Base for remote-adapter failures; carries the endpoint."""

    def __init__(self, endpoint: str, message: str):
        self.endpoint = endpoint
        super().__init__(f"{message} (endpoint {endpoint})")


class RemoteConnectionError(RemoteGeneratorError):
    pass


class RemoteTimeoutError(RemoteGeneratorError):
    pass


class RemoteUpstreamError(RemoteGeneratorError):
    def __init__(self, endpoint: str, status_code: int):
        self.status_code = status_code
        super().__init__(endpoint, f"upstream returned status {status_code}")


class RemoteProtocolError(RemoteGeneratorError):
    pass


def sanitize_title(raw: str) -> str:
    """Collapse whitespace runs (including line breaks) to single spaces and strip."""
    return _WS_RE.sub(" ", raw).strip()


def _strip_fences(body: str) -> list[str]:
    # Drops fence delimiter lines and everything between them; an unclosed
    # fence swallows the rest of the body.
    lines = []
    in_fence = False
    for line in body.splitlines():
        if _FENCE_RE.match(line):
            in_fence = not in_fence
            continue
        if not in_fence:
            lines.append(line)
    return lines


def generate_lead(body: str, band: TitleBand | None = None) -> TitleSuggestion:
    """First sentence of the description, capped at the band's word budget.

    Fenced code blocks are dropped, markdown heading markers are stripped,
    the first non-empty remaining line is cut at the first sentence-final
    '.', '!' or '?' (one followed by whitespace or the end of the line),
    and the result keeps its original casing. Truncation to max_words
    happens at whitespace-word boundaries, counting normalized tokens, and
    sets the truncated flag. An empty body yields an empty title.
    """
    band = band or TitleBand()
    sentence = ""
    for line in _strip_fences(body):
        line = _HEADING_RE.sub("", line)
        if line.strip():
            sentence = line
            break
    cut = _SENTENCE_END_RE.search(sentence)
    if cut:
        sentence = sentence[: cut.start()]
    sentence = sanitize_title(sentence)
    words = sentence.split(" ") if sentence else []
    kept: list[str] = []
    token_count = 0
    truncated = False
    for word in words:
        word_tokens = len(tokenize(word))
        if token_count + word_tokens > band.max_words:
            truncated = True
            break
        kept.append(word)
        token_count += word_tokens
    return TitleSuggestion(title=" ".join(kept), generator_name=KIND_LEAD, truncated=truncated)


def generate_keyword(body: str, band: TitleBand | None = None) -> TitleSuggestion:
    """Most frequent non-stopword tokens, emitted in first-occurrence order.

    Distinct tokens are ranked by frequency with ties broken by earlier
    first occurrence; the top min(max_words, available) survive. Output is
    lowercase since it is assembled from normalized tokens.
    """
    band = band or TitleBand()
    tokens = tokenize(body)
    freq: Counter = Counter()
    first_pos: dict[str, int] = {}
    for pos, token in enumerate(tokens):
        if token in ENGLISH_STOPWORDS:
            continue
        freq[token] += 1
        first_pos.setdefault(token, pos)
    ranked = sorted(freq, key=lambda t: (-freq[t], first_pos[t]))
    chosen = ranked[: band.max_words]
    chosen.sort(key=lambda t: first_pos[t])
    return TitleSuggestion(
        title=" ".join(chosen),
        generator_name=KIND_KEYWORD,
        truncated=len(ranked) > len(chosen),
    )


def generate_remote(body: str, spec: GeneratorSpec) -> TitleSuggestion:
    """POST the description to the configured endpoint and sanitize the reply.

    Connection failures, timeouts, non-200 statuses and malformed response
    bodies each raise their own RemoteGeneratorError subclass.
    """
    if spec.kind != KIND_REMOTE:
        raise ValueError("generate_remote requires a remote GeneratorSpec")
    endpoint = spec.endpoint or ""
    try:
        response = httpx.post(endpoint, json={"description": body}, timeout=spec.timeout)
    except httpx.TimeoutException as exc:
        raise RemoteTimeoutError(endpoint, f"request timed out after {spec.timeout}s") from exc
    except httpx.HTTPError as exc:
        raise RemoteConnectionError(endpoint, f"connection failed: {exc}") from exc
    if response.status_code != 200:
        raise RemoteUpstreamError(endpoint, response.status_code)
    try:
        payload = response.json()
    except ValueError as exc:
        raise RemoteProtocolError(endpoint, "response body is not valid JSON") from exc
    title = payload.get("title") if isinstance(payload, dict) else None
    if not isinstance(title, str):
        raise RemoteProtocolError(endpoint, 'response JSON lacks a string "title" field')
    return TitleSuggestion(title=sanitize_title(title), generator_name=spec.label)


def make_generator(
    spec: GeneratorSpec, band: TitleBand | None = None
) -> Callable[[str], TitleSuggestion]:
    """Bind a spec to a plain body -> suggestion callable."""
    band = band or TitleBand()
    if spec.kind == KIND_LEAD:
        return lambda body: generate_lead(body, band)
    if spec.kind == KIND_KEYWORD:
        return lambda body: generate_keyword(body, band)
    return lambda body: generate_remote(body, spec)
