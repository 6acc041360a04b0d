"""Issue data model, JSONL ingestion, tokenization, and seeded splitting."""

from __future__ import annotations

import json
import random
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path

# A token sequence is a plain list of normalized tokens: lowercase,
# non-empty, whitespace-free.
TokenSeq = list[str]

_TOKEN_RE = re.compile(r"[^\W_]+")


class CorpusFormatError(ValueError):
    """A corpus file violates the JSONL contract. Carries the line number."""

    def __init__(self, message: str, path: str | Path | None = None, line_no: int | None = None):
        self.path = str(path) if path is not None else None
        self.line_no = line_no
        prefix = ""
        if self.path is not None:
            prefix = self.path
            if line_no is not None:
                prefix += f":{line_no}"
            prefix += ": "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Issue:
    """One bug report / feature request. Title and body are stored verbatim."""

    id: str
    repo: str
    title: str
    body: str = ""


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of issues; order is ingestion order."""

    issues: list[Issue]
    source: str = ""

    def __post_init__(self):
        seen: set[str] = set()
        for issue in self.issues:
            if not issue.id:
                raise ValueError("issue with empty id")
            if issue.id in seen:
                raise ValueError(f"duplicate issue id {issue.id!r}")
            seen.add(issue.id)

    def __len__(self) -> int:
        return len(self.issues)


@dataclass(frozen=True)
class CorpusSplit:
    """8:1:1 index partition of a corpus: train/valid/test plus the seed used."""

    train: list[int]
    valid: list[int]
    test: list[int]
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "train": self.train, "valid": self.valid, "test": self.test}
        )

    @classmethod
    def from_json(cls, text: str) -> "CorpusSplit":
        raw = json.loads(text)
        return cls(train=raw["train"], valid=raw["valid"], test=raw["test"], seed=raw["seed"])


def tokenize(text: str) -> TokenSeq:
    """Normalize a string to lowercase word tokens.

    Unicode NFC normalization, lowercasing, then splitting on maximal runs
    of non-alphanumeric characters (digits count as alphanumeric, the
    underscore does not). Deterministic; empty input yields an empty list.
    """
    normalized = unicodedata.normalize("NFC", text).lower()
    return _TOKEN_RE.findall(normalized)


_REQUIRED_FIELDS = ("id", "repo", "title")


def load_jsonl(path: str | Path, source: str | None = None) -> Corpus:
    """Read a corpus from a JSONL file, one issue object per line.

    Each non-blank line must be a JSON object with string fields id, repo
    and title; body may be absent or null (treated as empty). Blank lines
    are skipped. Errors carry the offending line number.
    """
    path = Path(path)
    issues: list[Issue] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"malformed JSON ({exc.msg})", path, line_no) from exc
            if not isinstance(raw, dict):
                raise CorpusFormatError("line is not a JSON object", path, line_no)
            for key in _REQUIRED_FIELDS:
                if not isinstance(raw.get(key), str):
                    raise CorpusFormatError(f"missing or non-string field {key!r}", path, line_no)
            body = raw.get("body")
            if body is None:
                body = ""
            if not isinstance(body, str):
                raise CorpusFormatError("field 'body' must be a string", path, line_no)
            if raw["id"] in seen:
                raise CorpusFormatError(f"duplicate issue id {raw['id']!r}", path, line_no)
            seen.add(raw["id"])
            issues.append(Issue(id=raw["id"], repo=raw["repo"], title=raw["title"], body=body))
    return Corpus(issues=issues, source=source if source is not None else str(path))


def write_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus as UTF-8 JSONL with keys in id, repo, title, body order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for issue in corpus.issues:
            fh.write(
                json.dumps(
                    {"id": issue.id, "repo": issue.repo, "title": issue.title, "body": issue.body},
                    ensure_ascii=False,
                )
                + "\n"
            )


def split(corpus: Corpus, seed: int) -> CorpusSplit:
    """Partition corpus indices 8:1:1 after a seeded deterministic shuffle.

    The shuffle is a Fisher-Yates pass driven by Python's Mersenne Twister
    (random.Random) seeded with `seed`, so the same corpus size and seed
    always produce the identical split. Train gets floor(0.8*N) indices,
    valid floor(0.1*N), and the remainder goes to test.
    """
    n = len(corpus.issues)
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    n_train = (8 * n) // 10
    n_valid = n // 10
    return CorpusSplit(
        train=indices[:n_train],
        valid=indices[n_train : n_train + n_valid],
        test=indices[n_train + n_valid :],
        seed=seed,
    )


def select(corpus: Corpus, indices: list[int]) -> Corpus:
    """Sub-corpus at the given indices, in the order given."""
    return Corpus(issues=[corpus.issues[i] for i in indices], source=corpus.source)
