"""Automatic ROUGE evaluation runs and the blinded human preference study.

The study sheet never names a generator; the de-blinding key lives in a
separate file so sheets can be handed to evaluators as-is. All output
files are written atomically (temp file in the target directory, then
rename).
"""

from __future__ import annotations

import json
import os
import random
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .corpus import Corpus, tokenize
from .generation import GeneratorSpec, TitleSuggestion, make_generator
from .rouge import PairScores, RougeReport, aggregate_scored, score_pair, scores_csv_text

LIKERT_QUESTIONS = ("easy-to-use", "useful", "future-use")

CHOICE_FIRST = "first"
CHOICE_SECOND = "second"


class StudyError(ValueError):
    """Invalid study input: bad sample size, unknown item, duplicate response."""


@dataclass(frozen=True)
class StudyItem:
    """One blinded sheet row; must not reveal which generator wrote which title."""

    item_index: int
    issue_id: str
    description: str
    title_first: str
    title_second: str


@dataclass(frozen=True)
class StudyKey:
    """De-blinding key: which sheet position holds generator A, per item."""

    seed: int
    generator_a: str
    generator_b: str
    positions: dict[int, str]  # item_index -> "first" | "second" (position of A)

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "generator_a": self.generator_a,
                "generator_b": self.generator_b,
                "positions": {str(k): v for k, v in sorted(self.positions.items())},
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "StudyKey":
        raw = json.loads(text)
        return cls(
            seed=raw["seed"],
            generator_a=raw["generator_a"],
            generator_b=raw["generator_b"],
            positions={int(k): v for k, v in raw["positions"].items()},
        )


@dataclass(frozen=True)
class PreferenceTally:
    counts: dict[str, int]  # generator name -> judgments preferring it
    total_judgments: int

    def to_json(self) -> str:
        return json.dumps({"counts": self.counts, "total_judgments": self.total_judgments})


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


GenerateFn = Callable[[str], TitleSuggestion]


def _resolve_generator(generator: GeneratorSpec | GenerateFn) -> tuple[GenerateFn, str]:
    if isinstance(generator, GeneratorSpec):
        return make_generator(generator), generator.label
    return generator, getattr(generator, "__name__", "custom")


def run_auto_eval(
    test_issues: Corpus,
    generator: GeneratorSpec | GenerateFn,
    csv_path: str | Path | None = None,
) -> tuple[RougeReport, list[PairScores]]:
    """Generate a title per issue, score it against the reference title.

    Rows come back in corpus order; the report is the mean-F1 aggregate of
    exactly those rows. If the generator fails partway (a remote error),
    the rows scored so far are saved to "<csv_path>.partial" and the error
    propagates.
    """
    generate, _ = _resolve_generator(generator)
    for issue in test_issues.issues:
        if not issue.title.strip():
            raise ValueError(f"issue {issue.id!r} has an empty reference title")
    rows: list[PairScores] = []
    try:
        for issue in test_issues.issues:
            suggestion = generate(issue.body)
            rows.append(score_pair(tokenize(issue.title), tokenize(suggestion.title), issue.id))
    except Exception:
        if csv_path is not None:
            _atomic_write(str(csv_path) + ".partial", scores_csv_text(rows))
        raise
    if csv_path is not None:
        _atomic_write(csv_path, scores_csv_text(rows))
    report = aggregate_scored(rows)
    return report, rows


def prepare_study(
    test_issues: Corpus,
    gen_a: GeneratorSpec | GenerateFn,
    gen_b: GeneratorSpec | GenerateFn,
    n_items: int = 30,
    seed: int = 0,
    name_a: str | None = None,
    name_b: str | None = None,
    sheet_path: str | Path | None = None,
    key_path: str | Path | None = None,
) -> tuple[list[StudyItem], StudyKey]:
    """Sample issues and lay out a blinded A/B sheet plus its key.

    Sampling without replacement and the per-item position bits both come
    from one Mersenne Twister stream seeded with `seed`, so a fixed seed
    reproduces sheet and key exactly. Generator names must differ; neither
    name appears anywhere in the sheet.
    """
    generate_a, label_a = _resolve_generator(gen_a)
    generate_b, label_b = _resolve_generator(gen_b)
    name_a = name_a or label_a
    name_b = name_b or label_b
    if name_a == name_b:
        raise StudyError(f"generators must differ by name, both are {name_a!r}")
    if n_items < 0:
        raise StudyError("n_items must be >= 0")
    if len(test_issues.issues) < n_items:
        raise StudyError(
            f"corpus has {len(test_issues.issues)} issues, cannot sample {n_items}"
        )
    rng = random.Random(seed)
    sampled = rng.sample(range(len(test_issues.issues)), n_items)
    items: list[StudyItem] = []
    positions: dict[int, str] = {}
    for item_index, corpus_index in enumerate(sampled):
        issue = test_issues.issues[corpus_index]
        title_a = generate_a(issue.body).title
        title_b = generate_b(issue.body).title
        a_first = rng.getrandbits(1) == 0
        positions[item_index] = CHOICE_FIRST if a_first else CHOICE_SECOND
        items.append(
            StudyItem(
                item_index=item_index,
                issue_id=issue.id,
                description=issue.body,
                title_first=title_a if a_first else title_b,
                title_second=title_b if a_first else title_a,
            )
        )
    key = StudyKey(seed=seed, generator_a=name_a, generator_b=name_b, positions=positions)
    if sheet_path is not None:
        _atomic_write(sheet_path, "".join(_sheet_line(item) for item in items))
    if key_path is not None:
        _atomic_write(key_path, key.to_json() + "\n")
    return items, key


def _sheet_line(item: StudyItem) -> str:
    return (
        json.dumps(
            {
                "item_index": item.item_index,
                "issue_id": item.issue_id,
                "description": item.description,
                "title_first": item.title_first,
                "title_second": item.title_second,
            },
            ensure_ascii=False,
        )
        + "\n"
    )


def load_sheet(path: str | Path) -> list[StudyItem]:
    items = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            items.append(
                StudyItem(
                    item_index=raw["item_index"],
                    issue_id=raw["issue_id"],
                    description=raw["description"],
                    title_first=raw["title_first"],
                    title_second=raw["title_second"],
                )
            )
    return items


def load_key(path: str | Path) -> StudyKey:
    return StudyKey.from_json(Path(path).read_text(encoding="utf-8"))


def tally_study(
    responses: list[tuple[str, int, str]], key: StudyKey
) -> PreferenceTally:
    """De-blind (evaluator, item_index, choice) responses and count per generator.

    Missing responses are fine (the tally covers what exists); an unknown
    item index or a second response from the same evaluator for the same
    item is an error.
    """
    counts = {key.generator_a: 0, key.generator_b: 0}
    seen: set[tuple[str, int]] = set()
    for evaluator, item_index, choice in responses:
        if item_index not in key.positions:
            raise StudyError(f"response references unknown item_index {item_index}")
        if choice not in (CHOICE_FIRST, CHOICE_SECOND):
            raise StudyError(f"choice must be 'first' or 'second', got {choice!r}")
        if (evaluator, item_index) in seen:
            raise StudyError(f"duplicate response from {evaluator!r} for item {item_index}")
        seen.add((evaluator, item_index))
        preferred = key.generator_a if key.positions[item_index] == choice else key.generator_b
        counts[preferred] += 1
    return PreferenceTally(counts=counts, total_judgments=len(responses))


def load_responses(path: str | Path) -> list[tuple[str, int, str]]:
    """Read responses.jsonl lines: {"evaluator": ..., "item": ..., "choice": ...}."""
    responses = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            responses.append((raw["evaluator"], raw["item"], raw["choice"]))
    return responses


@dataclass(frozen=True)
class LikertSummary:
    """Per-question mean (None when no responses) and response count."""

    means: dict[str, float | None]
    counts: dict[str, int]

    def to_json(self) -> str:
        return json.dumps(
            {
                question: {"mean": self.means[question], "count": self.counts[question]}
                for question in LIKERT_QUESTIONS
            }
        )


def summarize_likert(scores: list[tuple[str, str, int]]) -> LikertSummary:
    """Mean integer score (1..5) per question over (evaluator, question, score) rows."""
    totals = {q: 0 for q in LIKERT_QUESTIONS}
    counts = {q: 0 for q in LIKERT_QUESTIONS}
    for _evaluator, question, score in scores:
        if question not in LIKERT_QUESTIONS:
            raise ValueError(f"unknown question {question!r}; expected one of {LIKERT_QUESTIONS}")
        if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
            raise ValueError(f"score must be an integer in 1..5, got {score!r}")
        totals[question] += score
        counts[question] += 1
    means = {
        q: (totals[q] / counts[q] if counts[q] else None) for q in LIKERT_QUESTIONS
    }
    return LikertSummary(means=means, counts=counts)


def load_likert(path: str | Path) -> list[tuple[str, str, int]]:
    """Read likert.jsonl lines: {"evaluator": ..., "question": ..., "score": ...}."""
    scores = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            scores.append((raw["evaluator"], raw["question"], raw["score"]))
    return scores
