"""Heuristic selection rules for title/description pairs.

Three filters, applied in order: (1) title length outside the 5..15 word
band, (2) more than 70% of the distinct title words missing from the
description, (3) a contiguous run of title tokens longer than 70% of the
title recurring verbatim in the description. All threshold comparisons
are strict, so a pair sitting exactly at a threshold is kept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus, TokenSeq, tokenize

RULE_LENGTH = "length"
RULE_MISSING = "missing"
RULE_EXTRACTIVE = "extractive"


@dataclass(frozen=True)
class CurationConfig:
    min_title_words: int = 5
    max_title_words: int = 15
    missing_ratio_threshold: float = 0.7
    extractive_ratio_threshold: float = 0.7

    def __post_init__(self):
        if not 1 <= self.min_title_words <= self.max_title_words:
            raise ValueError("title word band must satisfy 1 <= min <= max")
        for name in ("missing_ratio_threshold", "extractive_ratio_threshold"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1]")


@dataclass(frozen=True)
class FilterVerdict:
    """Keep/reject outcome for one issue; rule names the first filter that fired."""

    issue_id: str
    outcome: str  # "kept" | "rejected"
    rule: str | None = None


def rule_length(title_tokens: TokenSeq, cfg: CurationConfig) -> bool:
    """True iff the title falls outside the configured word-count band."""
    return len(title_tokens) < cfg.min_title_words or len(title_tokens) > cfg.max_title_words


def rule_missing(title_tokens: TokenSeq, body_tokens: TokenSeq, cfg: CurationConfig) -> bool:
    """True iff strictly more than the threshold fraction of distinct title
    words is absent from the description."""
    if not title_tokens:
        raise ValueError("rule_missing requires a non-empty title")
    title_types = set(title_tokens)
    missing = title_types - set(body_tokens)
    return len(missing) / len(title_types) > cfg.missing_ratio_threshold


def longest_common_token_substring(a: TokenSeq, b: TokenSeq) -> int:
    """Length of the longest contiguous token run occurring in both sequences.

    Classic longest-common-substring dynamic program over tokens, O(|a|*|b|)
    time with a two-row table. Zero when either sequence is empty.
    """
    if not a or not b:
        return 0
    best = 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def rule_extractive(title_tokens: TokenSeq, body_tokens: TokenSeq, cfg: CurationConfig) -> bool:
    """True iff the longest title run repeated verbatim in the description is
    strictly longer than the threshold fraction of the title."""
    if not title_tokens:
        raise ValueError("rule_extractive requires a non-empty title")
    run = longest_common_token_substring(title_tokens, body_tokens)
    return run / len(title_tokens) > cfg.extractive_ratio_threshold


def curate(corpus: Corpus, cfg: CurationConfig | None = None) -> tuple[Corpus, list[FilterVerdict]]:
    """Apply the three rules in order to every issue.

    An issue is kept iff no rule fires; a rejection verdict names the first
    rule that fired. Kept issues preserve input order, and verdicts cover
    every input issue. Degenerate (empty) titles are rejected by the length
    rule before rules 2 and 3 run.
    """
    cfg = cfg or CurationConfig()
    kept: list = []
    verdicts: list[FilterVerdict] = []
    for issue in corpus.issues:
        title_tokens = tokenize(issue.title)
        body_tokens = tokenize(issue.body)
        if rule_length(title_tokens, cfg):
            verdicts.append(FilterVerdict(issue.id, "rejected", RULE_LENGTH))
        elif rule_missing(title_tokens, body_tokens, cfg):
            verdicts.append(FilterVerdict(issue.id, "rejected", RULE_MISSING))
        elif rule_extractive(title_tokens, body_tokens, cfg):
            verdicts.append(FilterVerdict(issue.id, "rejected", RULE_EXTRACTIVE))
        else:
            verdicts.append(FilterVerdict(issue.id, "kept"))
            kept.append(issue)
    return Corpus(issues=kept, source=corpus.source), verdicts


def write_verdicts(verdicts: list[FilterVerdict], path: str | Path) -> None:
    """Write verdicts as JSONL: {"id": ..., "outcome": ..., "rule": ...|null}."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for v in verdicts:
            fh.write(
                json.dumps({"id": v.issue_id, "outcome": v.outcome, "rule": v.rule}) + "\n"
            )
