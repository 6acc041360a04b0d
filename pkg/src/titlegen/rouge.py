"""From-scratch ROUGE-1/2/L with corpus-level aggregation.

Overlap counting is clipped (each shared n-gram counts at most
min(count-in-ref, count-in-gen) times). ROUGE-L uses the longest common
subsequence with equal-weight harmonic-mean F1. No stemming and no
stopword removal happen inside the metric; both sides are expected to be
pre-tokenized with corpus.tokenize.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .corpus import TokenSeq


@dataclass(frozen=True)
class NGramBag:
    """Multiset of the contiguous n-token windows of one sequence."""

    n: int
    counts: Counter

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class RougeScore:
    """Recall/precision/F1 triple; degenerate marks an empty-side comparison."""

    recall: float
    precision: float
    f1: float
    degenerate: bool = False

    @classmethod
    def from_counts(cls, overlap_count: int, ref_total: int, gen_total: int) -> "RougeScore":
        if ref_total == 0 or gen_total == 0:
            return cls(0.0, 0.0, 0.0, degenerate=True)
        recall = overlap_count / ref_total
        precision = overlap_count / gen_total
        f1 = 2 * recall * precision / (recall + precision) if recall + precision > 0 else 0.0
        return cls(recall, precision, f1)


@dataclass(frozen=True)
class RougeReport:
    """Corpus-level means of per-pair F1, scaled by 100 and rounded to 2 decimals."""

    rouge1: float
    rouge2: float
    rougeL: float
    n_pairs: int

    def to_json(self) -> str:
        return json.dumps(
            {"rouge1": self.rouge1, "rouge2": self.rouge2, "rougeL": self.rougeL, "n_pairs": self.n_pairs}
        )


def ngrams(tokens: TokenSeq, n: int) -> NGramBag:
    """Multiset of all contiguous n-token windows; empty when |tokens| < n."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    windows = Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return NGramBag(n=n, counts=windows)


def overlap(ref: NGramBag, gen: NGramBag) -> int:
    """Clipped multiset intersection size: sum of min counts per n-gram."""
    if ref.n != gen.n:
        raise ValueError(f"n-gram order mismatch: {ref.n} vs {gen.n}")
    return sum(min(count, gen.counts[gram]) for gram, count in ref.counts.items())


def rouge_n(ref_tokens: TokenSeq, gen_tokens: TokenSeq, n: int) -> RougeScore:
    """ROUGE-N: overlap / ref n-gram count (recall) and / gen n-gram count
    (precision), F1 their harmonic mean. Either side without n-grams yields
    an all-zero degenerate score."""
    ref_bag = ngrams(ref_tokens, n)
    gen_bag = ngrams(gen_tokens, n)
    return RougeScore.from_counts(overlap(ref_bag, gen_bag), ref_bag.total, gen_bag.total)


def lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    """Longest common (not necessarily contiguous) subsequence length.

    Standard dynamic program, O(|a|*|b|) time and O(|b|) space.
    """
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def rouge_l(ref_tokens: TokenSeq, gen_tokens: TokenSeq) -> RougeScore:
    """ROUGE-L: LCS/|ref| recall, LCS/|gen| precision, harmonic-mean F1."""
    return RougeScore.from_counts(
        lcs_length(ref_tokens, gen_tokens), len(ref_tokens), len(gen_tokens)
    )


def _round2(value: float) -> float:
    # Round half away from zero, on the decimal repr rather than the raw binary.
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class PairScores:
    """Per-pair F1 values for the three metrics, as exported to CSV."""

    pair_id: str
    rouge1_f1: float
    rouge2_f1: float
    rougeL_f1: float


def score_pair(ref_tokens: TokenSeq, gen_tokens: TokenSeq, pair_id: str = "") -> PairScores:
    return PairScores(
        pair_id=pair_id,
        rouge1_f1=rouge_n(ref_tokens, gen_tokens, 1).f1,
        rouge2_f1=rouge_n(ref_tokens, gen_tokens, 2).f1,
        rougeL_f1=rouge_l(ref_tokens, gen_tokens).f1,
    )


def aggregate(pairs: list[tuple[TokenSeq, TokenSeq]]) -> RougeReport:
    """Arithmetic mean of per-pair F1 for each metric, x100, 2 decimals.

    The reduction is a plain sum-then-divide, so result is independent of
    pair order. An empty list reports zeros with n_pairs=0.
    """
    if not pairs:
        return RougeReport(0.0, 0.0, 0.0, 0)
    scored = [score_pair(ref, gen) for ref, gen in pairs]
    return aggregate_scored(scored)


def aggregate_scored(scored: list[PairScores]) -> RougeReport:
    """Aggregate already-computed per-pair scores into a report."""
    if not scored:
        return RougeReport(0.0, 0.0, 0.0, 0)
    n = len(scored)
    return RougeReport(
        rouge1=_round2(100.0 * sum(s.rouge1_f1 for s in scored) / n),
        rouge2=_round2(100.0 * sum(s.rouge2_f1 for s in scored) / n),
        rougeL=_round2(100.0 * sum(s.rougeL_f1 for s in scored) / n),
        n_pairs=n,
    )


def scores_csv_text(scored: list[PairScores]) -> str:
    """Per-pair CSV: id, rouge1_f1, rouge2_f1, rougeL_f1 at 6 decimal places."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["id", "rouge1_f1", "rouge2_f1", "rougeL_f1"])
    for s in scored:
        writer.writerow(
            [s.pair_id, f"{s.rouge1_f1:.6f}", f"{s.rouge2_f1:.6f}", f"{s.rougeL_f1:.6f}"]
        )
    return buffer.getvalue()


def write_scores_csv(scored: list[PairScores], path: str | Path) -> None:
    Path(path).write_text(scores_csv_text(scored), encoding="utf-8", newline="")


def read_scores_csv(path: str | Path) -> list[PairScores]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [
            PairScores(
                pair_id=row["id"],
                rouge1_f1=float(row["rouge1_f1"]),
                rouge2_f1=float(row["rouge2_f1"]),
                rougeL_f1=float(row["rougeL_f1"]),
            )
            for row in csv.DictReader(fh)
        ]


def render_table(rows: list[tuple[str, RougeReport]]) -> str:
    """Plain-text three-column report table, one row per approach."""
    header = f"{'Approach':<16}{'ROUGE-1':>10}{'ROUGE-2':>10}{'ROUGE-L':>10}"
    lines = [header, "-" * len(header)]
    for name, report in rows:
        lines.append(
            f"{name:<16}{report.rouge1:>10.2f}{report.rouge2:>10.2f}{report.rougeL:>10.2f}"
        )
    return "\n".join(lines)
