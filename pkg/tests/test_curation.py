import random

import pytest

from titlegen.corpus import Corpus, Issue, tokenize
from titlegen.curation import (
    CurationConfig,
    curate,
    longest_common_token_substring,
    rule_extractive,
    rule_length,
    rule_missing,
    write_verdicts,
)

from conftest import EXPECTED_KEEP_IDS, EXPECTED_RULES

CFG = CurationConfig()


def brute_force_longest_run(a, b):
    """Oracle: try every contiguous substring of a for containment in b."""

    def contains(seq, sub):
        return any(seq[k : k + len(sub)] == sub for k in range(len(seq) - len(sub) + 1))

    best = 0
    for i in range(len(a)):
        for j in range(i + 1, len(a) + 1):
            if j - i > best and contains(b, a[i:j]):
                best = j - i
    return best


class TestRuleLength:
    def test_four_tokens_violates(self):
        assert rule_length(["a", "b", "c", "d"], CFG) is True

    def test_five_and_fifteen_kept(self):
        assert rule_length(["w"] * 5, CFG) is False
        assert rule_length(["w"] * 15, CFG) is False

    def test_sixteen_violates(self):
        assert rule_length(["w"] * 16, CFG) is True

    def test_empty_title_violates(self):
        assert rule_length([], CFG) is True


class TestRuleMissing:
    def test_fully_disjoint_violates(self):
        assert rule_missing(["a", "b"], ["x", "y"], CFG) is True

    def test_fully_covered_kept(self):
        assert rule_missing(["a", "b"], ["a", "b", "c"], CFG) is False

    def test_exactly_seventy_percent_kept(self):
        title = [f"t{i}" for i in range(10)]
        body = title[:3] + ["filler"] * 5  # 7 of 10 distinct title words missing
        assert rule_missing(title, body, CFG) is False

    def test_just_over_seventy_percent_violates(self):
        title = [f"t{i}" for i in range(10)]
        body = title[:2]  # 8 of 10 missing
        assert rule_missing(title, body, CFG) is True

    def test_ratio_uses_distinct_types(self):
        # 2 distinct types, 1 missing -> 0.5, kept despite repeated tokens
        assert rule_missing(["a", "a", "a", "b"], ["a"], CFG) is False

    def test_empty_title_is_error(self):
        with pytest.raises(ValueError):
            rule_missing([], ["a"], CFG)


class TestLongestCommonTokenSubstring:
    def test_spec_example(self):
        assert longest_common_token_substring(["x", "y", "z"], ["w", "x", "y", "q"]) == 2

    def test_identical_sequences(self):
        seq = ["a", "b", "c", "d", "e"]
        assert longest_common_token_substring(seq, list(seq)) == 5

    def test_disjoint(self):
        assert longest_common_token_substring(["a", "b"], ["c", "d"]) == 0

    def test_empty_sides(self):
        assert longest_common_token_substring([], ["a"]) == 0
        assert longest_common_token_substring(["a"], []) == 0

    def test_matches_brute_force_and_symmetric(self):
        rng = random.Random(99)
        vocab = ["a", "b", "c", "d"]
        for _ in range(300):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            expected = brute_force_longest_run(a, b)
            assert longest_common_token_substring(a, b) == expected
            assert longest_common_token_substring(b, a) == expected


class TestRuleExtractive:
    def test_title_verbatim_in_body_violates(self):
        title = ["fix", "the", "save", "crash", "now"]
        body = ["please"] + title + ["thanks"]
        assert rule_extractive(title, body, CFG) is True

    def test_exactly_seventy_percent_kept(self):
        title = [f"t{i}" for i in range(10)]
        body = ["pre"] + title[:7] + ["post"]
        assert brute_force_longest_run(title, body) == 7
        assert rule_extractive(title, body, CFG) is False

    def test_eighty_percent_violates(self):
        title = [f"t{i}" for i in range(10)]
        body = ["pre"] + title[:8] + ["post"]
        assert brute_force_longest_run(title, body) == 8
        assert rule_extractive(title, body, CFG) is True

    def test_empty_title_is_error(self):
        with pytest.raises(ValueError):
            rule_extractive([], ["a"], CFG)


class TestCurate:
    def test_golden_fixture(self, curation_corpus):
        kept, verdicts = curate(curation_corpus, CFG)
        assert [i.id for i in kept.issues] == EXPECTED_KEEP_IDS
        for verdict in verdicts:
            assert verdict.rule == EXPECTED_RULES[verdict.issue_id]
            assert verdict.outcome == ("kept" if verdict.rule is None else "rejected")

    def test_empty_corpus(self):
        kept, verdicts = curate(Corpus(issues=[]), CFG)
        assert kept.issues == [] and verdicts == []

    def test_empty_title_rejected_by_length(self):
        corpus = Corpus(issues=[Issue(id="x", repo="o/r", title="", body="some text")])
        kept, verdicts = curate(corpus, CFG)
        assert kept.issues == []
        assert verdicts[0].rule == "length"

    def test_verdicts_partition_input(self, curation_corpus):
        kept, verdicts = curate(curation_corpus, CFG)
        kept_ids = {i.id for i in kept.issues}
        rejected_ids = {v.issue_id for v in verdicts if v.outcome == "rejected"}
        assert kept_ids | rejected_ids == {i.id for i in curation_corpus.issues}
        assert kept_ids & rejected_ids == set()
        assert len(verdicts) == len(curation_corpus.issues)

    def test_tightening_max_words_never_grows_keep_set(self, curation_corpus):
        previous = None
        for max_words in range(15, 4, -1):
            cfg = CurationConfig(max_title_words=max_words)
            kept, _ = curate(curation_corpus, cfg)
            ids = {i.id for i in kept.issues}
            if previous is not None:
                assert ids <= previous
            previous = ids

    def test_every_kept_issue_satisfies_all_bounds(self, curation_corpus):
        kept, _ = curate(curation_corpus, CFG)
        for issue in kept.issues:
            title = tokenize(issue.title)
            body = tokenize(issue.body)
            assert 5 <= len(title) <= 15
            missing = len(set(title) - set(body)) / len(set(title))
            assert missing <= 0.7
            assert longest_common_token_substring(title, body) <= 0.7 * len(title)


class TestVerdictReport:
    def test_jsonl_shape(self, tmp_path, curation_corpus):
        import json

        _, verdicts = curate(curation_corpus, CFG)
        path = tmp_path / "verdicts.jsonl"
        write_verdicts(verdicts, path)
        lines = [json.loads(l) for l in path.read_text().splitlines()]
        assert len(lines) == len(curation_corpus.issues)
        assert set(lines[0]) == {"id", "outcome", "rule"}
        by_id = {l["id"]: l for l in lines}
        assert by_id["keep-clean"]["outcome"] == "kept"
        assert by_id["keep-clean"]["rule"] is None
        assert by_id["rej-missing"]["rule"] == "missing"


class TestCurationConfig:
    def test_rejects_inverted_band(self):
        with pytest.raises(ValueError):
            CurationConfig(min_title_words=10, max_title_words=5)

    def test_rejects_out_of_range_threshold(self):
        with pytest.raises(ValueError):
            CurationConfig(missing_ratio_threshold=0.0)
        with pytest.raises(ValueError):
            CurationConfig(extractive_ratio_threshold=1.5)
