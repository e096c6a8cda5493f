from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bridgedict.corpus import (
    CorpusError,
    RecordSchema,
    extract_ngrams,
    ingest,
    normalize,
    tokenize,
)
from conftest import FIXTURE_LABELS, fixture_corpus_path, make_corpus


class TestNormalize:
    def test_empty(self):
        assert normalize("") == ""

    def test_case_and_whitespace(self):
        assert normalize("Climate CHANGE  now") == "climate change now"

    def test_social_media_golden(self):
        # derived by hand from the normalization rules
        assert normalize("@potus #ClimateChange https://t.co/x") == "<user> climatechange <url>"

    def test_www_url(self):
        assert normalize("see www.example.com/page now") == "see <url> now"

    def test_hashtag_keeps_word(self):
        assert normalize("#Housing crisis") == "housing crisis"

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(once) == once

    @given(st.text(max_size=200))
    def test_no_outer_whitespace_or_runs(self, text):
        out = normalize(text)
        assert out == out.strip()
        assert "  " not in out


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_strips_trailing_punct(self):
        assert tokenize("climate change!") == ["climate", "change"]

    def test_internal_apostrophe_kept(self):
        assert tokenize("don't stop") == ["don't", "stop"]

    def test_pure_punct_dropped(self):
        assert tokenize("hello ... !! world") == ["hello", "world"]

    def test_sentinels_pass_through(self):
        assert tokenize("<user> climatechange <url>") == ["<user>", "climatechange", "<url>"]


class TestExtractNgrams:
    def test_enumeration(self):
        assert extract_ngrams(["a", "b", "c"], 2) == ["a", "b", "c", "a b", "b c"]

    def test_empty(self):
        assert extract_ngrams([], 3) == []

    def test_sentinel_blocks_bigrams(self):
        assert extract_ngrams(["a", "<url>", "b"], 2) == ["a", "<url>", "b"]

    def test_bad_n_max(self):
        with pytest.raises(ValueError):
            extract_ngrams(["a"], 0)

    @given(st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), max_size=12))
    def test_unigram_count_equals_token_count(self, tokens):
        assert len(extract_ngrams(tokens, 1)) == len(tokens)

    @given(
        st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), max_size=12),
        st.integers(min_value=1, max_value=4),
    )
    def test_total_count_formula(self, tokens, k):
        # no sentinels present: sum over n of max(0, m-n+1)
        m = len(tokens)
        expected = sum(max(0, m - n + 1) for n in range(1, k + 1))
        assert len(extract_ngrams(tokens, k)) == expected

    def test_surface_roundtrip(self):
        for surface in extract_ngrams(["x", "y", "z"], 3):
            assert " ".join(surface.split(" ")) == surface


class TestIngest:
    def test_basic_counts(self):
        corpus = make_corpus(
            [("1", "hello", "A"), ("2", "there", "A"), ("3", "hi", "B"), ("4", "yo", "B")]
        )
        assert corpus.counts == {"A": 2, "B": 2}
        assert corpus.labels == ("A", "B")

    def test_missing_text_skipped(self):
        lines = [
            json.dumps({"id": "1", "text": "ok", "community": "A"}),
            json.dumps({"id": "2", "community": "A"}),
            json.dumps({"id": "3", "text": "ok", "community": "B"}),
        ]
        corpus = ingest(lines)
        assert corpus.report.skipped == 1
        assert corpus.report.reasons["missing_text"] == 1

    def test_three_communities_fatal(self):
        records = [("1", "x", "A"), ("2", "y", "B"), ("3", "z", "C")]
        with pytest.raises(CorpusError):
            make_corpus(records)

    def test_one_community_fatal(self):
        with pytest.raises(CorpusError):
            make_corpus([("1", "x", "A"), ("2", "y", "A")])

    def test_empty_stream_fatal(self):
        with pytest.raises(CorpusError):
            ingest([])

    def test_duplicate_id_skipped(self):
        corpus = make_corpus([("1", "x", "A"), ("1", "y", "A"), ("2", "z", "B")])
        assert corpus.report.reasons["duplicate_id"] == 1
        assert len(corpus) == 2

    def test_bad_json_and_bad_utf8_skipped(self):
        lines = [
            b'{"id": "1", "text": "ok", "community": "A"}',
            b"{nonsense",
            b'{"id": "2", "text": "\xff\xfe", "community": "B"}'[:20] + b"\xff\n",
            b'{"id": "3", "text": "fine", "community": "B"}',
        ]
        corpus = ingest(lines)
        assert len(corpus) == 2
        assert corpus.report.skipped == 2

    def test_schema_mapping(self):
        lines = [
            json.dumps({"tweet_id": "1", "body": "hello", "party": "A"}),
            json.dumps({"tweet_id": "2", "body": "there", "party": "B"}),
        ]
        schema = RecordSchema(id_field="tweet_id", text_field="body", community_field="party")
        corpus = ingest(lines, schema=schema)
        assert corpus.counts == {"A": 1, "B": 1}

    def test_pinned_labels_rejects_stranger(self):
        lines = [json.dumps({"id": "1", "text": "x", "community": "C"})]
        with pytest.raises(CorpusError):
            ingest(lines, labels=("A", "B"))

    def test_order_stable_and_deterministic(self):
        records = [("1", "a b", "A"), ("2", "c d", "B"), ("3", "e f", "A")]
        c1, c2 = make_corpus(records), make_corpus(records)
        assert [d.doc_id for d in c1.documents] == ["1", "2", "3"]
        assert c1.documents == c2.documents
        assert c1.content_hash == c2.content_hash

    def test_tokens_cached_and_rederivable(self):
        corpus = make_corpus([("1", "Hello WORLD!", "A"), ("2", "x", "B")])
        doc = corpus.documents[0]
        assert doc.tokens == tuple(tokenize(normalize(doc.text)))


class TestFixtureCorpus:
    def test_bundled_fixture_counts(self, fixture_corpus):
        # derived: count lines in the bundled fixture file
        with open(fixture_corpus_path(), "r", encoding="utf-8") as fh:
            per_side = {"crimson": 0, "cobalt": 0}
            for line in fh:
                per_side[json.loads(line)["community"]] += 1
        assert per_side == {"crimson": 2000, "cobalt": 2000}
        assert fixture_corpus.counts == per_side
        assert fixture_corpus.labels == FIXTURE_LABELS
        assert fixture_corpus.report.skipped == 0
