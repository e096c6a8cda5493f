from __future__ import annotations

import json

import pytest

from bridgedict.corpus import ingest, normalize, tokenize
from bridgedict.index import build_index
from bridgedict.rag import load_templates
from bridgedict.sentiment import bundled_lexicon_path, load_lexicon, score

FIXTURE_LABELS = ("crimson", "cobalt")
FIXTURE_NAMES = ("Crimson Caucus", "Cobalt Caucus")


def fixture_corpus_path():
    from importlib import resources

    return str(resources.files("bridgedict").joinpath("data", "fixture", "corpus.jsonl"))


@pytest.fixture(scope="session")
def full_lexicon():
    return load_lexicon(bundled_lexicon_path())


@pytest.fixture(scope="session")
def toy_lexicon():
    return load_lexicon(bundled_lexicon_path(toy=True))


@pytest.fixture(scope="session")
def fixture_corpus():
    return ingest(fixture_corpus_path(), labels=FIXTURE_LABELS)


@pytest.fixture(scope="session")
def fixture_index(fixture_corpus, full_lexicon):
    return build_index(fixture_corpus, 3, full_lexicon)


@pytest.fixture(scope="session")
def fixture_docs(fixture_corpus):
    """(community, tokens) pairs re-derived from raw text, for oracle scans."""
    return [
        (doc.community, tokenize(normalize(doc.text)))
        for doc in fixture_corpus.documents
    ]


@pytest.fixture(scope="session")
def fixture_scores(fixture_corpus, full_lexicon):
    """Per-document sentiment recomputed directly, for oracle scans."""
    return [
        score(tokenize(normalize(doc.text)), full_lexicon)
        for doc in fixture_corpus.documents
    ]


@pytest.fixture(scope="session")
def default_templates():
    return load_templates()


def make_corpus(records, labels=None):
    """Corpus from (doc_id, text, community) triples, for small test setups."""
    lines = [
        json.dumps({"id": doc_id, "text": text, "community": community})
        for doc_id, text, community in records
    ]
    return ingest(lines, labels=labels)
