"""N-gram inverted index over a two-community corpus, and the statistics it serves.

The match unit is the document: a posting records that a document contains a
term at least once. Statistics are computed per community: matches per 1,000
documents, usage share, and mean sentiment of matching documents.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    Corpus,
    Document,
    SENTINELS,
    extract_ngrams,
    normalize,
    tokenize,
)
from .sentiment import SentimentLexicon, score

SNAPSHOT_VERSION = 1


class QueryError(ValueError):
    """The query phrase is unusable (e.g. normalizes to nothing)."""


class SnapshotError(RuntimeError):
    """The on-disk index snapshot cannot be used and a rebuild is required."""


@dataclass
class TermStats:
    """Per-community statistics for one term surface.

    ``share`` is None when the term matches nothing; ``sentiment_mean[c]`` is
    None when community ``c`` has no matching documents.
    """

    term: str
    doc_count: dict[str, int]
    rate_per_k: dict[str, float]
    share: dict[str, float] | None
    sentiment_mean: dict[str, float | None]


@dataclass
class ComparativeView:
    """First-community-minus-second deltas with winner labels ('tie' on equality)."""

    higher_rate: str
    rate_delta: float
    higher_sentiment: str | None
    sentiment_delta: float | None


class InvertedIndex:
    """Immutable n-gram index: surface -> per-community sorted posting lists.

    Postings store document positions (offsets into ``corpus.documents``),
    strictly increasing and duplicate-free. Sentiment scores are computed
    once per document at build time.
    """

    def __init__(
        self,
        corpus: Corpus,
        n_max: int,
        postings: dict[str, dict[str, list[int]]],
        sentiment_cache: list[float],
    ):
        self.corpus = corpus
        self.n_max = n_max
        self.postings = postings
        self.sentiment_cache = sentiment_cache

    @property
    def labels(self) -> tuple[str, str]:
        return self.corpus.labels

    @property
    def totals(self) -> dict[str, int]:
        return self.corpus.counts

    def __contains__(self, surface: str) -> bool:
        return surface in self.postings

    def term_count(self) -> int:
        return len(self.postings)

    def document(self, position: int) -> Document:
        return self.corpus.documents[position]

    def matching_positions(self, phrase: str) -> tuple[str, dict[str, list[int]]]:
        """Resolve a raw phrase to (canonical surface, per-community positions).

        Phrases within the indexed order resolve by direct posting lookup.
        Longer phrases, and multi-token phrases containing a <url>/<user>
        sentinel (which are never indexed as multi-grams), fall back to
        intersecting unigram postings and verifying a contiguous token match.
        """
        tokens = tokenize(normalize(phrase))
        if not tokens:
            raise QueryError("empty query")
        surface = " ".join(tokens)
        crosses_sentinel = len(tokens) > 1 and any(t in SENTINELS for t in tokens)
        if len(tokens) <= self.n_max and not crosses_sentinel:
            found = self.postings.get(surface)
            per_label = {
                label: list(found.get(label, [])) if found else []
                for label in self.labels
            }
            return surface, per_label
        return surface, self._scan_phrase(tokens)

    def _scan_phrase(self, tokens: list[str]) -> dict[str, list[int]]:
        candidate: set[int] | None = None
        for tok in tokens:
            posting = self.postings.get(tok)
            if not posting:
                return {label: [] for label in self.labels}
            positions = set()
            for label in self.labels:
                positions.update(posting.get(label, []))
            candidate = positions if candidate is None else candidate & positions
            if not candidate:
                return {label: [] for label in self.labels}
        per_label: dict[str, list[int]] = {label: [] for label in self.labels}
        needle = tuple(tokens)
        for pos in sorted(candidate or ()):
            doc = self.corpus.documents[pos]
            if _contains_contiguous(doc.tokens, needle):
                per_label[doc.community].append(pos)
        return per_label


def _contains_contiguous(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and haystack[i : i + n] == needle:
            return True
    return False


def build_index(corpus: Corpus, n_max: int, lexicon: SentimentLexicon) -> InvertedIndex:
    """Index every n-gram (n <= n_max) and cache one sentiment score per document."""
    for label in corpus.labels:
        if corpus.counts.get(label, 0) == 0:
            raise ValueError(f"community {label!r} has no documents; cannot build index")
    postings: dict[str, dict[str, list[int]]] = {}
    sentiment_cache: list[float] = []
    for position, doc in enumerate(corpus.documents):
        sentiment_cache.append(score(doc.tokens, lexicon))
        seen: set[str] = set()
        for surface in extract_ngrams(doc.tokens, n_max):
            if surface in seen:
                continue
            seen.add(surface)
            slot = postings.setdefault(surface, {})
            slot.setdefault(doc.community, []).append(position)
    return InvertedIndex(corpus, n_max, postings, sentiment_cache)


def stats_from_positions(
    index: InvertedIndex, surface: str, per_label: dict[str, list[int]]
) -> TermStats:
    labels = index.labels
    doc_count = {label: len(per_label.get(label, [])) for label in labels}
    totals = index.totals
    rate_per_k = {label: 1000.0 * doc_count[label] / totals[label] for label in labels}
    matched = sum(doc_count.values())
    share = (
        {label: doc_count[label] / matched for label in labels} if matched > 0 else None
    )
    sentiment_mean: dict[str, float | None] = {}
    for label in labels:
        positions = per_label.get(label, [])
        if positions:
            sentiment_mean[label] = sum(
                index.sentiment_cache[p] for p in positions
            ) / len(positions)
        else:
            sentiment_mean[label] = None
    return TermStats(
        term=surface,
        doc_count=doc_count,
        rate_per_k=rate_per_k,
        share=share,
        sentiment_mean=sentiment_mean,
    )


def term_stats(index: InvertedIndex, phrase: str) -> TermStats:
    """Statistics for a raw user phrase (normalized with the corpus rules)."""
    surface, per_label = index.matching_positions(phrase)
    return stats_from_positions(index, surface, per_label)


def compare(stats: TermStats, labels: tuple[str, str]) -> ComparativeView:
    """First-minus-second comparison of rates and sentiment means."""
    first, second = labels
    rate_delta = stats.rate_per_k[first] - stats.rate_per_k[second]
    if rate_delta > 0:
        higher_rate = first
    elif rate_delta < 0:
        higher_rate = second
    else:
        higher_rate = "tie"
    s1, s2 = stats.sentiment_mean[first], stats.sentiment_mean[second]
    if s1 is None or s2 is None:
        return ComparativeView(higher_rate, rate_delta, None, None)
    sentiment_delta = s1 - s2
    if sentiment_delta > 0:
        higher_sentiment = first
    elif sentiment_delta < 0:
        higher_sentiment = second
    else:
        higher_sentiment = "tie"
    return ComparativeView(higher_rate, rate_delta, higher_sentiment, sentiment_delta)


def save_snapshot(index: InvertedIndex, path: str | Path) -> str:
    """Write a versioned, corpus-hash-stamped snapshot; returns its sha256."""
    payload = {
        "magic": "bdix",
        "format_version": SNAPSHOT_VERSION,
        "corpus_sha256": index.corpus.content_hash,
        "n_max": index.n_max,
        "labels": list(index.labels),
        "counts": index.corpus.counts,
        "documents": [
            [doc.doc_id, doc.text, doc.community] for doc in index.corpus.documents
        ],
        "postings": index.postings,
        "sentiment": index.sentiment_cache,
    }
    raw = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    data = gzip.compress(raw.encode("utf-8"), compresslevel=6, mtime=0)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    import hashlib

    return hashlib.sha256(data).hexdigest()


def load_snapshot(path: str | Path, corpus_hash: str | None = None) -> InvertedIndex:
    """Load a snapshot, refusing on version or corpus-hash mismatch."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"index snapshot not found: {path}")
    try:
        raw = gzip.decompress(path.read_bytes())
        payload = json.loads(raw.decode("utf-8"))
        if payload.get("magic") != "bdix":
            raise SnapshotError(f"not an index snapshot: {path}")
        version = payload.get("format_version")
        if version != SNAPSHOT_VERSION:
            raise SnapshotError(
                f"snapshot format version {version} != {SNAPSHOT_VERSION}; rebuild with 'bd ingest'"
            )
        labels = tuple(payload["labels"])
        documents = [
            Document(
                doc_id=doc_id,
                text=text,
                community=community,
                tokens=tuple(tokenize(normalize(text))),
            )
            for doc_id, text, community in payload["documents"]
        ]
        corpus = Corpus(
            documents=documents,
            labels=labels,  # type: ignore[arg-type]
            counts={k: int(v) for k, v in payload["counts"].items()},
            by_id={doc.doc_id: i for i, doc in enumerate(documents)},
            report=None,  # type: ignore[arg-type]
            content_hash=payload["corpus_sha256"],
        )
        index = InvertedIndex(
            corpus=corpus,
            n_max=int(payload["n_max"]),
            postings=payload["postings"],
            sentiment_cache=[float(s) for s in payload["sentiment"]],
        )
    except SnapshotError:
        raise
    except Exception as exc:
        raise SnapshotError(f"corrupt index snapshot {path}: {exc}") from exc
    if corpus_hash is not None and corpus_hash != index.corpus.content_hash:
        raise SnapshotError(
            f"snapshot at {path} was built from a different corpus; rebuild with 'bd ingest'"
        )
    return index
