"""Corpus ingestion, text normalization, tokenization, and n-gram extraction.

A corpus is a flat list of short documents, each tagged with one of exactly
two community labels. Ingestion reads line-delimited JSON; all text-shaping
rules live here so that every downstream consumer (indexing, sampling,
query parsing, embedding) sees byte-identical token streams.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union
import re

URL_TOKEN = "<url>"
USER_TOKEN = "<user>"
SENTINELS = frozenset({URL_TOKEN, USER_TOKEN})

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_WS_RE = re.compile(r"\s+")


class CorpusError(ValueError):
    """The corpus source is unusable as a whole (not a per-record problem)."""


def normalize(text: str) -> str:
    """Canonicalize raw text: lowercase, URL/@-mention sentinels, bare hashtags.

    Total and idempotent. Whitespace runs collapse to single spaces and the
    ends are stripped.
    """
    text = text.lower()
    text = _URL_RE.sub(f" {URL_TOKEN} ", text)
    text = _MENTION_RE.sub(f" {USER_TOKEN} ", text)
    text = _HASHTAG_RE.sub(r"\1", text)
    text = _WS_RE.sub(" ", text)
    return text.strip()


def _strip_edge_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize(normalized: str) -> list[str]:
    """Split normalized text into tokens.

    Whitespace-delimited; leading/trailing punctuation is stripped from each
    token (internal punctuation like apostrophes survives), pure-punctuation
    tokens are dropped, and the <url>/<user> sentinels pass through intact.
    """
    tokens: list[str] = []
    for raw in normalized.split():
        if raw in SENTINELS:
            tokens.append(raw)
            continue
        tok = _strip_edge_punct(raw)
        if tok:
            tokens.append(tok)
    return tokens


def extract_ngrams(tokens: list[str] | tuple[str, ...], n_max: int) -> list[str]:
    """All contiguous n-grams for n = 1..n_max as space-joined surfaces.

    Returned in document order for each n. Multi-token grams never cross a
    <url>/<user> sentinel (the sentinel itself is still a valid unigram).
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    grams: list[str] = list(tokens)
    for n in range(2, n_max + 1):
        for i in range(len(tokens) - n + 1):
            window = tokens[i : i + n]
            if any(t in SENTINELS for t in window):
                continue
            grams.append(" ".join(window))
    return grams


@dataclass(frozen=True)
class RecordSchema:
    """Field-name mapping from corpus records onto (id, text, community)."""

    id_field: str = "id"
    text_field: str = "text"
    community_field: str = "community"


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    community: str
    tokens: tuple[str, ...]


@dataclass
class IngestReport:
    total_lines: int = 0
    ingested: int = 0
    skipped: int = 0
    reasons: Counter = field(default_factory=Counter)

    def skip(self, reason: str) -> None:
        self.skipped += 1
        self.reasons[reason] += 1


@dataclass
class Corpus:
    """An immutable-after-ingest document collection with exactly two communities."""

    documents: list[Document]
    labels: tuple[str, str]
    counts: dict[str, int]
    by_id: dict[str, int]
    report: IngestReport
    content_hash: str

    def __len__(self) -> int:
        return len(self.documents)


Source = Union[str, Path, Iterable[Union[str, bytes]]]


def _iter_raw_lines(source: Source):
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            yield from fh
    else:
        for line in source:
            yield line.encode("utf-8") if isinstance(line, str) else line


def ingest(
    source: Source,
    schema: RecordSchema | None = None,
    labels: tuple[str, str] | None = None,
) -> Corpus:
    """Read line-delimited JSON records into a Corpus.

    Malformed records (bad UTF-8, bad JSON, missing/ill-typed fields,
    duplicate ids) are skipped and tallied in the report. More than two
    distinct community values, fewer than two, or an empty stream are fatal.

    ``labels`` pins the community slot order; otherwise the two observed
    values are taken in sorted order.
    """
    schema = schema or RecordSchema()
    report = IngestReport()
    hasher = hashlib.sha256()
    documents: list[Document] = []
    by_id: dict[str, int] = {}
    observed: dict[str, int] = {}

    for raw in _iter_raw_lines(source):
        report.total_lines += 1
        hasher.update(raw)
        stripped = raw.strip()
        if not stripped:
            report.skip("blank_line")
            continue
        try:
            line = stripped.decode("utf-8")
        except UnicodeDecodeError:
            report.skip("invalid_utf8")
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            report.skip("bad_json")
            continue
        if not isinstance(record, dict):
            report.skip("bad_json")
            continue
        doc_id = record.get(schema.id_field)
        text = record.get(schema.text_field)
        community = record.get(schema.community_field)
        if not isinstance(doc_id, str) or not doc_id:
            report.skip("missing_id")
            continue
        if not isinstance(text, str):
            report.skip("missing_text")
            continue
        if not isinstance(community, str) or not community:
            report.skip("missing_community")
            continue
        if doc_id in by_id:
            report.skip("duplicate_id")
            continue
        observed[community] = observed.get(community, 0) + 1
        if len(observed) > 2:
            raise CorpusError(
                f"corpus must contain exactly two communities; found {sorted(observed)}"
            )
        if labels is not None and community not in labels:
            raise CorpusError(
                f"community {community!r} not in configured labels {list(labels)}"
            )
        tokens = tuple(tokenize(normalize(text)))
        by_id[doc_id] = len(documents)
        documents.append(Document(doc_id=doc_id, text=text, community=community, tokens=tokens))
        report.ingested += 1

    if report.total_lines == 0:
        raise CorpusError("empty corpus stream")
    if len(observed) < 2:
        raise CorpusError(
            f"corpus must contain exactly two communities; found {sorted(observed)}"
        )

    if labels is None:
        label_pair = tuple(sorted(observed))
    else:
        label_pair = tuple(labels)
    counts = {label: observed.get(label, 0) for label in label_pair}
    return Corpus(
        documents=documents,
        labels=label_pair,  # type: ignore[arg-type]
        counts=counts,
        by_id=by_id,
        report=report,
        content_hash=hasher.hexdigest(),
    )
