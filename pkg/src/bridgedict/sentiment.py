"""Rule-based valence scoring with a short negation window.

One score per document: the mean valence of lexicon hits, with a hit's sign
flipped when a negator occurs in the two preceding tokens. Dependency-free
and fully deterministic so scores can be cached at index build time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from importlib import resources

log = logging.getLogger("bd.sentiment")

NEGATION_WINDOW = 2


class LexiconError(ValueError):
    """A lexicon row is unusable (e.g. valence out of range)."""


@dataclass(frozen=True)
class SentimentLexicon:
    entries: dict[str, float]
    negators: frozenset[str]
    warnings: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)


def _iter_lines(source: Union[str, Path, Iterable[str]]):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def load_lexicon(source: Union[str, Path, Iterable[str]]) -> SentimentLexicon:
    """Parse a tab-separated ``token<TAB>valence`` table.

    Lines starting with ``#`` are comments. A ``[negators]`` section header
    switches to one-bare-token-per-line negator entries. Duplicate tokens:
    last row wins, with a warning. Valence outside [-1, 1] is fatal.
    """
    entries: dict[str, float] = {}
    negators: set[str] = set()
    warnings: list[str] = []
    in_negators = False
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[negators]":
            in_negators = True
            continue
        if in_negators:
            negators.add(line.lower())
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"line {lineno}: expected 'token<TAB>valence', got {line!r}")
        token, valence_text = parts[0].strip().lower(), parts[1].strip()
        try:
            valence = float(valence_text)
        except ValueError as exc:
            raise LexiconError(f"line {lineno}: bad valence {valence_text!r}") from exc
        if not -1.0 <= valence <= 1.0:
            raise LexiconError(
                f"line {lineno}: valence {valence} for {token!r} outside [-1, 1]"
            )
        if token in entries:
            msg = f"line {lineno}: duplicate token {token!r}; keeping last value {valence}"
            warnings.append(msg)
            log.warning("%s", msg)
        entries[token] = valence
    return SentimentLexicon(entries=entries, negators=frozenset(negators), warnings=tuple(warnings))


def bundled_lexicon_path(toy: bool = False) -> Path:
    name = "toy_lexicon.tsv" if toy else "valence_lexicon.tsv"
    return Path(str(resources.files("bridgedict").joinpath("data", name)))


def score(tokens: Iterable[str], lexicon: SentimentLexicon) -> float:
    """Mean valence of lexicon hits in [-1, 1]; 0.0 when nothing matches.

    A hit's valence is negated if any of the two preceding tokens is a
    negator. Zero-valence entries are not hits: they exist to mark tokens
    (typically negators) as known-neutral and never move the score.
    """
    toks = list(tokens)
    hits: list[float] = []
    for i, tok in enumerate(toks):
        valence = lexicon.entries.get(tok)
        if valence is None or valence == 0.0:
            continue
        window = toks[max(0, i - NEGATION_WINDOW) : i]
        if any(t in lexicon.negators for t in window):
            valence = -valence
        hits.append(valence)
    if not hits:
        return 0.0
    value = sum(hits) / len(hits)
    return max(-1.0, min(1.0, value))
