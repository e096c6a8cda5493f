"""Selection of terms the two communities use at significantly different rates or tones.

A term qualifies when it occurs sufficiently often in BOTH communities and
diverges in usage frequency (smoothed log-odds z-score) or in mean sentiment
(absolute gap). All thresholds are editor-tunable via ``CurationConfig``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .index import InvertedIndex, TermStats, stats_from_positions


@dataclass(frozen=True)
class CurationConfig:
    min_rate_per_k: float = 0.5
    min_docs: int = 20
    freq_z_threshold: float = 3.0
    sent_gap_threshold: float = 0.35
    sent_min_docs: int = 30
    prior_alpha: float = 0.5
    n_max: int = 3
    max_terms: int | None = None
    subsumption_filter: bool = True


@dataclass(frozen=True)
class DivergenceScore:
    freq_z: float
    sent_gap: float | None
    trigger: str  # "frequency" | "sentiment" | "both"


@dataclass(frozen=True)
class CuratedTerm:
    term: str
    stats: TermStats = field(compare=False)
    score: DivergenceScore = field(compare=False)
    rank_key: float = 0.0


def log_odds_z(y1: int, n1: int, y2: int, n2: int, alpha: float) -> float:
    """z-score of the alpha-smoothed log-odds ratio of two document frequencies.

    delta = ln((y1+a)/(n1-y1+a)) - ln((y2+a)/(n2-y2+a)), divided by the
    estimated standard deviation sqrt(1/(y1+a) + 1/(y2+a)). Positive values
    mean the first community uses the term more.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not (n1 >= y1 >= 0) or not (n2 >= y2 >= 0):
        raise ValueError(f"need n >= y >= 0; got y1={y1} n1={n1} y2={y2} n2={n2}")
    delta = math.log((y1 + alpha) / (n1 - y1 + alpha)) - math.log(
        (y2 + alpha) / (n2 - y2 + alpha)
    )
    sigma = math.sqrt(1.0 / (y1 + alpha) + 1.0 / (y2 + alpha))
    return delta / sigma


def sentiment_gap(stats: TermStats, config: CurationConfig, labels: tuple[str, str]) -> float | None:
    """Absolute gap between community sentiment means, or None below the doc floor."""
    first, second = labels
    if (
        stats.doc_count[first] < config.sent_min_docs
        or stats.doc_count[second] < config.sent_min_docs
    ):
        return None
    s1, s2 = stats.sentiment_mean[first], stats.sentiment_mean[second]
    if s1 is None or s2 is None:
        return None
    return abs(s1 - s2)


def candidates(index: InvertedIndex, config: CurationConfig) -> list[str]:
    """Indexed terms that clear the per-community sufficiency floors, sorted."""
    if index.n_max < config.n_max:
        raise ValueError(
            f"index built with n_max={index.n_max} < configured n_max={config.n_max}"
        )
    labels = index.labels
    totals = index.totals
    out: list[str] = []
    for surface, posting in index.postings.items():
        if len(surface.split(" ")) > config.n_max:
            continue
        ok = True
        for label in labels:
            count = len(posting.get(label, []))
            if count < config.min_docs:
                ok = False
                break
            if 1000.0 * count / totals[label] < config.min_rate_per_k:
                ok = False
                break
        if ok:
            out.append(surface)
    out.sort()
    return out


def _token_sublist(short: list[str], long: list[str]) -> bool:
    n, m = len(short), len(long)
    if n >= m:
        return False
    return any(long[i : i + n] == short for i in range(m - n + 1))


def curate(index: InvertedIndex, config: CurationConfig) -> list[CuratedTerm]:
    """Full curation pass: sufficiency, significance, subsumption, ranking.

    Deterministic: identical index and config produce an identical list.
    """
    labels = index.labels
    first, second = labels
    totals = index.totals
    selected: list[CuratedTerm] = []
    for surface in candidates(index, config):
        posting = index.postings[surface]
        per_label = {label: posting.get(label, []) for label in labels}
        stats = stats_from_positions(index, surface, per_label)
        z = log_odds_z(
            stats.doc_count[first],
            totals[first],
            stats.doc_count[second],
            totals[second],
            config.prior_alpha,
        )
        gap = sentiment_gap(stats, config, labels)
        freq_hit = abs(z) >= config.freq_z_threshold
        sent_hit = gap is not None and gap >= config.sent_gap_threshold
        if not freq_hit and not sent_hit:
            continue
        trigger = "both" if (freq_hit and sent_hit) else ("frequency" if freq_hit else "sentiment")
        rank_key = abs(z) + (gap if gap is not None else 0.0)
        selected.append(
            CuratedTerm(
                term=surface,
                stats=stats,
                score=DivergenceScore(freq_z=z, sent_gap=gap, trigger=trigger),
                rank_key=rank_key,
            )
        )

    if config.subsumption_filter:
        kept: list[CuratedTerm] = []
        token_lists = {t.term: t.term.split(" ") for t in selected}
        for t in selected:
            subsumed = any(
                u is not t
                and len(token_lists[u.term]) > len(token_lists[t.term])
                and _token_sublist(token_lists[t.term], token_lists[u.term])
                and abs(u.score.freq_z) >= abs(t.score.freq_z)
                for u in selected
            )
            if not subsumed:
                kept.append(t)
        selected = kept

    selected.sort(key=lambda t: (-t.rank_key, t.term))
    if config.max_terms is not None:
        selected = selected[: config.max_terms]
    return selected


def curated_to_record(term: CuratedTerm) -> dict:
    return {
        "term": term.term,
        "doc_count": term.stats.doc_count,
        "rate_per_k": term.stats.rate_per_k,
        "share": term.stats.share,
        "sentiment_mean": term.stats.sentiment_mean,
        "freq_z": term.score.freq_z,
        "sent_gap": term.score.sent_gap,
        "trigger": term.score.trigger,
        "rank_key": term.rank_key,
    }


def curated_from_record(record: dict) -> CuratedTerm:
    stats = TermStats(
        term=record["term"],
        doc_count={k: int(v) for k, v in record["doc_count"].items()},
        rate_per_k={k: float(v) for k, v in record["rate_per_k"].items()},
        share=(
            {k: float(v) for k, v in record["share"].items()}
            if record.get("share") is not None
            else None
        ),
        sentiment_mean={
            k: (float(v) if v is not None else None)
            for k, v in record["sentiment_mean"].items()
        },
    )
    return CuratedTerm(
        term=record["term"],
        stats=stats,
        score=DivergenceScore(
            freq_z=float(record["freq_z"]),
            sent_gap=(float(record["sent_gap"]) if record.get("sent_gap") is not None else None),
            trigger=record["trigger"],
        ),
        rank_key=float(record["rank_key"]),
    )


def write_curated(terms: list[CuratedTerm], path: str | Path) -> None:
    """One CuratedTerm per line as JSON, stable key order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for term in terms:
            fh.write(json.dumps(curated_to_record(term), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def read_curated(path: str | Path) -> list[CuratedTerm]:
    terms = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                terms.append(curated_from_record(json.loads(line)))
    return terms
