"""Assembly and rendering of the static printable dictionary.

One entry per curated term: a per-community summary pair, alternative
phrasings, and a formatted statistics line. Output is markdown (diff-able)
or a single self-contained HTML file with a print stylesheet. Rendering is
pure, so identical inputs produce identical bytes.
"""

from __future__ import annotations

import html
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

from .curation import CuratedTerm
from .index import InvertedIndex
from .rag import (
    BackendError,
    GenerationCache,
    GenerationRequest,
    InsufficientDataError,
    PromptTemplates,
    cached_generate,
    sample_matches,
)

log = logging.getLogger("bd.paper")


class EditionError(RuntimeError):
    """Nothing could be generated; there is no edition to render."""


@dataclass
class DictionaryEntry:
    term: str
    summaries: tuple[str, str]
    alternatives: list[str]
    stats_line: str
    provenance: tuple[tuple[str, ...], ...]


@dataclass
class PaperEdition:
    title: str
    dataset_description: str
    config_digest: str
    generated_at: str | None
    display_names: tuple[str, str]
    entries: list[DictionaryEntry]
    errata: list[tuple[str, str]]


def format_stats_line(term: CuratedTerm, labels: tuple[str, str], names: tuple[str, str]) -> str:
    parts = []
    for label, name in zip(labels, names):
        rate = term.stats.rate_per_k[label]
        sentiment = term.stats.sentiment_mean[label]
        sent_text = f"{sentiment:+.2f}" if sentiment is not None else "n/a"
        parts.append(f"{name}: {rate:.1f}/1k, sentiment {sent_text}")
    share = term.stats.share
    if share is not None:
        share_text = " / ".join(f"{share[label] * 100:.1f}%" for label in labels)
        parts.append(f"share {share_text}")
    return " — ".join(parts)


def parse_alternatives(output: str, limit: int = 10) -> list[str]:
    """Split a generated alternatives reply into a clean list of phrasings."""
    items: list[str] = []
    for line in output.splitlines():
        line = line.strip().lstrip("-*•").strip()
        if not line:
            continue
        for piece in line.split(","):
            piece = re.sub(r"^\d+[.)]\s*", "", piece.strip()).strip(" .")
            if piece:
                items.append(piece)
    return items[:limit]


def edition_timestamp() -> str | None:
    """Reproducible timestamp: derived from SOURCE_DATE_EPOCH when set, else None."""
    sde = os.environ.get("SOURCE_DATE_EPOCH")
    if not sde:
        return None
    try:
        stamp = int(sde)
    except ValueError:
        return None
    return datetime.fromtimestamp(stamp, tz=timezone.utc).strftime("%Y-%m-%d")


def assemble(
    index: InvertedIndex,
    curated: list[CuratedTerm],
    display_names: tuple[str, str],
    cache: GenerationCache,
    backend,
    templates: PromptTemplates,
    model_id: str,
    seed: int,
    cap: int = 50,
    parallelism: int = 4,
    char_budget: int = 8000,
    sample_char_limit: int = 500,
    max_output_chars: int = 1200,
    config_digest: str = "",
    dataset_description: str = "",
) -> PaperEdition:
    """Generate summaries and alternatives for every curated term.

    Terms whose generation fails end up in the errata list instead of being
    silently dropped. If every term fails, assembly is a fatal error.
    """
    if not curated:
        raise EditionError("no curated terms to assemble")
    labels = index.labels

    def build_one(term: CuratedTerm):
        sets = tuple(
            sample_matches(index, term.term, label, cap, seed) for label in labels
        )
        summaries = []
        provenance: list[tuple[str, ...]] = []
        for sample_set in sets:
            result = cached_generate(
                cache,
                backend,
                GenerationRequest(
                    kind="summary",
                    term=term.term,
                    samples=(sample_set,),
                    model_id=model_id,
                    seed=seed,
                ),
                templates,
                char_budget=char_budget,
                sample_char_limit=sample_char_limit,
                max_output_chars=max_output_chars,
            )
            summaries.append(result.output)
            provenance.append(sample_set.doc_ids)
        alt_result = cached_generate(
            cache,
            backend,
            GenerationRequest(
                kind="alternatives",
                term=term.term,
                samples=sets,
                model_id=model_id,
                seed=seed,
            ),
            templates,
            char_budget=char_budget,
            sample_char_limit=sample_char_limit,
            max_output_chars=max_output_chars,
        )
        return DictionaryEntry(
            term=term.term,
            summaries=(summaries[0], summaries[1]),
            alternatives=parse_alternatives(alt_result.output),
            stats_line=format_stats_line(term, labels, display_names),
            provenance=tuple(provenance),
        )

    entries: list[DictionaryEntry] = []
    errata: list[tuple[str, str]] = []
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = {pool.submit(build_one, term): term for term in curated}
        for future, term in futures.items():
            try:
                entries.append(future.result())
            except (BackendError, InsufficientDataError) as exc:
                log.warning("generation failed for %r: %s", term.term, exc)
                errata.append((term.term, str(exc)))
    if not entries:
        details = "; ".join(f"{t}: {reason}" for t, reason in errata)
        raise EditionError(f"all generations failed: {details}")
    entries.sort(key=lambda e: e.term)
    errata.sort(key=lambda pair: pair[0])
    return PaperEdition(
        title="Bridging Dictionary: Paper Edition",
        dataset_description=dataset_description,
        config_digest=config_digest,
        generated_at=edition_timestamp(),
        display_names=display_names,
        entries=entries,
        errata=errata,
    )


def render(edition: PaperEdition, fmt: str) -> bytes:
    """Render an edition to 'markdown' or 'html' bytes, deterministically."""
    if fmt == "markdown":
        return _render_markdown(edition).encode("utf-8")
    if fmt == "html":
        return _render_html(edition).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r} (expected 'markdown' or 'html')")


def _front_matter_lines(edition: PaperEdition) -> list[str]:
    lines = []
    if edition.dataset_description:
        lines.append(edition.dataset_description)
    if edition.generated_at:
        lines.append(f"Generated {edition.generated_at}.")
    lines.append(f"Curation settings digest: `{edition.config_digest}`.")
    lines.append(f"{len(edition.entries)} terms.")
    return lines


def _render_markdown(edition: PaperEdition) -> str:
    out = [f"# {edition.title}", ""]
    out.extend(_front_matter_lines(edition))
    out.append("")
    for entry in edition.entries:
        out.append(f"## {entry.term}")
        out.append("")
        out.append(f"*{entry.stats_line}*")
        out.append("")
        for name, summary in zip(edition.display_names, entry.summaries):
            out.append(f"**{name}:** {summary}")
            out.append("")
        if entry.alternatives:
            out.append(f"**Alternatives:** {', '.join(entry.alternatives)}")
            out.append("")
    if edition.errata:
        out.append("## Errata")
        out.append("")
        for term, reason in edition.errata:
            out.append(f"- {term}: generation failed ({reason})")
        out.append("")
    return "\n".join(out)


_HTML_STYLE = """
body { font-family: Georgia, 'Times New Roman', serif; max-width: 46rem;
       margin: 2rem auto; padding: 0 1rem; color: #1a1a1a; }
h1 { border-bottom: 2px solid #1a1a1a; padding-bottom: .3rem; }
h2 { margin-top: 1.6rem; margin-bottom: .2rem; }
.front { color: #444; font-size: .95rem; }
.stats { color: #555; font-style: italic; margin: .2rem 0 .6rem; }
.group { margin: .35rem 0; }
.group b { font-variant: small-caps; }
.alts { margin: .35rem 0; color: #333; }
.errata { margin-top: 2rem; color: #7a2020; }
@media print {
  body { max-width: none; margin: 0.5in; font-size: 11pt; }
  h2 { page-break-after: avoid; }
  .entry { page-break-inside: avoid; }
}
"""


def _render_html(edition: PaperEdition) -> str:
    esc = html.escape
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(edition.title)}</title>",
        f"<style>{_HTML_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>{esc(edition.title)}</h1>",
        '<div class="front">',
    ]
    for line in _front_matter_lines(edition):
        parts.append(f"<p>{esc(line)}</p>")
    parts.append("</div>")
    for entry in edition.entries:
        parts.append('<div class="entry">')
        parts.append(f"<h2>{esc(entry.term)}</h2>")
        parts.append(f'<div class="stats">{esc(entry.stats_line)}</div>')
        for name, summary in zip(edition.display_names, entry.summaries):
            parts.append(f'<div class="group"><b>{esc(name)}</b>: {esc(summary)}</div>')
        if entry.alternatives:
            alts = ", ".join(esc(a) for a in entry.alternatives)
            parts.append(f'<div class="alts"><b>Alternatives</b>: {alts}</div>')
        parts.append("</div>")
    if edition.errata:
        parts.append('<div class="errata"><h2>Errata</h2><ul>')
        for term, reason in edition.errata:
            parts.append(f"<li>{esc(term)}: generation failed ({esc(reason)})</li>")
        parts.append("</ul></div>")
    parts.append("</body>")
    parts.append("</html>")
    return "\n".join(parts)
