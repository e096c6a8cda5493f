"""Command line entry points: ingest, curate, paper, serve, query.

Exit codes: 0 ok, 2 missing input, 3 corrupt artifact, 4 generation
failure, 5 bind failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import AppConfig, ConfigError, apply_overrides, load_config, override_flags
from .corpus import CorpusError, ingest
from .curation import curate, read_curated, write_curated
from .index import (
    QueryError,
    SnapshotError,
    build_index,
    compare,
    load_snapshot,
    save_snapshot,
    term_stats,
)
from .paper_edition import EditionError, assemble, render
from .rag import GenerationCache, load_templates, select_backend
from .sentiment import LexiconError, bundled_lexicon_path, load_lexicon
from .server import App, BindError, make_server, serve_forever

log = logging.getLogger("bd")

EXIT_OK = 0
EXIT_MISSING_INPUT = 2
EXIT_CORRUPT = 3
EXIT_GENERATION = 4
EXIT_BIND = 5


class MissingInputError(FileNotFoundError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    # shared flags accepted both before and after the subcommand; SUPPRESS
    # keeps the subparser from clobbering values parsed by the main parser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="path to a TOML config file (or set BD_CONFIG)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    for dotted in override_flags():
        common.add_argument(f"--{dotted}", dest=f"set::{dotted}", metavar="VALUE")

    parser = argparse.ArgumentParser(
        prog="bd",
        description="Two-community corpus statistics and generative dictionary.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="build the index snapshot from the corpus")
    sub.add_parser(
        "curate", parents=[common], help="select divergent terms and write curated-terms.jsonl"
    )
    sub.add_parser(
        "paper", parents=[common], help="render the printable dictionary (markdown + html)"
    )
    sub.add_parser("serve", parents=[common], help="run the HTTP JSON API")
    query = sub.add_parser("query", parents=[common], help="print statistics for one term")
    query.add_argument("term", help="term or phrase to look up")
    return parser


def _load_app_config(args) -> AppConfig:
    config_path = getattr(args, "config", None) or os.environ.get("BD_CONFIG")
    config = load_config(config_path)
    overrides = {
        key[len("set::") :]: value
        for key, value in vars(args).items()
        if key.startswith("set::") and value is not None
    }
    return apply_overrides(config, overrides)


def _load_lexicon(config: AppConfig):
    if config.lexicon_path:
        path = config.resolve(config.lexicon_path)
        if not path.exists():
            raise MissingInputError(f"lexicon file not found: {path}")
        return load_lexicon(path)
    return load_lexicon(bundled_lexicon_path())


def _load_index(config: AppConfig):
    snapshot = config.resolve(config.paths.index_snapshot)
    if not snapshot.exists():
        raise MissingInputError(
            f"index snapshot not found: {snapshot} (run 'bd ingest' first)"
        )
    corpus_path = config.resolve(config.corpus_path)
    expected = None
    if corpus_path.exists():
        import hashlib

        expected = hashlib.sha256(corpus_path.read_bytes()).hexdigest()
    return load_snapshot(snapshot, corpus_hash=expected)


def cmd_ingest(config: AppConfig) -> int:
    corpus_path = config.resolve(config.corpus_path)
    if not corpus_path.exists():
        raise MissingInputError(f"corpus file not found: {corpus_path}")
    lexicon = _load_lexicon(config)
    corpus = ingest(corpus_path, schema=config.schema, labels=config.communities.labels)
    index = build_index(corpus, config.n_max, lexicon)
    snapshot_path = config.resolve(config.paths.index_snapshot)
    digest = save_snapshot(index, snapshot_path)
    names = config.display_names()
    print(f"ingested {len(corpus)} documents from {corpus_path}")
    for label, name in zip(corpus.labels, names):
        print(f"  {name} ({label}): {corpus.counts[label]} documents")
    print(f"  skipped: {corpus.report.skipped}")
    if corpus.report.reasons:
        for reason, count in sorted(corpus.report.reasons.items()):
            print(f"    {reason}: {count}")
    print(f"  distinct terms (n<={config.n_max}): {index.term_count()}")
    print(f"  snapshot: {snapshot_path} (sha256 {digest[:12]})")
    return EXIT_OK


def cmd_curate(config: AppConfig) -> int:
    index = _load_index(config)
    terms = curate(index, config.curation)
    out_path = config.resolve(config.paths.output_dir) / "curated-terms.jsonl"
    write_curated(terms, out_path)
    print(f"curated {len(terms)} terms -> {out_path}")
    if not terms:
        print("warning: no terms passed the thresholds (valid, but nothing to render)")
    for t in terms[:10]:
        gap = f", gap {t.score.sent_gap:.2f}" if t.score.sent_gap is not None else ""
        print(f"  {t.term}  (z {t.score.freq_z:+.2f}{gap}, {t.score.trigger})")
    return EXIT_OK


def cmd_paper(config: AppConfig) -> int:
    index = _load_index(config)
    curated_path = config.resolve(config.paths.output_dir) / "curated-terms.jsonl"
    if not curated_path.exists():
        raise MissingInputError(
            f"curated terms file not found: {curated_path} (run 'bd curate' first)"
        )
    curated = read_curated(curated_path)
    if not curated:
        raise MissingInputError(f"curated terms file is empty: {curated_path}")
    cache = GenerationCache(config.resolve(config.paths.cache))
    backend = select_backend()
    templates = load_templates(
        config.resolve(config.paths.templates) if config.paths.templates else None
    )
    edition = assemble(
        index,
        curated,
        config.display_names(),
        cache,
        backend,
        templates,
        model_id=config.rag.model_id,
        seed=config.rag.seed,
        cap=config.rag.cap,
        parallelism=config.rag.parallelism,
        char_budget=config.rag.prompt_char_budget,
        sample_char_limit=config.rag.sample_char_limit,
        max_output_chars=config.rag.max_output_chars,
        config_digest=config.digest(),
        dataset_description=f"Corpus: {config.corpus_path}",
    )
    out_dir = config.resolve(config.paths.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    md_path = out_dir / "bridging-dictionary.md"
    html_path = out_dir / "bridging-dictionary.html"
    md_path.write_bytes(render(edition, "markdown"))
    html_path.write_bytes(render(edition, "html"))
    print(f"wrote {md_path}")
    print(f"wrote {html_path}")
    print(f"  entries: {len(edition.entries)}, errata: {len(edition.errata)}")
    return EXIT_OK


def cmd_serve(config: AppConfig) -> int:
    index = _load_index(config)
    cache = GenerationCache(config.resolve(config.paths.cache))
    backend = select_backend()
    templates = load_templates(
        config.resolve(config.paths.templates) if config.paths.templates else None
    )
    app = App(config, index, cache, backend, templates)
    server = make_server(app)
    print(f"listening on http://{config.server.host}:{server.server_address[1]}/")
    serve_forever(server)
    return EXIT_OK


def cmd_query(config: AppConfig, term: str) -> int:
    index = _load_index(config)
    stats = term_stats(index, term)
    view = compare(stats, index.labels)
    names = dict(zip(index.labels, config.display_names()))
    width = max(len(n) for n in names.values()) + 2
    print(f"term: {stats.term}")
    header = f"{'':<{width}}{'docs':>8}{'per 1k':>9}{'share':>8}{'sentiment':>11}"
    print(header)
    for label in index.labels:
        share = f"{stats.share[label]:.3f}" if stats.share else "-"
        sent = (
            f"{stats.sentiment_mean[label]:+.2f}"
            if stats.sentiment_mean[label] is not None
            else "-"
        )
        print(
            f"{names[label]:<{width}}{stats.doc_count[label]:>8}"
            f"{stats.rate_per_k[label]:>9.1f}{share:>8}{sent:>11}"
        )
    if view.higher_rate == "tie":
        print("rate: tie")
    else:
        print(f"rate: higher for {names[view.higher_rate]} (delta {view.rate_delta:+.1f})")
    if view.higher_sentiment is None:
        print("sentiment: not comparable")
    elif view.higher_sentiment == "tie":
        print("sentiment: tie")
    else:
        print(
            f"sentiment: higher for {names[view.higher_sentiment]}"
            f" (delta {view.sentiment_delta:+.2f})"
        )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        config = _load_app_config(args)
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "curate":
            return cmd_curate(config)
        if args.command == "paper":
            return cmd_paper(config)
        if args.command == "serve":
            return cmd_serve(config)
        if args.command == "query":
            return cmd_query(config, args.term)
        raise AssertionError(f"unhandled command {args.command}")
    except (MissingInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (SnapshotError, CorpusError, LexiconError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (EditionError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except BindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BIND
    except (ConfigError, QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT


if __name__ == "__main__":
    sys.exit(main())
