#!/usr/bin/env python3
"""Record API responses from the fixture corpus into frontend test fixtures.

Builds the index in-process (stub backend, fixed seed), calls the same
handlers the HTTP server routes to, and writes one JSON file per recorded
response under frontend/fixtures/. The frontend test suite runs entirely
from these files, with no engine running.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from bridgedict.config import AppConfig, CommunitiesConfig, PathsConfig  # noqa: E402
from bridgedict.corpus import ingest  # noqa: E402
from bridgedict.curation import CurationConfig, curate, write_curated  # noqa: E402
from bridgedict.index import build_index  # noqa: E402
from bridgedict.rag import GenerationCache, StubBackend, load_templates  # noqa: E402
from bridgedict.sentiment import bundled_lexicon_path, load_lexicon  # noqa: E402
from bridgedict.server import ApiError, App  # noqa: E402

OUT_DIR = REPO / "frontend" / "fixtures"

RECORDINGS = [
    ("health.json", "handle_health", {}),
    ("stats_festival.json", "handle_stats", {"term": ["festival"]}),
    ("stats_moonshot.json", "handle_stats", {"term": ["moonshot"]}),
    ("stats_pipeline_reform.json", "handle_stats", {"term": ["pipeline reform"]}),
    ("stats_quasar.json", "handle_stats", {"term": ["quasar"]}),
    ("stats_absent.json", "handle_stats", {"term": ["unicornword"]}),
    ("summary_festival_1.json", "handle_summary", {"term": ["festival"], "community": ["1"]}),
    ("summary_festival_2.json", "handle_summary", {"term": ["festival"], "community": ["2"]}),
    ("definition_festival_1.json", "handle_definition", {"term": ["festival"], "community": ["1"]}),
    ("definition_festival_2.json", "handle_definition", {"term": ["festival"], "community": ["2"]}),
    ("alternatives_festival.json", "handle_alternatives", {"term": ["festival"]}),
    ("scatter_economy.json", "handle_scatter", {"term": ["economy"]}),
    ("samples_festival_1.json", "handle_samples", {"term": ["festival"], "community": ["1"]}),
    ("samples_festival_2.json", "handle_samples", {"term": ["festival"], "community": ["2"]}),
    ("samples_economy_1.json", "handle_samples", {"term": ["economy"], "community": ["1"]}),
    ("samples_economy_2.json", "handle_samples", {"term": ["economy"], "community": ["2"]}),
    ("curated.json", "handle_curated", {}),
]


def main() -> None:
    import tempfile

    workdir = Path(tempfile.mkdtemp(prefix="bd-fixtures-"))
    corpus_path = REPO / "src" / "bridgedict" / "data" / "fixture" / "corpus.jsonl"
    corpus = ingest(corpus_path, labels=("crimson", "cobalt"))
    index = build_index(corpus, 3, load_lexicon(bundled_lexicon_path()))
    write_curated(curate(index, CurationConfig()), workdir / "out" / "curated-terms.jsonl")
    config = AppConfig(
        corpus_path=str(corpus_path),
        communities=CommunitiesConfig(
            labels=("crimson", "cobalt"), names=("Crimson Caucus", "Cobalt Caucus")
        ),
        paths=PathsConfig(output_dir="out", cache="out/bd-cache.sqlite"),
        base_dir=str(workdir),
    )
    app = App(
        config,
        index,
        GenerationCache(workdir / "out" / "bd-cache.sqlite"),
        StubBackend(),
        load_templates(),
    )

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for filename, handler_name, params in RECORDINGS:
        handler = getattr(app, handler_name)
        try:
            body = handler(params)
        except ApiError as exc:
            body = {"error": exc.message, "code": exc.code, "_status": exc.status}
        (OUT_DIR / filename).write_text(
            json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"wrote frontend/fixtures/{filename}")

    # error-shape fixtures the UI needs for degradation tests
    (OUT_DIR / "error_500.json").write_text(
        json.dumps({"error": "internal error: induced", "code": "internal"}, indent=2) + "\n"
    )
    print("wrote frontend/fixtures/error_500.json")


if __name__ == "__main__":
    main()
