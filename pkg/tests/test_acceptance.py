"""Acceptance suite: one test per primary criterion, one PASS/FAIL line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines. Each check is self-contained and uses the independent oracles from
tests/oracles.py; none reuses the code path it verifies.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import socket
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import httpx
import numpy as np
import pytest

from bridgedict.corpus import ingest
from bridgedict.curation import CurationConfig, curate, log_odds_z
from bridgedict.index import build_index, term_stats
from bridgedict.rag import (
    GenerationRequest,
    build_prompt,
    prompt_is_blind,
    sample_matches,
)
from bridgedict.scatter import cluster, project_2d
from bridgedict.sentiment import bundled_lexicon_path, load_lexicon
from conftest import FIXTURE_LABELS, FIXTURE_NAMES, fixture_corpus_path
from oracles import (
    brute_curate,
    dbscan_oracle,
    decimal_log_odds_z,
    scan_term_stats,
    top2_covariance_eigenvalues,
)

PLANTED = {"moonshot", "pipeline reform", "festival"}

PROBE_TERMS = [
    "moonshot", "pipeline reform", "festival", "borderline", "quasar",
    "ballot", "economy", "meadow", "the", "budget",
    "library", "city council", "the city council", "tax", "storm",
    "forecast", "joyful", "dreadful", "<url>", "<user>",
    "don't", "unicornword", "crimson", "update", "numbers quarter",
]


@contextmanager
def criterion(name: str):
    try:
        yield
    except Exception:
        print(f"FAIL: {name}")
        raise
    print(f"PASS: {name}")


def test_statistics_oracle(fixture_index, fixture_docs):
    with criterion("statistics oracle: 25 probe terms match brute-force scan (< 5 s)"):
        assert len(PROBE_TERMS) == 25
        started = time.monotonic()
        for phrase in PROBE_TERMS:
            counts, rates, share, _ = scan_term_stats(fixture_docs, FIXTURE_LABELS, phrase)
            stats = term_stats(fixture_index, phrase)
            assert stats.doc_count == counts, phrase
            for label in FIXTURE_LABELS:
                assert abs(stats.rate_per_k[label] - rates[label]) <= 1e-9, phrase
            if share is None:
                assert stats.share is None, phrase
            else:
                for label in FIXTURE_LABELS:
                    assert abs(stats.share[label] - share[label]) <= 1e-9, phrase
        elapsed = time.monotonic() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_matches_per_thousand_definition(fixture_index):
    with criterion("matches-per-thousand: 3 matches in 2000 docs reports exactly 1.5"):
        stats = term_stats(fixture_index, "quasar")
        assert stats.doc_count["crimson"] == 3
        assert fixture_index.totals["crimson"] == 2000
        assert stats.rate_per_k["crimson"] == 1.5  # exact float equality
        assert stats.doc_count["cobalt"] == 0
        assert stats.rate_per_k["cobalt"] == 0.0


def test_curation_determinism_and_monotonicity(fixture_index, fixture_docs, fixture_scores):
    with criterion(
        "curation: exactly the 3 planted terms (brute-force verified), "
        "threshold monotonicity, community-swap invariance (< 10 s)"
    ):
        started = time.monotonic()
        cfg = CurationConfig()

        selected = curate(fixture_index, cfg)
        assert {t.term for t in selected} == PLANTED

        oracle_set = brute_curate(fixture_docs, FIXTURE_LABELS, fixture_scores, cfg)
        assert oracle_set == PLANTED

        again = curate(fixture_index, cfg)
        assert [dataclasses.asdict(t) for t in again] == [
            dataclasses.asdict(t) for t in selected
        ]

        base_terms = {t.term for t in selected}
        for change in (
            {"min_rate_per_k": 2.0},
            {"min_docs": 40},
            {"freq_z_threshold": 4.0},
            {"freq_z_threshold": 7.3},
            {"sent_gap_threshold": 0.8},
            {"sent_gap_threshold": 2.0},
            {"sent_min_docs": 61},
        ):
            tightened = dataclasses.replace(cfg, **change)
            assert {t.term for t in curate(fixture_index, tightened)} <= base_terms, change

        lines = [
            json.dumps({"id": d.doc_id, "text": d.text, "community": d.community})
            for d in fixture_index.corpus.documents
        ]
        swapped_corpus = ingest(lines, labels=(FIXTURE_LABELS[1], FIXTURE_LABELS[0]))
        swapped_index = build_index(swapped_corpus, 3, load_lexicon(bundled_lexicon_path()))
        swapped = curate(swapped_index, cfg)
        assert {t.term for t in swapped} == base_terms
        original_z = {t.term: t.score.freq_z for t in selected}
        for t in swapped:
            assert abs(t.score.freq_z + original_z[t.term]) <= 1e-12

        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_log_odds_golden_values():
    with criterion("log-odds z: 5 golden tuples match decimal oracle within 1e-12"):
        cases = [
            (30, 1000, 10, 1000, 0.5),
            (10, 1000, 30, 1000, 0.5),
            (50, 500, 50, 500, 1.0),
            (3, 2000, 0, 2000, 0.5),
            (150, 2000, 40, 2000, 0.5),
        ]
        for case in cases:
            assert abs(log_odds_z(*case) - decimal_log_odds_z(*case)) <= 1e-12, case
        assert log_odds_z(*cases[2]) == 0.0
        assert abs(log_odds_z(*cases[0]) + log_odds_z(*cases[1])) <= 1e-12


def test_sampling_contract(fixture_index):
    with criterion("sampling: cap at 50 of 200 matches, 100-run determinism, full list under cap"):
        baseline = sample_matches(fixture_index, "ballot", "crimson", cap=50, seed=99)
        assert len(fixture_index.postings["ballot"]["crimson"]) == 200
        assert len(baseline) == 50
        for _ in range(100):
            rerun = sample_matches(fixture_index, "ballot", "crimson", cap=50, seed=99)
            assert rerun.doc_ids == baseline.doc_ids
        full = sample_matches(fixture_index, "economy", "crimson", cap=50, seed=99)
        posting = fixture_index.postings["economy"]["crimson"]
        assert len(full) == len(posting) == 30
        assert set(full.doc_ids) == {
            fixture_index.document(p).doc_id for p in posting
        }


def test_blindness(fixture_index, default_templates):
    with criterion(
        "blindness: no community name/label in any fixture text nor in any "
        "prompt over all terms x communities x kinds"
    ):
        forbidden = list(FIXTURE_NAMES) + list(FIXTURE_LABELS)
        for doc in fixture_index.corpus.documents:
            lowered = doc.text.lower()
            assert not any(f.lower() in lowered for f in forbidden), doc.doc_id

        checked = 0
        for surface in fixture_index.postings:
            sets = {
                label: sample_matches(fixture_index, surface, label, cap=5, seed=3)
                for label in FIXTURE_LABELS
            }
            for label, sample_set in sets.items():
                if len(sample_set) == 0:
                    continue
                for kind in ("summary", "definition"):
                    request = GenerationRequest(
                        kind=kind, term=surface, samples=(sample_set,),
                        model_id="gpt-3.5-turbo", seed=3,
                    )
                    prompt = build_prompt(request, default_templates)
                    assert prompt_is_blind(prompt, forbidden), (surface, kind, label)
                    checked += 1
            if all(len(s) > 0 for s in sets.values()):
                request = GenerationRequest(
                    kind="alternatives", term=surface,
                    samples=tuple(sets[label] for label in FIXTURE_LABELS),
                    model_id="gpt-3.5-turbo", seed=3,
                )
                prompt = build_prompt(request, default_templates)
                assert prompt_is_blind(prompt, forbidden), (surface, "alternatives")
                checked += 1
        assert checked > 5000  # every indexed term contributes


def test_pca_oracle():
    with criterion("PCA: captured variance matches eigendecomposition (1e-9), translation invariant (1e-12)"):
        rng = np.random.default_rng(20260808)
        for _ in range(20):
            batch = rng.normal(size=(50, 10))
            coords = project_2d(batch)
            captured = float(coords.var(axis=0, ddof=1).sum())
            top1, top2 = top2_covariance_eigenvalues(batch)
            assert abs(captured - (top1 + top2)) <= 1e-9
            shift = rng.normal(size=(1, 10)) * 50.0
            moved = project_2d(batch + shift)
            assert float(np.max(np.abs(moved - coords))) <= 1e-12


def test_dbscan_oracle():
    with criterion("DBSCAN: 200 random instances match brute-force oracle exactly"):
        rng = np.random.default_rng(4242)
        for i in range(200):
            n = int(rng.integers(1, 65))
            style = i % 3
            if style == 0:
                pts = rng.uniform(-1, 1, size=(n, 2))
            elif style == 1:
                centers = rng.uniform(-1, 1, size=(max(1, n // 8), 2))
                pts = centers[rng.integers(0, len(centers), size=n)] + rng.normal(
                    0, 0.05, size=(n, 2)
                )
            else:
                pts = np.round(rng.uniform(-0.5, 0.5, size=(n, 2)), 1)  # many ties
            eps = float(rng.uniform(0.05, 0.6))
            min_pts = int(rng.integers(1, 7))
            assert cluster(pts, eps, min_pts) == dbscan_oracle(pts, eps, min_pts), (
                i, n, eps, min_pts,
            )


def _write_pipeline_config(root: Path) -> Path:
    config = root / "bd.toml"
    config.write_text(
        "\n".join(
            [
                f'corpus_path = "{fixture_corpus_path()}"',
                "[communities]",
                'labels = ["crimson", "cobalt"]',
                'names = ["Crimson Caucus", "Cobalt Caucus"]',
                "[paths]",
                'index_snapshot = "out/bd.index"',
                'cache = "out/bd-cache.sqlite"',
                'output_dir = "out"',
            ]
        )
    )
    return config


def _run_pipeline(root: Path, env: dict) -> None:
    config = _write_pipeline_config(root)
    for command in ("ingest", "curate", "paper"):
        proc = subprocess.run(
            [sys.executable, "-m", "bridgedict.cli", "--config", str(config), command],
            capture_output=True,
            text=True,
            env=env,
            timeout=120,
        )
        assert proc.returncode == 0, f"{command}: {proc.stderr}\n{proc.stdout}"


def test_end_to_end_determinism(tmp_path):
    with criterion(
        "end-to-end: ingest->curate->paper twice in fresh dirs yields "
        "byte-identical markdown and HTML (< 60 s per run)"
    ):
        env = dict(os.environ)
        env["SOURCE_DATE_EPOCH"] = "1700000000"
        env.pop("BD_LLM_ENDPOINT", None)
        env.pop("BD_LLM_API_KEY", None)

        run_a, run_b = tmp_path / "a", tmp_path / "b"
        run_a.mkdir(), run_b.mkdir()
        started = time.monotonic()
        _run_pipeline(run_a, env)
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s"
        _run_pipeline(run_b, env)

        for name in ("bridging-dictionary.md", "bridging-dictionary.html"):
            bytes_a = (run_a / "out" / name).read_bytes()
            bytes_b = (run_b / "out" / name).read_bytes()
            assert bytes_a == bytes_b, name
            assert len(bytes_a) > 500
        snap_a = hashlib.sha256((run_a / "out" / "bd.index").read_bytes()).hexdigest()
        snap_b = hashlib.sha256((run_b / "out" / "bd.index").read_bytes()).hexdigest()
        assert snap_a == snap_b


RECORDED_REQUESTS = [
    ("/api/health", {}),
    ("/api/stats", {"term": "moonshot"}),
    ("/api/stats", {"term": "pipeline reform"}),
    ("/api/stats", {"term": "festival"}),
    ("/api/stats", {"term": "unicornword"}),
    ("/api/stats", {"term": " "}),                        # 400 empty query
    ("/api/summary", {"term": "festival", "community": "1"}),
    ("/api/summary", {"term": "festival", "community": "2"}),
    ("/api/summary", {"term": "meadow", "community": "1"}),   # 422 insufficient
    ("/api/summary", {"term": "festival", "community": "9"}), # 400 bad community
    ("/api/definition", {"term": "moonshot", "community": "1"}),
    ("/api/definition", {"term": "moonshot"}),             # 400 missing community
    ("/api/alternatives", {"term": "economy"}),
    ("/api/scatter", {"term": "economy"}),
    ("/api/scatter", {"term": "quasar", "seed": "5"}),
    ("/api/scatter", {"term": "unicornword"}),             # 422 insufficient
    ("/api/samples", {"term": "ballot", "community": "1"}),
    ("/api/samples", {"term": "ballot", "community": "2", "seed": "7"}),
    ("/api/curated", {}),
    ("/api/paper-edition", {}),
    ("/api/nosuch", {}),                                    # 404
]


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@contextmanager
def _served(root: Path, port: int, env: dict):
    config = root / "bd.toml"
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "bridgedict.cli",
            "--config", str(config), "--server.port", str(port), "serve",
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        env=env,
    )
    try:
        deadline = time.monotonic() + 20
        while True:
            try:
                httpx.get(f"http://127.0.0.1:{port}/api/health", timeout=1.0)
                break
            except httpx.TransportError:
                if time.monotonic() > deadline or proc.poll() is not None:
                    out, err = proc.communicate(timeout=5)
                    raise RuntimeError(f"server did not start: {err.decode()[-2000:]}")
                time.sleep(0.1)
        yield
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def _issue_suite(port: int) -> list[tuple[int, bytes]]:
    results = []
    with httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=60.0) as client:
        for path, params in RECORDED_REQUESTS:
            resp = client.get(path, params=params)
            results.append((resp.status_code, resp.content))
    return results


def test_service_contract(tmp_path):
    with criterion(
        "service: 21-request recorded suite byte-identical across restarts; "
        "/api/stats p50 < 50 ms"
    ):
        env = dict(os.environ)
        env["SOURCE_DATE_EPOCH"] = "1700000000"
        env.pop("BD_LLM_ENDPOINT", None)
        env.pop("BD_LLM_API_KEY", None)
        config = _write_pipeline_config(tmp_path)
        for command in ("ingest", "curate"):
            proc = subprocess.run(
                [sys.executable, "-m", "bridgedict.cli", "--config", str(config), command],
                capture_output=True, env=env, timeout=120,
            )
            assert proc.returncode == 0, proc.stderr

        assert len(RECORDED_REQUESTS) >= 15
        port = _free_port()
        with _served(tmp_path, port, env):
            first = _issue_suite(port)
            statuses = sorted({status for status, _ in first})
            assert 200 in statuses and 400 in statuses and 404 in statuses and 422 in statuses

            latencies = []
            with httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=10.0) as client:
                for _ in range(40):
                    t0 = time.perf_counter()
                    resp = client.get("/api/stats", params={"term": "pipeline reform"})
                    latencies.append(time.perf_counter() - t0)
                    assert resp.status_code == 200
            p50 = sorted(latencies)[len(latencies) // 2]
            assert p50 < 0.050, f"p50 {p50 * 1000:.1f} ms"

        port2 = _free_port()
        with _served(tmp_path, port2, env):
            second = _issue_suite(port2)

        assert len(first) == len(second) == len(RECORDED_REQUESTS)
        for (status_a, body_a), (status_b, body_b), (path, params) in zip(
            first, second, RECORDED_REQUESTS
        ):
            assert status_a == status_b, path
            assert body_a == body_b, (path, params)
