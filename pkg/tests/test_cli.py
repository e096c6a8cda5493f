from __future__ import annotations

import hashlib
import json

import pytest

from bridgedict.cli import main
from conftest import fixture_corpus_path


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.delenv("BD_CONFIG", raising=False)
    monkeypatch.delenv("BD_LLM_ENDPOINT", raising=False)
    monkeypatch.delenv("BD_LLM_API_KEY", raising=False)
    config = tmp_path / "bd.toml"
    config.write_text(
        "\n".join(
            [
                f'corpus_path = "{fixture_corpus_path()}"',
                "n_max = 3",
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
    return tmp_path


def run(workdir, *argv):
    return main(["--config", str(workdir / "bd.toml"), *argv])


class TestIngest:
    def test_ingest_ok_and_deterministic(self, workdir, capsys):
        assert run(workdir, "ingest") == 0
        out = capsys.readouterr().out
        assert "Crimson Caucus (crimson): 2000 documents" in out
        assert "Cobalt Caucus (cobalt): 2000 documents" in out
        snapshot = workdir / "out" / "bd.index"
        first = hashlib.sha256(snapshot.read_bytes()).hexdigest()
        assert run(workdir, "ingest") == 0
        second = hashlib.sha256(snapshot.read_bytes()).hexdigest()
        assert first == second

    def test_missing_corpus_exit_2(self, workdir, capsys):
        assert run(workdir, "--corpus_path", "missing.jsonl", "ingest") == 2
        assert "missing.jsonl" in capsys.readouterr().err


class TestCurate:
    def test_curate_writes_file(self, workdir, capsys):
        run(workdir, "ingest")
        assert run(workdir, "curate") == 0
        out = capsys.readouterr().out
        assert "curated 3 terms" in out
        lines = (workdir / "out" / "curated-terms.jsonl").read_text().strip().split("\n")
        assert sorted(json.loads(l)["term"] for l in lines) == [
            "festival",
            "moonshot",
            "pipeline reform",
        ]

    def test_missing_snapshot_exit_2(self, workdir):
        assert run(workdir, "curate") == 2

    def test_corrupt_snapshot_exit_3(self, workdir):
        run(workdir, "ingest")
        snapshot = workdir / "out" / "bd.index"
        snapshot.write_bytes(b"garbage not gzip json")
        assert run(workdir, "curate") == 3

    def test_empty_result_exit_0_with_warning(self, workdir, capsys):
        run(workdir, "ingest")
        code = run(workdir, "--curation.freq_z_threshold", "99", "--curation.sent_gap_threshold", "99", "curate")
        assert code == 0
        assert "no terms passed" in capsys.readouterr().out

    def test_cli_override_dotted_flag(self, workdir, capsys):
        run(workdir, "ingest")
        assert run(workdir, "--curation.max_terms", "1", "curate") == 0
        assert "curated 1 terms" in capsys.readouterr().out


class TestPaper:
    def test_paper_renders_both_formats(self, workdir, capsys, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        run(workdir, "ingest")
        run(workdir, "curate")
        assert run(workdir, "paper") == 0
        md = workdir / "out" / "bridging-dictionary.md"
        html = workdir / "out" / "bridging-dictionary.html"
        assert md.exists() and html.exists()
        text = md.read_text()
        assert "# Bridging Dictionary: Paper Edition" in text
        assert "Generated 2023-11-14." in text
        assert "## festival" in text

    def test_paper_stable_bytes_across_runs(self, workdir, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        run(workdir, "ingest")
        run(workdir, "curate")
        run(workdir, "paper")
        md1 = (workdir / "out" / "bridging-dictionary.md").read_bytes()
        html1 = (workdir / "out" / "bridging-dictionary.html").read_bytes()
        run(workdir, "paper")
        assert (workdir / "out" / "bridging-dictionary.md").read_bytes() == md1
        assert (workdir / "out" / "bridging-dictionary.html").read_bytes() == html1

    def test_no_curated_file_exit_2(self, workdir):
        run(workdir, "ingest")
        assert run(workdir, "paper") == 2


class TestQuery:
    def test_query_output(self, workdir, capsys):
        run(workdir, "ingest")
        capsys.readouterr()
        assert run(workdir, "query", "moonshot") == 0
        out = capsys.readouterr().out
        assert "term: moonshot" in out
        assert "75.0" in out and "20.0" in out
        assert "higher for Crimson Caucus" in out

    def test_query_empty_phrase_errors(self, workdir, capsys):
        run(workdir, "ingest")
        assert run(workdir, "query", "!!!") == 2


class TestFlagPositions:
    def test_flags_accepted_after_subcommand(self, workdir):
        assert main(["ingest", "--config", str(workdir / "bd.toml")]) == 0
        assert main(["curate", "--config", str(workdir / "bd.toml"), "--curation.max_terms", "2"]) == 0

    def test_flags_accepted_before_subcommand(self, workdir):
        assert main(["--config", str(workdir / "bd.toml"), "ingest"]) == 0

    def test_bd_config_env_fallback(self, workdir, monkeypatch):
        monkeypatch.setenv("BD_CONFIG", str(workdir / "bd.toml"))
        assert main(["ingest"]) == 0
        assert (workdir / "out" / "bd.index").exists()


class TestConfigHandling:
    def test_unknown_config_key_rejected(self, workdir, capsys):
        bad = workdir / "bad.toml"
        bad.write_text('nonsense_key = 1\n')
        assert main(["--config", str(bad), "ingest"]) == 2
        assert "unknown setting" in capsys.readouterr().err

    def test_missing_config_file(self, workdir):
        assert main(["--config", str(workdir / "nope.toml"), "ingest"]) == 2

    def test_defaults_use_bundled_fixture(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["ingest"]) == 0
        assert (tmp_path / "out" / "bd.index").exists()
