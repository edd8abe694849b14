"""
Integration fixtures: an isolated environment and a fixture corpus on disk
"""

import pytest

from src.evaluation.synthetic import generate_fixture, write_fixture


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    """No embeddings default, no log files, one worker, reports under tmp_path."""
    for name in ("WESPAD_EMBEDDINGS", "WESPAD_EMBEDDINGS_FORMAT", "LOGS_DIR", "LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("WESPAD_JOBS", "1")
    monkeypatch.setenv("REPORTS_DIR", str(tmp_path / "reports"))
    monkeypatch.setattr("src.utils.config._config", None)


@pytest.fixture
def fixture_files(tmp_path):
    """posts.jsonl, embeddings.txt and trees.conll of a small fixture."""
    fixture = generate_fixture(seed=3, n_posts=120, positive_rate=0.3, dim=10)
    return write_fixture(fixture, tmp_path / "fixture")
