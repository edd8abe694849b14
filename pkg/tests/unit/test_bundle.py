"""
Unit tests for model bundle serialization
"""

import dataclasses
import json

import numpy as np
import pytest

from src.domain.errors import BundleError, BundleVersionError, CorruptBundleError, MissingInputError
from src.evaluation.synthetic import generate_fixture, write_word2vec_text
from src.wespad.bundle import (
    BUNDLE_VERSION,
    bundle_to_dict,
    embeddings_ref,
    load_bundle,
    read_bundle,
    save_bundle,
    verify_embeddings,
)
from src.wespad.config import WespadConfig
from src.wespad.model import fit_wespad, predict_many


@pytest.fixture(scope="module")
def fixture():
    return generate_fixture(seed=11, n_posts=100, positive_rate=0.3, dim=8)


@pytest.fixture(scope="module")
def model(fixture):
    return fit_wespad(fixture.corpus, WespadConfig(min_support=3, k_partitions=2, k2_partitions=2), fixture.table)


class TestBundleRoundtrip:
    """Test save and load."""

    def test_predictions_identical_after_reload(self, tmp_path, fixture, model):
        path = save_bundle(model, tmp_path / "model.json")

        restored = load_bundle(path, fixture.table)

        posts = list(fixture.corpus)
        labels_a, probs_a = predict_many(model, posts)
        labels_b, probs_b = predict_many(restored, posts)
        assert labels_a == labels_b
        np.testing.assert_array_equal(probs_a, probs_b)

    def test_components_restored(self, tmp_path, fixture, model):
        restored = load_bundle(save_bundle(model, tmp_path / "model.json"), fixture.table)

        assert restored.layout == model.layout
        assert restored.config == model.config
        assert dict(restored.features.vocab) == dict(model.features.vocab)
        assert [p.encoding for p in restored.features.patterns] == [p.encoding for p in model.features.patterns]
        np.testing.assert_array_equal(
            restored.features.regular.partitioner.centroids, model.features.regular.partitioner.centroids
        )

    def test_byte_identical_for_identical_fits(self, tmp_path, fixture, model):
        again = fit_wespad(fixture.corpus, model.config, fixture.table)

        a = save_bundle(model, tmp_path / "a.json").read_bytes()
        b = save_bundle(again, tmp_path / "b.json").read_bytes()

        assert a == b

    def test_layout_keeps_group_order(self, model):
        data = bundle_to_dict(model)

        assert [name for name, _ in data["layout"]] == list(model.layout.sizes)
        assert data["version"] == BUNDLE_VERSION


class TestBundleErrors:
    """Test rejection of unusable bundles."""

    @pytest.fixture
    def saved(self, tmp_path, model):
        return save_bundle(model, tmp_path / "model.json")

    def rewrite(self, path, **changes):
        data = json.loads(path.read_text())
        data.update(changes)
        path.write_text(json.dumps(data))
        return path

    def test_wrong_version(self, saved, fixture):
        with pytest.raises(BundleVersionError):
            load_bundle(self.rewrite(saved, version=BUNDLE_VERSION + 1), fixture.table)

    def test_not_a_bundle(self, saved, fixture):
        with pytest.raises(CorruptBundleError):
            load_bundle(self.rewrite(saved, format="something-else"), fixture.table)

    def test_missing_field(self, saved, fixture):
        data = json.loads(saved.read_text())
        del data["final_classifier"]
        saved.write_text(json.dumps(data))

        with pytest.raises(CorruptBundleError):
            load_bundle(saved, fixture.table)

    def test_dimension_mismatch(self, saved, fixture):
        data = json.loads(saved.read_text())
        data["final_classifier"]["weights"] = data["final_classifier"]["weights"][:-1]
        saved.write_text(json.dumps(data))

        with pytest.raises(CorruptBundleError):
            load_bundle(saved, fixture.table)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{truncated")

        with pytest.raises(CorruptBundleError):
            read_bundle(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingInputError):
            load_bundle(tmp_path / "absent.json")

    def test_table_required(self, saved):
        with pytest.raises(MissingInputError):
            load_bundle(saved)

    def test_bundle_errors_exit_code(self):
        assert BundleVersionError("x").exit_code == 4


class TestEmbeddingDigest:
    """Test the recorded embedding reference."""

    def test_matching_file_passes(self, tmp_path, fixture, model):
        path = write_word2vec_text(fixture.table, tmp_path / "vectors.txt")
        tagged = dataclasses.replace(model, embeddings_ref=embeddings_ref(path, "word2vec-text"))

        verify_embeddings(tagged, path)

    def test_changed_file_fails(self, tmp_path, fixture, model):
        path = write_word2vec_text(fixture.table, tmp_path / "vectors.txt")
        tagged = dataclasses.replace(model, embeddings_ref=embeddings_ref(path, "word2vec-text"))
        path.write_text(path.read_text() + "extra 0 0 0 0 0 0 0 0\n")

        with pytest.raises(BundleError):
            verify_embeddings(tagged, path)

    def test_reference_survives_roundtrip(self, tmp_path, fixture, model):
        path = write_word2vec_text(fixture.table, tmp_path / "vectors.txt")
        tagged = dataclasses.replace(model, embeddings_ref=embeddings_ref(path, "word2vec-text"))

        restored = load_bundle(save_bundle(tagged, tmp_path / "model.json"), fixture.table)

        assert restored.embeddings_ref == tagged.embeddings_ref
