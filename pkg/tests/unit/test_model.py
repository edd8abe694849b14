"""
Unit tests for WESPAD feature assembly and the end-to-end model
"""

import numpy as np
import pytest

from src.domain.errors import DegenerateCorpusError
from src.domain.posts import Corpus, Label, Post
from src.evaluation.synthetic import generate_fixture
from src.wespad.config import FeatureGroup, WespadConfig
from src.wespad.regions import Space
from src.wespad.model import (
    TrainingSplit,
    build_feature_space,
    describe,
    featurize,
    featurize_many,
    fit_wespad,
    needs_embeddings,
    predict,
    predict_many,
)

FLAG_GROUPS = (
    FeatureGroup.PARTITIONING,
    FeatureGroup.DISTORTION,
    FeatureGroup.CONTEXT_PREV,
    FeatureGroup.CONTEXT_NEXT,
)


@pytest.fixture(scope="module")
def fixture():
    return generate_fixture(seed=3, n_posts=120, positive_rate=0.3, dim=10)


@pytest.fixture(scope="module")
def config():
    return WespadConfig(min_support=3, k_partitions=2, k2_partitions=3)


@pytest.fixture(scope="module")
def model(fixture, config):
    return fit_wespad(fixture.corpus, config, fixture.table)


class TestFeatureLayout:
    """Test the assembled feature space."""

    def test_groups_and_sizes(self, model, config):
        sizes = model.layout.sizes

        assert list(sizes) == [g.value for g in config.enabled_groups]
        assert sizes["we_partitioning"] == 4
        assert sizes["we_distortion"] == 6
        assert sizes["context_prev"] == 4
        assert sizes["syn_feats"] == len(model.features.patterns)
        assert model.final_classifier.dim == model.layout.dim

    def test_lexical_bits(self, fixture, model):
        post = fixture.corpus[0]
        vector = featurize(post, model)
        base = model.layout.offset(FeatureGroup.LEX)

        for token in post.tokens:
            assert vector.to_dense()[base + model.features.vocab[token]] == 1.0

    def test_vectors_are_binary(self, fixture, model):
        for post in list(fixture.corpus)[:20]:
            assert set(featurize(post, model).values.tolist()) <= {1.0}

    def test_at_most_one_flag_per_group(self, fixture, model):
        for post in list(fixture.corpus)[:30]:
            dense = featurize(post, model).to_dense()
            for group in FLAG_GROUPS:
                start = model.layout.offset(group)
                assert dense[start:start + model.layout.size(group)].sum() <= 1

    def test_missing_context_gives_zero_block(self, fixture, model):
        post = next(p for p in fixture.corpus if p.prev_text is None)
        dense = featurize(post, model).to_dense()
        start = model.layout.offset(FeatureGroup.CONTEXT_PREV)

        assert dense[start:start + model.layout.size(FeatureGroup.CONTEXT_PREV)].sum() == 0

    def test_unseen_words_only(self, fixture, model):
        post = Post(id="new", text="zzz qqq", label=Label.NEGATIVE)

        assert len(featurize(post, model)) == 0

    def test_disabled_group_absent(self, fixture, config):
        reduced = fit_wespad(fixture.corpus, config.without(FeatureGroup.SYN, FeatureGroup.DISTORTION), fixture.table)

        assert not reduced.layout.has(FeatureGroup.SYN)
        assert not reduced.layout.has(FeatureGroup.DISTORTION)
        assert reduced.features.distorted is None

    def test_context_distorted_uses_second_space(self, fixture, config):
        fitted = fit_wespad(fixture.corpus, config.with_overrides(context_distorted=True), fixture.table)

        assert fitted.layout.size(FeatureGroup.CONTEXT_NEXT) == 6
        assert fitted.features.next_context.space.value == "distorted"

    def test_centroid_group_raw_values(self, fixture, config):
        fitted = fit_wespad(fixture.corpus, config.with_overrides(centroid=True), fixture.table)
        post = fixture.corpus[0]
        dense = featurize(post, fitted).to_dense()
        start = fitted.layout.offset(FeatureGroup.CENTROID)

        expected = fitted.features.centroid(post.tokens, Space.REGULAR).values
        np.testing.assert_allclose(dense[start:start + fixture.table.dim], expected)


class TestFitAndPredict:
    """Test fitting and prediction."""

    def test_deterministic(self, fixture, config, model):
        again = fit_wespad(fixture.corpus, config, fixture.table)

        np.testing.assert_array_equal(again.final_classifier.weights, model.final_classifier.weights)

    def test_fits_training_data(self, fixture, model):
        labels, _ = predict_many(model, list(fixture.corpus))

        correct = sum(a is p.label for a, p in zip(labels, fixture.corpus))
        assert correct / len(fixture.corpus) > 0.9

    def test_predict_many_matches_predict(self, fixture, model):
        posts = list(fixture.corpus)[:10]
        labels, probs = predict_many(model, posts)

        for post, label, prob in zip(posts, labels, probs):
            single_label, single_prob = predict(model, post)
            assert single_label is label
            assert single_prob == pytest.approx(prob)

    def test_threshold_half_is_positive(self, fixture, model):
        _, probs = predict_many(model, list(fixture.corpus))
        labels, _ = predict_many(model, list(fixture.corpus))

        for label, prob in zip(labels, probs):
            assert (label is Label.POSITIVE) == (prob >= 0.5)

    def test_predict_many_empty(self, model):
        labels, probs = predict_many(model, [])

        assert labels == []
        assert probs.size == 0

    def test_featurize_many_shape(self, fixture, model):
        X = featurize_many(list(fixture.corpus)[:7], model)

        assert X.shape == (7, model.layout.dim)

    def test_lexical_only_needs_no_table(self, fixture):
        config = WespadConfig(
            syn_feats=False, we_partitioning=False, we_distortion=False, context_prev=False, context_next=False
        )

        assert not needs_embeddings(config)
        fitted = fit_wespad(fixture.corpus, config)
        assert list(fitted.layout.sizes) == ["lex_feats"]

    def test_embedding_groups_need_table(self, fixture, config):
        with pytest.raises(ValueError):
            fit_wespad(fixture.corpus, config)

    def test_single_class_with_distortion(self, fixture, config):
        positives = fixture.corpus.filter(lambda p: p.is_positive)

        with pytest.raises(DegenerateCorpusError):
            fit_wespad(positives, config, fixture.table)

    def test_no_trees_gives_empty_syntax_group(self, fixture, config):
        bare = Corpus(tuple(post.with_tree(None) for post in fixture.corpus))

        fitted = fit_wespad(bare, config, fixture.table)

        assert fitted.layout.size(FeatureGroup.SYN) == 0

    def test_describe(self, model):
        summary = describe(model)

        assert summary["dim"] == model.layout.dim
        assert summary["context_prev"] is True


class TestTrainingSplit:
    """Test reuse of alpha/K-independent state."""

    def test_region_models_shared_across_alpha(self, fixture, config):
        split = TrainingSplit(fixture.corpus, fixture.table)

        a = build_feature_space(split, config.with_overrides(alpha=0.05))
        b = build_feature_space(split, config.with_overrides(alpha=0.3))

        assert a.regular.partitioner is b.regular.partitioner
        assert a.regular.alpha == 0.05
        assert b.regular.alpha == 0.3

    def test_patterns_cached_per_mining_settings(self, fixture, config):
        split = TrainingSplit(fixture.corpus, fixture.table)

        assert split.patterns(config) is split.patterns(config.with_overrides(alpha=0.3))
        assert split.patterns(config) is not split.patterns(config.with_overrides(min_support=5))

    def test_context_model_omitted_when_too_few_posts(self, fixture, config):
        # Keep only a single post with a previous-post context.
        with_prev = [p for p in fixture.corpus if p.prev_text is not None]
        keep = {with_prev[0].id}
        corpus = Corpus(
            tuple(
                p if p.id in keep or p.prev_text is None
                else Post(p.id, p.text, p.label, p.tokens, p.topic, None, p.next_text, p.tree)
                for p in fixture.corpus
            )
        )

        fitted = fit_wespad(corpus, config, fixture.table)

        assert fitted.features.prev_context is None
        assert fitted.layout.size(FeatureGroup.CONTEXT_PREV) == 4
