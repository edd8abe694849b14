"""
Unit tests for cross-validation and the nested grid search
"""

import pytest

from src.corpus.folds import stratified_folds
from src.evaluation.cross_validation import (
    GridPoint,
    GridSpec,
    PositiveSubsample,
    cross_validate,
)
from src.evaluation.experiments import Baseline, baseline_config
from src.evaluation.synthetic import generate_fixture
from src.wespad.config import WespadConfig


@pytest.fixture(scope="module")
def fixture():
    return generate_fixture(seed=5, n_posts=90, positive_rate=0.3, dim=8)


@pytest.fixture(scope="module")
def config():
    return WespadConfig(min_support=3, k_partitions=2, k2_partitions=2, syn_feats=False)


@pytest.fixture(scope="module")
def folds(fixture):
    return stratified_folds(fixture.corpus, 3, seed=1)


@pytest.fixture(scope="module")
def plain(fixture, config, folds):
    return cross_validate(fixture.corpus, config, None, folds, fixture.table)


class TestGridSpec:
    """Test grid point enumeration."""

    def test_tied_grid(self):
        points = GridSpec(alphas=(0.3, 0.05), ks=(3, 2)).points(WespadConfig())

        assert points == [
            GridPoint(0.05, 0.05, 2, 2),
            GridPoint(0.05, 0.05, 3, 3),
            GridPoint(0.3, 0.3, 2, 2),
            GridPoint(0.3, 0.3, 3, 3),
        ]

    def test_untied_grid(self):
        spec = GridSpec(alphas=(0.05, 0.3), ks=(2, 3), tie_alpha=False, tie_k=False)

        assert len(spec.points(WespadConfig())) == 16

    def test_unused_dimensions_pinned(self):
        lex_only = baseline_config(Baseline.ME_LEX)

        points = GridSpec().points(lex_only)

        assert points == [GridPoint.from_config(lex_only)]

    def test_distorted_only_pins_regular(self):
        config = WespadConfig(we_partitioning=False, context_prev=False, context_next=False)

        points = GridSpec(alphas=(0.05, 0.3), ks=(2,), tie_alpha=False).points(config)

        assert {p.alpha for p in points} == {config.alpha}
        assert {p.alpha2 for p in points} == {0.05, 0.3}

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            GridSpec(alphas=(), ks=(3,))

    def test_apply(self):
        config = GridPoint(0.3, 0.05, 5, 2).apply(WespadConfig())

        assert (config.alpha, config.alpha2, config.k_partitions, config.k2_partitions) == (0.3, 0.05, 5, 2)


class TestCrossValidate:
    """Test CV rounds."""

    def test_one_result_per_fold(self, plain, folds):
        assert [f.fold for f in plain.folds] == [0, 1, 2]
        assert plain.plan_hash == folds.plan_hash

    def test_every_post_predicted_once(self, plain, fixture):
        assert set(plain.predictions) == set(fixture.corpus.ids)
        assert sum(f.test_size for f in plain.folds) == len(fixture.corpus)

    def test_single_point_trains_on_remaining_folds(self, plain, fixture):
        for f in plain.folds:
            assert f.train_size == len(fixture.corpus) - f.test_size
            assert f.validation_f1 is None

    def test_pooled_counts_cover_corpus(self, plain, fixture):
        total = plain.pooled
        assert total.tp + total.fp + total.fn + total.tn == len(fixture.corpus)

    def test_grid_holds_out_validation_fold(self, fixture, config, folds):
        grid = GridSpec(alphas=(0.05, 0.3), ks=(2,))

        report = cross_validate(fixture.corpus, config, grid, folds, fixture.table)

        points = grid.points(config)
        for f in report.folds:
            validation_size = len(folds.fold_ids((f.fold + 1) % 3))
            assert f.train_size == len(fixture.corpus) - f.test_size - validation_size
            assert f.chosen in points
            assert f.validation_f1 is not None

    def test_deterministic(self, plain, fixture, config, folds):
        again = cross_validate(fixture.corpus, config, None, folds, fixture.table)

        assert again.fold_f1.tolist() == plain.fold_f1.tolist()
        assert again.predictions == plain.predictions

    def test_job_count_does_not_change_results(self, plain, fixture, config, folds):
        parallel = cross_validate(fixture.corpus, config, None, folds, fixture.table, jobs=2)

        assert parallel.fold_f1.tolist() == plain.fold_f1.tolist()
        assert parallel.predictions == plain.predictions

    def test_positive_subsample_shrinks_training(self, plain, fixture, config, folds):
        report = cross_validate(
            fixture.corpus, config, None, folds, fixture.table, transform=PositiveSubsample(0.5, seed=3)
        )

        for sub, full in zip(report.folds, plain.folds):
            assert sub.train_size < full.train_size
            assert sub.test_size == full.test_size

    def test_plan_must_cover_corpus(self, fixture, config, folds):
        smaller = fixture.corpus.filter(lambda p: p.id != fixture.corpus.ids[0])

        with pytest.raises(ValueError):
            cross_validate(smaller, config, None, folds, fixture.table)

    def test_grid_needs_three_folds(self, fixture, config):
        two = stratified_folds(fixture.corpus, 2, seed=0)

        with pytest.raises(ValueError):
            cross_validate(fixture.corpus, config, GridSpec(alphas=(0.05, 0.3), ks=(2,)), two, fixture.table)

    def test_holdout_drops_validation_fold_without_grid(self, fixture, config, folds):
        report = cross_validate(fixture.corpus, config, None, folds, fixture.table, holdout=True)

        for f in report.folds:
            validation_size = len(folds.fold_ids((f.fold + 1) % 3))
            assert f.train_size == len(fixture.corpus) - f.test_size - validation_size
            assert f.validation_f1 is None

    def test_holdout_needs_three_folds(self, fixture, config):
        two = stratified_folds(fixture.corpus, 2, seed=0)

        with pytest.raises(ValueError):
            cross_validate(fixture.corpus, config, None, two, fixture.table, holdout=True)
