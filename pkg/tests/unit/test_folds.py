"""
Unit tests for fold planning and positive subsampling
"""

import pytest

from src.corpus.folds import stratified_folds, subsample_positives
from src.domain.errors import TooFewExamplesError
from tests.conftest import make_corpus


@pytest.fixture
def corpus():
    """23 positives, 77 negatives."""
    rows = [(f"p{i:03d}", f"post {i}", "pos" if i < 23 else "neg") for i in range(100)]
    return make_corpus(rows)


class TestStratifiedFolds:
    """Test stratified fold assignment."""

    def test_every_post_assigned_once(self, corpus):
        plan = stratified_folds(corpus, 5, seed=1)

        assert set(plan.assignment) == set(corpus.ids)
        assert sorted(i for f in range(5) for i in plan.fold_ids(f)) == sorted(corpus.ids)

    def test_fold_sizes_balanced(self, corpus):
        plan = stratified_folds(corpus, 10, seed=3)

        sizes = [len(plan.fold_ids(f)) for f in range(10)]
        assert max(sizes) - min(sizes) <= 1

    def test_class_counts_balanced_per_fold(self, corpus):
        plan = stratified_folds(corpus, 10, seed=3)
        positive = {post.id for post in corpus if post.is_positive}

        counts = [sum(1 for i in plan.fold_ids(f) if i in positive) for f in range(10)]
        assert max(counts) - min(counts) <= 1
        assert sum(counts) == 23

    def test_same_seed_same_plan(self, corpus):
        a = stratified_folds(corpus, 5, seed=11)
        b = stratified_folds(corpus, 5, seed=11)

        assert a.assignment == b.assignment
        assert a.plan_hash == b.plan_hash

    def test_different_seed_different_hash(self, corpus):
        a = stratified_folds(corpus, 5, seed=11)
        b = stratified_folds(corpus, 5, seed=12)

        assert a.plan_hash != b.plan_hash

    def test_fold_of(self, corpus):
        plan = stratified_folds(corpus, 4, seed=0)

        for post_id in corpus.ids:
            assert post_id in plan.fold_ids(plan.fold_of(post_id))

    def test_class_smaller_than_k(self):
        corpus = make_corpus([("a", "x", "pos"), ("b", "y", "pos"), ("c", "z", "neg"), ("d", "w", "neg")])

        with pytest.raises(TooFewExamplesError):
            stratified_folds(corpus, 3, seed=0)

    def test_k_below_two(self, corpus):
        with pytest.raises(TooFewExamplesError):
            stratified_folds(corpus, 1, seed=0)


class TestSubsamplePositives:
    """Test positive-class subsampling."""

    def test_keeps_all_negatives(self, corpus):
        sub = subsample_positives(corpus, 0.2, seed=5)

        assert sub.negative_count == corpus.negative_count

    def test_rounds_half_up(self, corpus):
        # 0.5 * 23 = 11.5
        assert subsample_positives(corpus, 0.5, seed=5).positive_count == 12
        # 0.2 * 23 = 4.6
        assert subsample_positives(corpus, 0.2, seed=5).positive_count == 5

    def test_fraction_one_is_identity(self, corpus):
        assert subsample_positives(corpus, 1.0, seed=5) is corpus

    def test_deterministic(self, corpus):
        a = subsample_positives(corpus, 0.4, seed=9)
        b = subsample_positives(corpus, 0.4, seed=9)

        assert a.ids == b.ids

    def test_keeps_corpus_order(self, corpus):
        sub = subsample_positives(corpus, 0.4, seed=9)

        order = {post_id: i for i, post_id in enumerate(corpus.ids)}
        assert [order[i] for i in sub.ids] == sorted(order[i] for i in sub.ids)

    @pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
    def test_invalid_fraction(self, corpus, fraction):
        with pytest.raises(ValueError):
            subsample_positives(corpus, fraction, seed=0)
