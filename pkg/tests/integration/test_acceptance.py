"""
End-to-end experiments on the seeded synthetic fixture

Marked slow: each test runs several full cross-validations.
"""

import pandas as pd
import pytest

from src.corpus.folds import stratified_folds
from src.evaluation.experiments import Baseline, ablate, baseline_config, partition_sweep, run_baseline
from src.evaluation.cross_validation import cross_validate
from src.evaluation.synthetic import generate_fixture
from src.wespad.config import FeatureGroup, WespadConfig

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def held_out():
    return generate_fixture(seed=7, n_posts=800, positive_rate=0.2, dim=50, held_out_vocabulary=True)


@pytest.fixture(scope="module")
def folds(held_out):
    return stratified_folds(held_out.corpus, 10, seed=7)


class TestGeneralization:
    """WESPAD against the lexical baseline when test positives use neighbours never seen in training."""

    @pytest.fixture(scope="class")
    def reports(self, held_out, folds):
        config = WespadConfig(seed=7)
        return {
            (baseline, fraction): run_baseline(
                held_out.corpus, baseline, folds, held_out.table, config=config, fraction=fraction
            )
            for baseline in (Baseline.ME_LEX, Baseline.WESPAD)
            for fraction in (1.0, 0.2)
        }

    def test_shared_fold_plan(self, reports, folds):
        assert {r.plan_hash for r in reports.values()} == {folds.plan_hash}

    def test_wespad_beats_lexical_baseline(self, reports):
        gap = reports[Baseline.WESPAD, 1.0].mean_f1 - reports[Baseline.ME_LEX, 1.0].mean_f1

        assert gap >= 0.10

    def test_lexical_baseline_learns_shared_words(self, reports):
        assert reports[Baseline.ME_LEX, 1.0].mean_f1 > reports[Baseline.ME_LEX, 0.2].mean_f1

    def test_gap_widens_with_few_positives(self, reports):
        gap_full = reports[Baseline.WESPAD, 1.0].mean_f1 - reports[Baseline.ME_LEX, 1.0].mean_f1
        gap_few = reports[Baseline.WESPAD, 0.2].mean_f1 - reports[Baseline.ME_LEX, 0.2].mean_f1

        assert gap_few >= gap_full

    def test_embedding_groups_carry_the_gap(self, held_out, folds, reports):
        removed = (
            FeatureGroup.PARTITIONING,
            FeatureGroup.DISTORTION,
            FeatureGroup.CONTEXT_PREV,
            FeatureGroup.CONTEXT_NEXT,
        )

        frame = ablate(held_out.corpus, folds, held_out.table, None, [removed], WespadConfig(seed=7))

        assert frame.loc[0, "f1"] == pytest.approx(reports[Baseline.WESPAD, 1.0].mean_f1)
        assert frame.loc[0, "f1"] - frame.loc[1, "f1"] >= 0.10


class TestPartitionSweep:
    """Fewer partitions favour recall, more favour precision, when one topic cluster is class-impure."""

    SEEDS = range(5)

    @pytest.fixture(scope="class")
    def sweeps(self):
        frames = []
        for seed in self.SEEDS:
            fixture = generate_fixture(seed=seed, n_posts=300, impure_cluster=True)
            folds = stratified_folds(fixture.corpus, 5, seed=seed)
            frames.append(
                partition_sweep(fixture.corpus, folds, fixture.table, None, [1, 4], 0.15, WespadConfig(seed=seed))
            )
        return pd.concat(frames).groupby("k")[["precision", "recall"]].mean()

    def test_one_partition_has_higher_recall(self, sweeps):
        assert sweeps.loc[1, "recall"] >= sweeps.loc[4, "recall"]

    def test_four_partitions_have_higher_precision(self, sweeps):
        assert sweeps.loc[4, "precision"] >= sweeps.loc[1, "precision"]


class TestBaselineEquivalence:
    """me_lex_cen is WESPAD with lexical features and one flag pair at alpha 0."""

    def test_identical_predictions(self):
        fixture = generate_fixture(seed=4, n_posts=150, positive_rate=0.3, dim=12)
        folds = stratified_folds(fixture.corpus, 5, seed=4)
        explicit = WespadConfig(
            lex_feats=True,
            syn_feats=False,
            centroid=False,
            we_partitioning=True,
            we_distortion=False,
            context_prev=False,
            context_next=False,
            k_partitions=1,
            alpha=0.0,
            seed=4,
        )

        baseline = run_baseline(fixture.corpus, Baseline.ME_LEX_CEN, folds, fixture.table, config=WespadConfig(seed=4))
        direct = cross_validate(fixture.corpus, explicit, None, folds, fixture.table)

        assert baseline_config(Baseline.ME_LEX_CEN, WespadConfig(seed=4)) == explicit
        assert baseline.predictions == direct.predictions
