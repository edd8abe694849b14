"""
Experiment Harness

Baseline configurations, feature ablation, partition-count sweep,
positive-fraction sweep, per-topic evaluation and the paired t-test over
per-fold F1. Every run of one experiment shares one fold plan; tables carry its
hash.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
import structlog
from scipy import stats

from src.corpus.folds import stratified_folds
from src.domain.errors import TooFewExamplesError
from src.domain.posts import Corpus, FoldPlan
from src.domain.trees import DependencyForest
from src.embeddings.table import EmbeddingTable
from src.evaluation.cross_validation import CvReport, GridSpec, PositiveSubsample, cross_validate
from src.wespad.config import FeatureGroup, WespadConfig

logger = structlog.get_logger(__name__)

SIGNIFICANCE_LEVEL = 0.05


class Baseline(str, Enum):
    """Methods compared in the experiments."""
    ME_LEX = "me_lex"
    ME_CEN = "me_cen"
    ME_LEX_EMB = "me_lex_emb"
    ME_LEX_CEN = "me_lex_cen"
    WESPAD = "wespad"


_ALL_OFF = {group.value: False for group in FeatureGroup}


def baseline_config(baseline: Baseline, base: Optional[WespadConfig] = None) -> WespadConfig:
    """
    Feature layout of a baseline on top of `base` (defaults to WespadConfig()).

    - me_lex: unigrams and bigrams
    - me_cen: raw centroid components
    - me_lex_emb: unigrams, bigrams and raw centroid components
    - me_lex_cen: unigrams, bigrams and one unpartitioned PFlag/NFlag pair at alpha 0
    - wespad: `base` unchanged
    """
    base = base or WespadConfig()
    baseline = Baseline(baseline)
    if baseline is Baseline.WESPAD:
        return base
    if baseline is Baseline.ME_LEX:
        return base.with_overrides(**{**_ALL_OFF, "lex_feats": True})
    if baseline is Baseline.ME_CEN:
        return base.with_overrides(**{**_ALL_OFF, "centroid": True})
    if baseline is Baseline.ME_LEX_EMB:
        return base.with_overrides(**{**_ALL_OFF, "lex_feats": True, "centroid": True})
    return base.with_overrides(
        **{**_ALL_OFF, "lex_feats": True, "we_partitioning": True, "k_partitions": 1, "alpha": 0.0}
    )


def run_baseline(
    corpus: Corpus,
    baseline: Baseline,
    folds: FoldPlan,
    table: Optional[EmbeddingTable],
    trees: Optional[dict[str, DependencyForest]] = None,
    config: Optional[WespadConfig] = None,
    grid: Optional[GridSpec] = None,
    jobs: int = 1,
    fraction: float = 1.0,
) -> CvReport:
    """
    Cross-validate one baseline.

    Only wespad is grid-searched; the other baselines have fixed layouts. With a
    grid every baseline leaves the validation fold out of training, so all of
    them train on the same folds.
    `fraction` < 1 subsamples the positives of every training split.
    """
    baseline = Baseline(baseline)
    cfg = baseline_config(baseline, config)
    transform = PositiveSubsample(fraction, cfg.seed) if fraction < 1.0 else None
    return cross_validate(
        corpus,
        cfg,
        grid if baseline is Baseline.WESPAD else None,
        folds,
        table,
        trees,
        jobs=jobs,
        transform=transform,
        name=baseline.value,
        holdout=grid is not None,
    )


def _summary(report: CvReport) -> dict:
    return {
        "precision": report.mean_precision,
        "recall": report.mean_recall,
        "f1": report.mean_f1,
        "plan_hash": report.plan_hash,
    }


def _group_name(groups: Sequence[FeatureGroup]) -> str:
    return "+".join(FeatureGroup(g).value for g in groups)


def ablate(
    corpus: Corpus,
    folds: FoldPlan,
    table: Optional[EmbeddingTable],
    trees: Optional[dict[str, DependencyForest]],
    groups: Iterable[FeatureGroup | Sequence[FeatureGroup]],
    config: Optional[WespadConfig] = None,
    grid: Optional[GridSpec] = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """
    One CV run per removal, plus the full model.

    Each entry of `groups` is a single group or a collection removed together.

    Returns:
        DataFrame with columns removed, precision, recall, f1, delta_f1_pct,
        plan_hash; the first row ("none") is the full model
    """
    config = config or WespadConfig()
    holdout = grid is not None
    full = cross_validate(corpus, config, grid, folds, table, trees, jobs=jobs, name="full", holdout=holdout)
    rows = [{"removed": "none", **_summary(full), "delta_f1_pct": 0.0}]

    for entry in groups:
        removal = (entry,) if isinstance(entry, (FeatureGroup, str)) else tuple(entry)
        removal = tuple(FeatureGroup(g) for g in removal)
        name = _group_name(removal)
        report = cross_validate(
            corpus,
            config.without(*removal),
            grid,
            folds,
            table,
            trees,
            jobs=jobs,
            name=f"-{name}",
            holdout=holdout,
        )
        delta = 100.0 * (report.mean_f1 - full.mean_f1) / full.mean_f1 if full.mean_f1 else 0.0
        rows.append({"removed": name, **_summary(report), "delta_f1_pct": delta})
        logger.info("ablation_row", removed=name, f1=report.mean_f1, delta_f1_pct=delta)

    return pd.DataFrame(rows, columns=["removed", "precision", "recall", "f1", "delta_f1_pct", "plan_hash"])


def partition_sweep(
    corpus: Corpus,
    folds: FoldPlan,
    table: Optional[EmbeddingTable],
    trees: Optional[dict[str, DependencyForest]],
    ks: Iterable[int],
    alpha: float,
    config: Optional[WespadConfig] = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """
    One CV run per K with K2 = K and alpha2 = alpha fixed.

    Returns:
        DataFrame with columns k, precision, recall, f1, plan_hash (one row per K, input order)
    """
    config = config or WespadConfig()
    rows = []
    for k in ks:
        cfg = config.with_overrides(k_partitions=k, k2_partitions=k, alpha=alpha, alpha2=alpha)
        report = cross_validate(corpus, cfg, None, folds, table, trees, jobs=jobs, name=f"k={k}")
        rows.append({"k": int(k), **_summary(report)})
    return pd.DataFrame(rows, columns=["k", "precision", "recall", "f1", "plan_hash"])


def positive_fraction_sweep(
    corpus: Corpus,
    folds: FoldPlan,
    table: Optional[EmbeddingTable],
    trees: Optional[dict[str, DependencyForest]],
    fractions: Iterable[float],
    baselines: Iterable[Baseline],
    seed: int,
    config: Optional[WespadConfig] = None,
    grid: Optional[GridSpec] = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """
    Mean F1 per (fraction, baseline) with positives subsampled in training splits only.

    The subsample seed of round r is `seed + r` for every baseline.

    Returns:
        DataFrame with columns fraction, baseline, precision, recall, f1, plan_hash
    """
    config = (config or WespadConfig()).with_overrides(seed=seed)
    rows = []
    for fraction in fractions:
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {fraction}")
        for baseline in baselines:
            report = run_baseline(
                corpus, baseline, folds, table, trees, config=config, grid=grid, jobs=jobs, fraction=fraction
            )
            rows.append({"fraction": float(fraction), "baseline": Baseline(baseline).value, **_summary(report)})
    return pd.DataFrame(rows, columns=["fraction", "baseline", "precision", "recall", "f1", "plan_hash"])


def evaluate_by_topic(
    corpus: Corpus,
    config: Optional[WespadConfig],
    grid: Optional[GridSpec],
    k: int,
    seed: int,
    table: Optional[EmbeddingTable],
    trees: Optional[dict[str, DependencyForest]] = None,
    baselines: Iterable[Baseline] = (Baseline.ME_LEX, Baseline.WESPAD),
    jobs: int = 1,
) -> pd.DataFrame:
    """
    Separate CV per topic; a final "mean" row per baseline averages the topics.

    Topics with fewer than k posts of a class are skipped with a warning.

    Returns:
        DataFrame with columns topic, baseline, precision, recall, f1, plan_hash
    """
    baselines = [Baseline(b) for b in baselines]
    rows = []
    for topic in corpus.topics:
        subset = corpus.filter(lambda p: (p.topic or "unknown") == topic)
        try:
            folds = stratified_folds(subset, k, seed)
        except TooFewExamplesError as e:
            logger.warning("topic_skipped", topic=topic, reason=str(e))
            continue
        for baseline in baselines:
            report = run_baseline(subset, baseline, folds, table, trees, config=config, grid=grid, jobs=jobs)
            rows.append({"topic": topic, "baseline": baseline.value, **_summary(report)})

    frame = pd.DataFrame(rows, columns=["topic", "baseline", "precision", "recall", "f1", "plan_hash"])
    means = []
    for baseline in baselines:
        part = frame[frame["baseline"] == baseline.value]
        if part.empty:
            continue
        means.append(
            {
                "topic": "mean",
                "baseline": baseline.value,
                "precision": float(part["precision"].mean()),
                "recall": float(part["recall"].mean()),
                "f1": float(part["f1"].mean()),
                "plan_hash": "",
            }
        )
    return pd.concat([frame, pd.DataFrame(means, columns=frame.columns)], ignore_index=True)


@dataclass(frozen=True)
class TTestResult:
    """Two-sided paired t-test over per-fold F1."""
    statistic: float
    p_value: float
    significant: bool


def paired_t_test(report_a: CvReport, report_b: CvReport, level: float = SIGNIFICANCE_LEVEL) -> TTestResult:
    """
    Paired t-test of the per-fold F1 of two reports on the same fold plan.

    Raises:
        ValueError: the reports were built on different fold plans
    """
    if report_a.plan_hash != report_b.plan_hash:
        raise ValueError(
            f"Reports use different fold plans ({report_a.plan_hash} vs {report_b.plan_hash})"
        )
    a, b = report_a.fold_f1, report_b.fold_f1
    differences = a - b
    if np.all(differences == differences[0]):
        # Constant differences leave the variance at zero.
        if differences[0] == 0:
            return TTestResult(0.0, 1.0, False)
        return TTestResult(float(np.sign(differences[0]) * np.inf), 0.0, True)
    result = stats.ttest_rel(a, b)
    p_value = float(result.pvalue)
    return TTestResult(float(result.statistic), p_value, p_value < level)
