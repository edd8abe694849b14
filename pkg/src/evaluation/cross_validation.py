"""
Cross-Validation with Nested Grid Search

Round r of a k-fold plan tests on fold r and tunes on fold (r + 1) mod k; the
remaining k - 2 folds train. Each grid point is fitted on the training folds
and scored by positive-class F1 on the validation fold; the best point's model
(fitted on the training folds only) is then evaluated on the test fold.

With a single grid point nothing is tuned and, unless `holdout` is set, the
validation fold joins the training folds, which makes the run plain k-fold CV.
Experiments that tune any of their methods set `holdout` for all of them, so
every method of one comparison trains on the same k - 2 folds.

Rounds are independent jobs; with jobs > 1 they run in a process pool and are
reduced in fold order, so reports do not depend on the job count.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import structlog

from src.domain.posts import Corpus, FoldPlan
from src.domain.trees import DependencyForest
from src.corpus.folds import subsample_positives
from src.embeddings.table import EmbeddingTable
from src.evaluation.metrics import Metrics, pooled, positive_class_metrics
from src.ingestion.conll_parser import attach_trees
from src.utils.logging import LoggingContext
from src.wespad.config import WespadConfig
from src.wespad.model import TrainingSplit, fit_wespad, predict_many

logger = structlog.get_logger(__name__)

DEFAULT_ALPHAS = (0.05, 0.15, 0.3)
DEFAULT_KS = (3, 4, 5)


@dataclass(frozen=True, order=True)
class GridPoint:
    """Hyperparameters tuned by the grid search. Field order is the tie-break order."""
    alpha: float
    alpha2: float
    k: int
    k2: int

    @classmethod
    def from_config(cls, config: WespadConfig) -> "GridPoint":
        return cls(config.alpha, config.alpha2, config.k_partitions, config.k2_partitions)

    def apply(self, config: WespadConfig) -> WespadConfig:
        return config.with_overrides(
            alpha=self.alpha, alpha2=self.alpha2, k_partitions=self.k, k2_partitions=self.k2
        )

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "alpha2": self.alpha2, "k": self.k, "k2": self.k2}


def _uses_regular(config: WespadConfig) -> bool:
    context = (config.context_prev or config.context_next) and not config.context_distorted
    return config.we_partitioning or context


def _uses_distorted(config: WespadConfig) -> bool:
    context = (config.context_prev or config.context_next) and config.context_distorted
    return config.we_distortion or context


@dataclass(frozen=True)
class GridSpec:
    """
    Hyperparameter grid.

    With tie_alpha the distorted-space alpha2 follows alpha; with tie_k, K2
    follows K.
    """
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    ks: tuple[int, ...] = DEFAULT_KS
    tie_alpha: bool = True
    tie_k: bool = True

    def __post_init__(self):
        if not self.alphas or not self.ks:
            raise ValueError("GridSpec needs at least one alpha and one K")
        object.__setattr__(self, "alphas", tuple(sorted(set(float(a) for a in self.alphas))))
        object.__setattr__(self, "ks", tuple(sorted(set(int(k) for k in self.ks))))

    def points(self, config: WespadConfig) -> list[GridPoint]:
        """
        Grid points in tie-break order.

        Dimensions the config never reads (e.g. K when no regular-space flags
        are enabled) are pinned to the config value instead of being searched.
        """
        regular, distorted = _uses_regular(config), _uses_distorted(config)
        alphas = self.alphas if regular or (distorted and self.tie_alpha) else (config.alpha,)
        ks = self.ks if regular or (distorted and self.tie_k) else (config.k_partitions,)

        points = set()
        for alpha, k in itertools.product(alphas, ks):
            if not distorted:
                alpha2s, k2s = (config.alpha2,), (config.k2_partitions,)
            else:
                alpha2s = (alpha,) if self.tie_alpha else self.alphas
                k2s = (k,) if self.tie_k else self.ks
            for alpha2, k2 in itertools.product(alpha2s, k2s):
                points.add(GridPoint(alpha, alpha2, k, k2))
        return sorted(points)


@dataclass(frozen=True)
class FoldResult:
    """Outcome of one CV round."""
    fold: int
    metrics: Metrics
    chosen: GridPoint
    validation_f1: Optional[float]
    train_size: int
    test_size: int
    predictions: tuple[tuple[str, str, float], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class CvReport:
    """Per-fold results of one method on one fold plan."""
    name: str
    folds: tuple[FoldResult, ...]
    plan_hash: str
    seed: int
    config: WespadConfig

    @property
    def fold_f1(self) -> np.ndarray:
        return np.array([f.metrics.f1 for f in self.folds])

    @property
    def mean_precision(self) -> float:
        return float(np.mean([f.metrics.precision for f in self.folds]))

    @property
    def mean_recall(self) -> float:
        return float(np.mean([f.metrics.recall for f in self.folds]))

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.fold_f1))

    @property
    def pooled(self) -> Metrics:
        """Metrics of the summed confusion counts; reported apart from the means."""
        return pooled(f.metrics for f in self.folds)

    @property
    def predictions(self) -> dict[str, tuple[str, float]]:
        """post id -> (label, probability) over all test folds."""
        return {pid: (label, p) for f in self.folds for pid, label, p in f.predictions}

    def __repr__(self) -> str:
        return (
            f"CvReport('{self.name}', folds={len(self.folds)}, "
            f"f1={self.mean_f1:.4f}, plan={self.plan_hash})"
        )


class PositiveSubsample:
    """Training-set transform keeping a seeded share of the positives (seed + round)."""

    def __init__(self, fraction: float, seed: int):
        self.fraction = fraction
        self.seed = seed

    def __call__(self, train: Corpus, round_no: int) -> Corpus:
        return subsample_positives(train, self.fraction, self.seed + round_no)


TrainTransform = Callable[[Corpus, int], Corpus]


def _evaluate(model, posts: Corpus) -> tuple[Metrics, tuple[tuple[str, str, float], ...]]:
    labels, probabilities = predict_many(model, list(posts))
    metrics = positive_class_metrics(labels, [post.label for post in posts])
    rows = tuple(
        (post.id, label.value, float(p)) for post, label, p in zip(posts, labels, probabilities)
    )
    return metrics, rows


def run_round(
    corpus: Corpus,
    folds: FoldPlan,
    round_no: int,
    config: WespadConfig,
    points: Sequence[GridPoint],
    table: Optional[EmbeddingTable],
    transform: Optional[TrainTransform] = None,
    holdout: bool = False,
) -> FoldResult:
    """Tune, fit and test one round of the fold plan."""
    with LoggingContext(fold=round_no):
        test_ids = set(folds.fold_ids(round_no))
        tune = len(points) > 1
        held_out = set(folds.fold_ids((round_no + 1) % folds.k)) if tune or holdout else set()
        train = corpus.filter(lambda p: p.id not in test_ids and p.id not in held_out)
        if transform is not None:
            train = transform(train, round_no)
        split = TrainingSplit(train, table)

        best_model, best_point, best_f1 = None, points[0], None
        if tune:
            validation = corpus.subset(held_out)
            for point in points:
                model = fit_wespad(train, point.apply(config), table, split=split)
                f1 = _evaluate(model, validation)[0].f1
                logger.debug("grid_point_scored", **point.to_dict(), validation_f1=f1)
                if best_f1 is None or f1 > best_f1:
                    best_model, best_point, best_f1 = model, point, f1
        else:
            best_model = fit_wespad(train, best_point.apply(config), table, split=split)

        test = corpus.subset(test_ids)
        metrics, rows = _evaluate(best_model, test)
        logger.info(
            "fold_evaluated",
            f1=metrics.f1,
            precision=metrics.precision,
            recall=metrics.recall,
            chosen=best_point.to_dict(),
        )
        return FoldResult(
            fold=round_no,
            metrics=metrics,
            chosen=best_point,
            validation_f1=best_f1,
            train_size=len(train),
            test_size=len(test),
            predictions=rows,
        )


def _run_round_job(args: tuple) -> FoldResult:
    return run_round(*args)


def cross_validate(
    corpus: Corpus,
    config: WespadConfig,
    grid: Optional[GridSpec],
    folds: FoldPlan,
    table: Optional[EmbeddingTable] = None,
    trees: Optional[dict[str, DependencyForest]] = None,
    jobs: int = 1,
    transform: Optional[TrainTransform] = None,
    name: str = "wespad",
    holdout: bool = False,
) -> CvReport:
    """
    Run every round of the fold plan.

    Args:
        corpus: All posts of the experiment
        config: Base config; grid points override alpha/alpha2/K/K2
        grid: Hyperparameter grid, or None to use the config values as is
        folds: Fold plan shared by every method of the experiment
        table: Embedding table
        trees: Optional forests keyed by post id
        jobs: Rounds evaluated concurrently
        transform: Optional training-set transform (positive subsampling)
        name: Method name carried by the report
        holdout: Leave the validation fold out of training even without tuning, so
            untuned methods train on the same folds as tuned ones

    Returns:
        CvReport
    """
    if set(folds.assignment) != set(corpus.ids):
        raise ValueError("Fold plan does not cover exactly the posts of the corpus")
    if trees is not None:
        corpus, _ = attach_trees(corpus, trees)

    points = grid.points(config) if grid is not None else [GridPoint.from_config(config)]
    if (len(points) > 1 or holdout) and folds.k < 3:
        raise ValueError("A validation fold needs at least 3 folds (train, validation, test)")
    tasks = [(corpus, folds, r, config, points, table, transform, holdout) for r in range(folds.k)]
    logger.info(
        "cv_started",
        method=name,
        folds=folds.k,
        grid_points=len(points),
        plan_hash=folds.plan_hash,
        jobs=jobs,
    )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, folds.k)) as executor:
            results = list(executor.map(_run_round_job, tasks))
    else:
        results = [_run_round_job(task) for task in tasks]

    report = CvReport(
        name=name,
        folds=tuple(sorted(results, key=lambda r: r.fold)),
        plan_hash=folds.plan_hash,
        seed=folds.seed,
        config=config,
    )
    logger.info(
        "cv_finished",
        method=name,
        mean_f1=report.mean_f1,
        mean_precision=report.mean_precision,
        mean_recall=report.mean_recall,
    )
    return report
