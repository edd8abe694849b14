"""
Fold planning and positive-class subsampling.

Fold plans are stratified by label and fixed per (corpus, k, seed), so every
method compared in one experiment sees identical train/validation/test splits.
"""

import math

import numpy as np
import structlog

from src.domain.errors import TooFewExamplesError
from src.domain.posts import Corpus, FoldPlan

logger = structlog.get_logger(__name__)


def stratified_folds(corpus: Corpus, k: int, seed: int) -> FoldPlan:
    """
    Assign posts to `k` folds preserving the label distribution.

    Each class is shuffled with the seed and dealt round-robin over a
    seed-shuffled fold order; negatives continue the deal where positives
    stopped, so both per-class and overall fold sizes differ by at most one.

    Args:
        corpus: Posts to split
        k: Number of folds (>= 2)
        seed: RNG seed

    Returns:
        FoldPlan

    Raises:
        TooFewExamplesError: k < 2 or a class has fewer than k posts
    """
    if k < 2:
        raise TooFewExamplesError(f"Need at least 2 folds, got k={k}")
    positives = [post.id for post in corpus if post.is_positive]
    negatives = [post.id for post in corpus if not post.is_positive]
    for name, members in (("positive", positives), ("negative", negatives)):
        if len(members) < k:
            raise TooFewExamplesError(
                f"Class {name} has {len(members)} posts, fewer than k={k} folds"
            )

    rng = np.random.default_rng(seed)
    fold_order = rng.permutation(k)
    assignment: dict[str, int] = {}
    slot = 0
    for members in (positives, negatives):
        for i in rng.permutation(len(members)):
            assignment[members[i]] = int(fold_order[slot % k])
            slot += 1

    # Keep corpus order in the mapping for readability of dumps.
    ordered = {post.id: assignment[post.id] for post in corpus}
    plan = FoldPlan(k=k, assignment=ordered, seed=seed)
    logger.debug("folds_planned", k=k, seed=seed, posts=len(ordered), plan_hash=plan.plan_hash)
    return plan


def subsample_positives(corpus: Corpus, fraction: float, seed: int) -> Corpus:
    """
    Keep every negative and a seeded sample of the positives.

    round-half-up(fraction * positive_count) positives are drawn without
    replacement; surviving posts keep corpus order.

    Args:
        corpus: Posts to subsample
        fraction: Share of positives to keep, in (0, 1]
        seed: RNG seed

    Returns:
        New Corpus
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    positive_ids = [post.id for post in corpus if post.is_positive]
    keep_count = int(math.floor(fraction * len(positive_ids) + 0.5))
    if keep_count >= len(positive_ids):
        return corpus

    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(positive_ids), size=keep_count, replace=False)
    kept = {positive_ids[i] for i in chosen}
    return corpus.filter(lambda post: not post.is_positive or post.id in kept)
