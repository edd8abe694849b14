"""
WESPAD Feature Assembly and End-to-End Model

Fits, on one training split:
- the n-gram vocabulary (lex_feats)
- frequent dependency subtrees (syn_feats)
- information gain weights (for the distorted space)
- the regular-space region model on post centroids (we_partitioning)
- the distorted-space region model on IG-weighted centroids (we_distortion)
- previous/next-post context region models (context_prev, context_next)
- the final logistic regression over the assembled binary feature vectors

Everything that does not depend on alpha or K lives in a TrainingSplit, which
cross-validation reuses across the grid points of one round.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
import structlog
from scipy import sparse

from src.corpus.tokenizer import tokenize
from src.corpus.vocab import ngram_vocab, ngrams
from src.domain.posts import Corpus, Label, Post
from src.domain.trees import DependencyForest, SubtreePattern
from src.embeddings.table import CentroidVector, EmbeddingTable, centroid, weighted_centroid
from src.ingestion.conll_parser import attach_trees
from src.learners.logistic import LinearModel, LogisticConfig, predict_proba, train_logreg
from src.learners.sparse import SparseVector, stack_rows
from src.treebank.mining import mine_frequent_subtrees, mine_per_class, subtree_features
from src.wespad.config import FeatureGroup, FeatureLayout, WespadConfig
from src.wespad.information_gain import IGResolver, IGWeights, compute_ig
from src.wespad.regions import RegionFlagModel, Space, fit_region_model, region_flags

logger = structlog.get_logger(__name__)

CONTEXT_FIELDS = {
    FeatureGroup.CONTEXT_PREV: "prev_text",
    FeatureGroup.CONTEXT_NEXT: "next_text",
}


def _mining_key(config: WespadConfig) -> tuple:
    return (config.min_support, config.min_size, config.max_size, config.per_class_mining)


def _logistic(config: WespadConfig) -> LogisticConfig:
    return LogisticConfig(l2=config.l2, max_iter=config.max_iter, tol=config.tol, seed=config.seed)


def needs_embeddings(config: WespadConfig) -> bool:
    return any(
        config.enabled(g)
        for g in (
            FeatureGroup.CENTROID,
            FeatureGroup.PARTITIONING,
            FeatureGroup.DISTORTION,
            FeatureGroup.CONTEXT_PREV,
            FeatureGroup.CONTEXT_NEXT,
        )
    )


def _context_space(config: WespadConfig) -> Space:
    return Space.DISTORTED if config.context_distorted else Space.REGULAR


class FeatureMemo:
    """Per-process caches of subtree matches and centroids, keyed by content."""

    def __init__(self):
        self.subtrees: dict[tuple, frozenset[int]] = {}
        self.centroids: dict[tuple, CentroidVector] = {}

    def centroid(
        self,
        tokens: Sequence[str],
        space: Space,
        table: EmbeddingTable,
        resolver: Optional[IGResolver],
    ) -> CentroidVector:
        key = (space, tuple(tokens))
        cached = self.centroids.get(key)
        if cached is None:
            if space is Space.DISTORTED:
                cached = weighted_centroid(tokens, table, resolver)
            else:
                cached = centroid(tokens, table)
            self.centroids[key] = cached
        return cached


@dataclass(frozen=True, eq=False)
class FeatureSpace:
    """Fitted feature extractors and the layout of their outputs."""
    config: WespadConfig
    layout: FeatureLayout
    vocab: Mapping[str, int]
    patterns: tuple[SubtreePattern, ...] = ()
    ig: Optional[IGWeights] = None
    regular: Optional[RegionFlagModel] = None
    distorted: Optional[RegionFlagModel] = None
    prev_context: Optional[RegionFlagModel] = None
    next_context: Optional[RegionFlagModel] = None
    table: Optional[EmbeddingTable] = field(default=None, repr=False)
    memo: FeatureMemo = field(default_factory=FeatureMemo, repr=False)

    @cached_property
    def resolver(self) -> Optional[IGResolver]:
        if self.ig is None or self.table is None:
            return None
        return IGResolver(self.ig, self.table)

    def centroid(self, tokens: Sequence[str], space: Space) -> CentroidVector:
        resolver = self.resolver if space is Space.DISTORTED else None
        return self.memo.centroid(tokens, space, self.table, resolver)

    def subtree_matches(self, forest: Optional[DependencyForest]) -> frozenset[int]:
        if forest is None or not self.patterns:
            return frozenset()
        key = (_mining_key(self.config), len(self.patterns), forest)
        cached = self.memo.subtrees.get(key)
        if cached is None:
            cached = frozenset(subtree_features(forest, self.patterns))
            self.memo.subtrees[key] = cached
        return cached

    def _context_model(self, group: FeatureGroup) -> Optional[RegionFlagModel]:
        return self.prev_context if group is FeatureGroup.CONTEXT_PREV else self.next_context

    def featurize(self, post: Post) -> SparseVector:
        entries: dict[int, float] = {}
        layout = self.layout

        if layout.has(FeatureGroup.LEX):
            base = layout.offset(FeatureGroup.LEX)
            for key in ngrams(post.tokens):
                index = self.vocab.get(key)
                if index is not None:
                    entries[base + index] = 1.0

        if layout.has(FeatureGroup.SYN):
            base = layout.offset(FeatureGroup.SYN)
            for index in self.subtree_matches(post.tree):
                entries[base + index] = 1.0

        if layout.has(FeatureGroup.CENTROID):
            base = layout.offset(FeatureGroup.CENTROID)
            values = self.centroid(post.tokens, Space.REGULAR).values
            for i in np.flatnonzero(values):
                entries[base + int(i)] = float(values[i])

        flag_sources = [
            (FeatureGroup.PARTITIONING, self.regular, post.tokens, Space.REGULAR),
            (FeatureGroup.DISTORTION, self.distorted, post.tokens, Space.DISTORTED),
        ]
        for group, attr in CONTEXT_FIELDS.items():
            text = getattr(post, attr)
            tokens = tuple(tokenize(text)) if text else None
            flag_sources.append((group, self._context_model(group), tokens, _context_space(self.config)))

        for group, model, tokens, space in flag_sources:
            if not layout.has(group) or model is None or tokens is None:
                continue
            flags = region_flags(model, self.centroid(tokens, space))
            base = layout.offset(group)
            for i in np.flatnonzero(flags):
                entries[base + int(i)] = 1.0

        return SparseVector.from_dict(entries, layout.dim)


@dataclass(frozen=True, eq=False)
class WespadModel:
    """A fitted feature space plus the final classifier over it."""
    features: FeatureSpace
    final_classifier: LinearModel
    embeddings_ref: Optional[dict[str, str]] = None

    @property
    def config(self) -> WespadConfig:
        return self.features.config

    @property
    def layout(self) -> FeatureLayout:
        return self.features.layout

    def __repr__(self) -> str:
        return f"WespadModel(dim={self.layout.dim}, groups={list(self.layout.sizes)})"


class TrainingSplit:
    """
    The alpha/K-independent state of one training split.

    Holds the vocabulary, information gain and mined patterns (per mining
    settings), plus already-fitted region models keyed by space and K so that
    grid points differing only in alpha share them.
    """

    def __init__(self, train: Corpus, table: Optional[EmbeddingTable] = None):
        self.train = train
        self.table = table
        self.memo = FeatureMemo()
        self._patterns: dict[tuple, tuple[SubtreePattern, ...]] = {}
        self._regions: dict[tuple, Optional[RegionFlagModel]] = {}

    @cached_property
    def vocab(self) -> dict[str, int]:
        return ngram_vocab(self.train)

    @cached_property
    def ig(self) -> IGWeights:
        return compute_ig(self.train)

    @cached_property
    def resolver(self) -> IGResolver:
        return IGResolver(self.ig, self.table)

    def patterns(self, config: WespadConfig) -> tuple[SubtreePattern, ...]:
        key = _mining_key(config)
        if key not in self._patterns:
            self._patterns[key] = self._mine(config)
        return self._patterns[key]

    def _mine(self, config: WespadConfig) -> tuple[SubtreePattern, ...]:
        with_trees = [post for post in self.train if post.tree is not None]
        if not with_trees:
            logger.warning("no_training_trees", posts=len(self.train))
            return ()
        trees = lambda posts: [t for post in posts for t in post.tree.sentences]  # noqa: E731
        if config.per_class_mining:
            found = mine_per_class(
                trees(p for p in with_trees if p.is_positive),
                trees(p for p in with_trees if not p.is_positive),
                config.min_support,
                config.min_size,
                config.max_size,
            )
        else:
            found = mine_frequent_subtrees(
                trees(with_trees), config.min_support, config.min_size, config.max_size
            )
        return tuple(found)

    def centroid(self, tokens: Sequence[str], space: Space) -> CentroidVector:
        resolver = self.resolver if space is Space.DISTORTED else None
        return self.memo.centroid(tokens, space, self.table, resolver)

    def region_model(
        self,
        role: str,
        space: Space,
        k: int,
        alpha: float,
        config: WespadConfig,
    ) -> Optional[RegionFlagModel]:
        """
        Region model for `role` ("anchor" or a context text field).

        Returns None for a context role with fewer usable posts than k.
        """
        key = (
            role, space, k, config.seed, config.l2, config.max_iter, config.tol,
            config.kmeans_restarts, config.kmeans_max_iter,
        )
        if key not in self._regions:
            self._regions[key] = self._fit_region(role, space, k, config)
        model = self._regions[key]
        return None if model is None else model.with_alpha(alpha)

    def _fit_region(self, role: str, space: Space, k: int, config: WespadConfig) -> Optional[RegionFlagModel]:
        vectors: list[CentroidVector] = []
        labels: list[int] = []
        for post in self.train:
            if role == "anchor":
                tokens = post.tokens
            else:
                text = getattr(post, role)
                if not text:
                    continue
                tokens = tokenize(text)
            vectors.append(self.centroid(tokens, space))
            labels.append(1 if post.is_positive else 0)

        if role != "anchor":
            usable = sum(1 for v in vectors if not v.is_empty)
            if usable < k:
                logger.warning("context_model_omitted", context=role, usable_posts=usable, k=k)
                return None

        return fit_region_model(
            vectors,
            labels,
            alpha=0.0,
            k=k,
            seed=config.seed,
            space=space,
            logistic=_logistic(config),
            restarts=config.kmeans_restarts,
            kmeans_max_iter=config.kmeans_max_iter,
        )


def build_feature_space(split: TrainingSplit, config: WespadConfig) -> FeatureSpace:
    """Fit every enabled feature extractor of `config` on the split."""
    if needs_embeddings(config) and split.table is None:
        raise ValueError("An embedding table is required for the enabled feature groups")

    sizes: dict[FeatureGroup, int] = {}
    vocab: Mapping[str, int] = {}
    patterns: tuple[SubtreePattern, ...] = ()
    ig = None
    regular = distorted = None
    contexts: dict[FeatureGroup, Optional[RegionFlagModel]] = {}
    context_space = _context_space(config)
    context_k = config.k2_partitions if config.context_distorted else config.k_partitions
    context_alpha = config.alpha2 if config.context_distorted else config.alpha

    if config.lex_feats:
        vocab = split.vocab
        sizes[FeatureGroup.LEX] = len(vocab)
    if config.syn_feats:
        patterns = split.patterns(config)
        sizes[FeatureGroup.SYN] = len(patterns)
    if config.centroid:
        sizes[FeatureGroup.CENTROID] = split.table.dim
    if config.we_partitioning:
        regular = split.region_model("anchor", Space.REGULAR, config.k_partitions, config.alpha, config)
        sizes[FeatureGroup.PARTITIONING] = 2 * config.k_partitions
    if config.we_distortion or (config.context_distorted and (config.context_prev or config.context_next)):
        ig = split.ig
    if config.we_distortion:
        distorted = split.region_model("anchor", Space.DISTORTED, config.k2_partitions, config.alpha2, config)
        sizes[FeatureGroup.DISTORTION] = 2 * config.k2_partitions
    for group, attr in CONTEXT_FIELDS.items():
        if config.enabled(group):
            contexts[group] = split.region_model(attr, context_space, context_k, context_alpha, config)
            sizes[group] = 2 * context_k

    return FeatureSpace(
        config=config,
        layout=FeatureLayout.build(sizes),
        vocab=vocab,
        patterns=patterns,
        ig=ig,
        regular=regular,
        distorted=distorted,
        prev_context=contexts.get(FeatureGroup.CONTEXT_PREV),
        next_context=contexts.get(FeatureGroup.CONTEXT_NEXT),
        table=split.table,
        memo=split.memo,
    )


def fit_wespad(
    train: Corpus,
    config: WespadConfig,
    table: Optional[EmbeddingTable] = None,
    trees: Optional[Mapping[str, DependencyForest]] = None,
    split: Optional[TrainingSplit] = None,
) -> WespadModel:
    """
    Fit the full model on a training corpus.

    Args:
        train: Training posts (both classes when distortion is enabled)
        config: Hyperparameters and feature toggles
        table: Embedding table; may be None only when no embedding group is enabled
        trees: Optional forests keyed by post id; attached to the training posts
        split: Pre-built split state to reuse across grid points

    Returns:
        WespadModel

    Raises:
        DegenerateCorpusError: single-class corpus with distortion enabled
        NotEnoughPointsError: fewer covered training posts than K
        EmptyDatasetError: empty training corpus
    """
    if trees is not None:
        train, _ = attach_trees(train, trees)
        split = None
    if split is None:
        split = TrainingSplit(train, table)

    features = build_feature_space(split, config)
    rows = [features.featurize(post) for post in split.train]
    X = stack_rows(rows, features.layout.dim)
    final = train_logreg(X, split.train.labels, _logistic(config))
    logger.info(
        "wespad_fitted",
        posts=len(split.train),
        dim=features.layout.dim,
        groups=list(features.layout.sizes),
        iterations=final.iterations,
    )
    return WespadModel(features=features, final_classifier=final)


def featurize(post: Post, model: WespadModel) -> SparseVector:
    """Binary feature vector of a post (raw components in the centroid group)."""
    return model.features.featurize(post)


def featurize_many(posts: Iterable[Post], model: WespadModel) -> sparse.csr_matrix:
    rows = [model.features.featurize(post) for post in posts]
    return stack_rows(rows, model.layout.dim)


def predict(model: WespadModel, post: Post) -> tuple[Label, float]:
    """(label, probability of the positive class); probability 0.5 is positive."""
    probability = float(predict_proba(model.final_classifier, featurize(post, model)))
    return (Label.POSITIVE if probability >= 0.5 else Label.NEGATIVE), probability


def predict_many(model: WespadModel, posts: Sequence[Post]) -> tuple[list[Label], np.ndarray]:
    """Labels and probabilities for a batch of posts, in input order."""
    if not posts:
        return [], np.zeros(0)
    probabilities = np.atleast_1d(predict_proba(model.final_classifier, featurize_many(posts, model)))
    labels = [Label.POSITIVE if p >= 0.5 else Label.NEGATIVE for p in probabilities]
    return labels, probabilities


def describe(model: WespadModel) -> dict[str, Any]:
    """Summary of the fitted components, for logs and manifests."""
    f = model.features
    return {
        "dim": f.layout.dim,
        "groups": dict(f.layout.sizes),
        "vocab": len(f.vocab),
        "patterns": len(f.patterns),
        "ig_words": 0 if f.ig is None else len(f.ig),
        "context_prev": f.prev_context is not None,
        "context_next": f.next_context is not None,
    }
