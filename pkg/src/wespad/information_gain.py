"""
Information Gain Weights

Per-word information gain of word presence with respect to the binary post
label, in bits:

    IG(w) = Entr(D) - (|D_w|/|D| * Entr(D_w) + |D~w|/|D| * Entr(D~w))

where D_w are the training posts containing w and D~w the rest. Words unseen
in training borrow the IG of their cosine-nearest training word.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import structlog

from src.domain.errors import DegenerateCorpusError
from src.domain.posts import Corpus
from src.embeddings.table import EmbeddingTable, NeighbourIndex

logger = structlog.get_logger(__name__)


def binary_entropy(positives: int, total: int) -> float:
    """Entropy in bits of a two-class sample; 0 for an empty sample."""
    if total == 0 or positives == 0 or positives == total:
        return 0.0
    p = positives / total
    return float(-(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p)))


@dataclass(frozen=True)
class IGWeights:
    """Information gain of every training word."""
    table: Mapping[str, float]
    corpus_entropy: float
    document_count: int = 0
    train_vocab: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "train_vocab", frozenset(self.table))

    def get(self, word: str) -> Optional[float]:
        return self.table.get(word)

    def __len__(self) -> int:
        return len(self.table)

    def to_dict(self) -> dict:
        return {
            "table": dict(sorted(self.table.items())),
            "corpus_entropy": self.corpus_entropy,
            "document_count": self.document_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IGWeights":
        return cls(
            table={str(w): float(v) for w, v in data["table"].items()},
            corpus_entropy=float(data["corpus_entropy"]),
            document_count=int(data["document_count"]),
        )


def compute_ig(train: Corpus) -> IGWeights:
    """
    Information gain of every distinct training token.

    Presence is per post: a word repeated inside one post counts once.

    Raises:
        DegenerateCorpusError: empty or single-class corpus
    """
    total = len(train)
    positives = train.positive_count
    if total == 0 or positives == 0 or positives == total:
        raise DegenerateCorpusError(
            f"Information gain needs both classes (posts={total}, positive={positives})"
        )
    entropy = binary_entropy(positives, total)

    containing: Counter = Counter()
    containing_pos: Counter = Counter()
    for post in train:
        words = set(post.tokens)
        containing.update(words)
        if post.is_positive:
            containing_pos.update(words)

    table: dict[str, float] = {}
    for word, with_count in containing.items():
        with_pos = containing_pos[word]
        without_count = total - with_count
        without_pos = positives - with_pos
        conditional = (
            with_count / total * binary_entropy(with_pos, with_count)
            + without_count / total * binary_entropy(without_pos, without_count)
        )
        table[word] = min(max(entropy - conditional, 0.0), entropy)

    logger.debug("ig_computed", words=len(table), corpus_entropy=entropy, posts=total)
    return IGWeights(table=table, corpus_entropy=entropy, document_count=total)


class IGResolver:
    """
    IG of arbitrary words: direct for training words, nearest training word
    in the embedding space for the rest, 0 when neither applies.
    """

    def __init__(self, ig: IGWeights, table: EmbeddingTable):
        self.ig = ig
        self.index = NeighbourIndex(table, ig.train_vocab)

    def __call__(self, word: str) -> float:
        value = self.ig.get(word)
        if value is not None:
            return value
        neighbour = self.index.nearest(word)
        if neighbour is None:
            return 0.0
        return self.ig.table[neighbour]


def ig_lookup(word: str, ig: IGWeights, table: EmbeddingTable) -> float:
    """IG of `word`, falling back to its cosine-nearest training word, else 0."""
    return IGResolver(ig, table)(word)
