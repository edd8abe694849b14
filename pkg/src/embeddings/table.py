"""
Word Embedding Table and Post Centroids

An immutable word -> vector table plus the centroid operations built on it:
the plain mean of a post's word vectors, the weighted mean used for the
distorted space, and cosine nearest-neighbour search restricted to a word set.
"""

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from src.domain.errors import EmbeddingFormatError


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """
    Pretrained word vectors.

    Rows of `matrix` follow `words`; `index` maps a word to its row.
    """
    words: tuple[str, ...]
    matrix: np.ndarray
    source: str = "word2vec-text"
    index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(self.words):
            raise EmbeddingFormatError(
                f"Embedding matrix shape {matrix.shape} does not match {len(self.words)} words"
            )
        if not np.all(np.isfinite(matrix)):
            raise EmbeddingFormatError("Embedding table holds non-finite components")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "index", {word: i for i, word in enumerate(self.words)})

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Sequence[float]], source: str = "word2vec-text") -> "EmbeddingTable":
        words = tuple(vectors)
        if not words:
            return cls(words=(), matrix=np.zeros((0, 0)), source=source)
        return cls(words=words, matrix=np.array([vectors[w] for w in words], dtype=np.float64), source=source)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def lookup(self, word: str) -> Optional[np.ndarray]:
        """Vector of `word`, or None when the word is absent."""
        row = self.index.get(word)
        return None if row is None else self.matrix[row]

    def __repr__(self) -> str:
        return f"EmbeddingTable(words={len(self)}, dim={self.dim}, source='{self.source}')"


@dataclass(frozen=True, eq=False)
class CentroidVector:
    """A post's point in embedding space. Empty when no token was covered."""
    values: np.ndarray
    covered_tokens: int
    total_tokens: int

    @property
    def is_empty(self) -> bool:
        return self.covered_tokens == 0

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __repr__(self) -> str:
        return f"CentroidVector(dim={self.dim}, covered={self.covered_tokens}/{self.total_tokens})"


def _covered_rows(tokens: Sequence[str], table: EmbeddingTable) -> list[int]:
    return [table.index[t] for t in tokens if t in table.index]


def centroid(tokens: Sequence[str], table: EmbeddingTable) -> CentroidVector:
    """
    Arithmetic mean of the vectors of the tokens found in the table.

    Absent tokens are skipped; duplicates count once per occurrence. With no
    covered token the result is the zero vector, flagged empty.
    """
    rows = _covered_rows(tokens, table)
    if not rows:
        return CentroidVector(np.zeros(table.dim), 0, len(tokens))
    return CentroidVector(table.matrix[rows].mean(axis=0), len(rows), len(tokens))


def weighted_centroid(
    tokens: Sequence[str],
    table: EmbeddingTable,
    weight_of: Callable[[str], float] | Mapping[str, float],
) -> CentroidVector:
    """
    Weighted mean sum(w_i * W_i) / sum(w_i) over covered tokens.

    Args:
        tokens: Post tokens
        table: Embedding table
        weight_of: Per-word non-negative weight (the information gain lookup in
            the distorted space); a mapping is read with a default of 0

    Returns:
        CentroidVector; equals centroid() when all covered weights are zero
    """
    if isinstance(weight_of, Mapping):
        mapping = weight_of
        weight_of = lambda word: mapping.get(word, 0.0)  # noqa: E731

    covered = [t for t in tokens if t in table.index]
    if not covered:
        return CentroidVector(np.zeros(table.dim), 0, len(tokens))

    weights = np.array([weight_of(t) for t in covered], dtype=np.float64)
    total = weights.sum()
    if total <= 0.0:
        return centroid(tokens, table)
    rows = [table.index[t] for t in covered]
    values = weights @ table.matrix[rows] / total
    return CentroidVector(values, len(covered), len(tokens))


class NeighbourIndex:
    """
    Cosine nearest-neighbour search over a fixed candidate word set.

    Candidates are kept in lexicographic order so that exact similarity ties
    resolve to the lexicographically smallest word.
    """

    def __init__(self, table: EmbeddingTable, candidates: Iterable[str]):
        self.table = table
        self.candidates = tuple(sorted(w for w in set(candidates) if w in table.index))
        if self.candidates:
            rows = table.matrix[[table.index[w] for w in self.candidates]]
            self._unit = _normalize_rows(rows)
        else:
            self._unit = np.zeros((0, table.dim))
        self._members = frozenset(self.candidates)
        self._cache: dict[str, Optional[str]] = {}

    def nearest(self, word: str) -> Optional[str]:
        """Most cosine-similar candidate, or None if `word` has no vector or there are no candidates."""
        if word in self._cache:
            return self._cache[word]
        vector = self.table.lookup(word)
        if vector is None or not self.candidates:
            result = None
        elif word in self._members:
            result = word
        else:
            sims = self._unit @ _normalize_rows(vector[None, :])[0]
            result = self.candidates[int(np.argmax(sims))]
        self._cache[word] = result
        return result


def nearest_in_set(word: str, table: EmbeddingTable, candidate_set: Iterable[str]) -> Optional[str]:
    """
    Candidate word with the highest cosine similarity to `word`.

    Returns None when `word` is absent from the table or the candidate set is
    empty; ties go to the lexicographically smallest candidate.
    """
    return NeighbourIndex(table, candidate_set).nearest(word)


def _normalize_rows(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    # Zero vectors keep similarity 0 with everything.
    return np.divide(rows, norms, out=np.zeros_like(rows), where=norms > 0)
