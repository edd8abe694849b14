"""Sparse feature vectors and their conversion to scipy design matrices."""

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from src.domain.errors import FeatureDimensionError


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Index -> value entries over a feature space of size `dim`. Zeros are never stored."""
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if indices.shape != values.shape:
            raise ValueError("indices and values must have the same length")
        order = np.argsort(indices, kind="stable")
        indices, values = indices[order], values[order]
        keep = values != 0.0
        indices, values = indices[keep], values[keep]
        if indices.size and (indices[0] < 0 or indices[-1] >= self.dim):
            raise FeatureDimensionError(f"Feature index out of range for dim={self.dim}")
        if indices.size and np.any(np.diff(indices) == 0):
            raise ValueError("duplicate feature index")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dict(cls, entries: Mapping[int, float], dim: int) -> "SparseVector":
        keys = list(entries)
        return cls(np.array(keys, dtype=np.int64), np.array([entries[k] for k in keys]), dim)

    @classmethod
    def from_dense(cls, values: np.ndarray) -> "SparseVector":
        values = np.asarray(values, dtype=np.float64)
        nz = np.flatnonzero(values)
        return cls(nz, values[nz], int(values.shape[0]))

    @property
    def entries(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.values.tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __len__(self) -> int:
        return int(self.indices.size)

    def __repr__(self) -> str:
        return f"SparseVector(nnz={len(self)}, dim={self.dim})"


def stack_rows(rows: Sequence[SparseVector], dim: int | None = None) -> sparse.csr_matrix:
    """Stack sparse vectors into a CSR matrix of shape (len(rows), dim)."""
    if dim is None:
        if not rows:
            raise ValueError("dim is required for an empty row list")
        dim = rows[0].dim
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, row in enumerate(rows):
        if row.dim != dim:
            raise FeatureDimensionError(f"Row {i} has dim {row.dim}, expected {dim}")
        indptr[i + 1] = indptr[i] + len(row)
    indices = np.concatenate([r.indices for r in rows]) if rows else np.zeros(0, dtype=np.int64)
    values = np.concatenate([r.values for r in rows]) if rows else np.zeros(0)
    return sparse.csr_matrix((values, indices, indptr), shape=(len(rows), dim))


def as_design_matrix(X) -> sparse.csr_matrix | np.ndarray:
    """
    Normalise training inputs to a 2-D matrix.

    Accepts a scipy sparse matrix, a 2-D array, or a sequence of SparseVector
    or 1-D arrays.
    """
    if sparse.issparse(X):
        return sparse.csr_matrix(X, dtype=np.float64)
    if isinstance(X, np.ndarray):
        if X.ndim == 1:
            return X.astype(np.float64)[:, None]
        return X.astype(np.float64)
    rows = list(X)
    if rows and isinstance(rows[0], SparseVector):
        return stack_rows(rows)
    return np.atleast_2d(np.asarray(rows, dtype=np.float64))
