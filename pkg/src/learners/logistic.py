"""
Binary Logistic Regression

L2-regularised maximum-likelihood logistic regression trained with the
L-BFGS-B quasi-Newton optimiser. Used both as the centroid classifier Pr of the
region models and as the final classifier over assembled feature vectors.

The objective is the summed log-loss plus 0.5 * l2 * (|w|^2 + b^2); the bias is
regularised too, so single-class data still has a finite optimum.
"""

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import structlog
from scipy import optimize, sparse
from scipy.special import expit

from src.domain.errors import EmptyDatasetError, FeatureDimensionError, NonFiniteFeatureError
from src.learners.sparse import SparseVector, as_design_matrix

logger = structlog.get_logger(__name__)

# Keeps probabilities strictly inside (0, 1).
_PROB_EPS = 1e-15


@dataclass(frozen=True)
class LogisticConfig:
    """Optimiser settings."""
    l2: float = 1.0
    max_iter: int = 200
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Fitted logistic regression parameters plus training metadata."""
    weights: np.ndarray
    bias: float
    l2: float = 1.0
    iterations: int = 0
    final_objective: float = 0.0
    converged: bool = True
    objective_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def negated(self) -> "LinearModel":
        """Model with negated weights and bias: its probabilities are 1 - p."""
        return LinearModel(-self.weights, -self.bias, self.l2, self.iterations, self.final_objective)

    def to_dict(self) -> dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "bias": float(self.bias),
            "l2": float(self.l2),
            "iterations": int(self.iterations),
            "final_objective": float(self.final_objective),
            "converged": bool(self.converged),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LinearModel":
        return cls(
            weights=np.asarray(data["weights"], dtype=np.float64),
            bias=float(data["bias"]),
            l2=float(data["l2"]),
            iterations=int(data["iterations"]),
            final_objective=float(data["final_objective"]),
            converged=bool(data["converged"]),
        )

    def __repr__(self) -> str:
        return f"LinearModel(dim={self.dim}, bias={self.bias:.4f}, iterations={self.iterations})"


def logistic_objective(params: np.ndarray, X, y: np.ndarray, l2: float) -> tuple[float, np.ndarray]:
    """
    Regularised negative log-likelihood and its gradient.

    Args:
        params: Weights followed by the bias
        X: Design matrix (n, d), dense or sparse
        y: 0/1 labels (n,)
        l2: Regularisation strength

    Returns:
        (objective, gradient with the bias component last)
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    loss = float(np.sum(np.logaddexp(0.0, z) - y * z))
    loss += 0.5 * l2 * (float(w @ w) + b * b)
    residual = expit(z) - y
    grad = np.empty_like(params)
    grad[:-1] = X.T @ residual + l2 * w
    grad[-1] = residual.sum() + l2 * b
    return loss, grad


def train_logreg(X, y: Sequence[int], config: LogisticConfig = LogisticConfig()) -> LinearModel:
    """
    Fit a binary logistic regression.

    Starts from all-zero parameters, so the fit is deterministic for given
    inputs and config.

    Args:
        X: Training vectors (sparse matrix, 2-D array, SparseVectors or 1-D arrays)
        y: 0/1 labels
        config: Optimiser settings

    Returns:
        LinearModel

    Raises:
        EmptyDatasetError: no training rows
        NonFiniteFeatureError: NaN or infinite feature values
    """
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise EmptyDatasetError("Cannot train logistic regression on an empty dataset")
    X = as_design_matrix(X)
    if X.shape[0] != y.size:
        raise FeatureDimensionError(f"{X.shape[0]} rows but {y.size} labels")
    values = X.data if sparse.issparse(X) else X
    if not np.all(np.isfinite(values)):
        raise NonFiniteFeatureError("Training features contain NaN or infinite values")

    history: list[float] = []

    def record(xk):
        history.append(logistic_objective(xk, X, y, config.l2)[0])

    x0 = np.zeros(X.shape[1] + 1)
    history.append(logistic_objective(x0, X, y, config.l2)[0])
    result = optimize.minimize(
        logistic_objective,
        x0,
        args=(X, y, config.l2),
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": config.max_iter, "gtol": config.tol, "ftol": 1e-12},
    )
    model = LinearModel(
        weights=np.asarray(result.x[:-1], dtype=np.float64),
        bias=float(result.x[-1]),
        l2=config.l2,
        iterations=int(result.nit),
        final_objective=float(result.fun),
        converged=bool(result.success),
        objective_history=tuple(history),
    )
    logger.debug(
        "logreg_trained",
        rows=int(X.shape[0]),
        dim=model.dim,
        iterations=model.iterations,
        objective=model.final_objective,
        converged=model.converged,
    )
    return model


def predict_proba(model: LinearModel, x) -> float | np.ndarray:
    """
    sigmoid(w . x + b).

    A single vector (SparseVector or 1-D array) gives a float; a matrix gives
    one probability per row.

    Raises:
        FeatureDimensionError: x does not match the model dimension
    """
    if isinstance(x, SparseVector):
        if x.dim != model.dim:
            raise FeatureDimensionError(f"Vector dim {x.dim} != model dim {model.dim}")
        z = float(model.weights[x.indices] @ x.values) + model.bias
        return float(np.clip(expit(z), _PROB_EPS, 1.0 - _PROB_EPS))

    single = not sparse.issparse(x) and np.ndim(x) == 1
    matrix = as_design_matrix(np.asarray(x)[None, :] if single else x)
    if matrix.shape[1] != model.dim:
        raise FeatureDimensionError(f"Vector dim {matrix.shape[1]} != model dim {model.dim}")
    probs = np.clip(expit(matrix @ model.weights + model.bias), _PROB_EPS, 1.0 - _PROB_EPS)
    return float(probs[0]) if single else np.asarray(probs)
