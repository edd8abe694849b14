"""Logistic regression, k-means partitioning and sparse feature vectors"""

from src.learners.sparse import SparseVector, as_design_matrix, stack_rows
from src.learners.logistic import LinearModel, LogisticConfig, logistic_objective, predict_proba, train_logreg
from src.learners.kmeans import PartitionModel, kmeans_assign, kmeans_fit

__all__ = [
    'SparseVector',
    'as_design_matrix',
    'stack_rows',
    'LinearModel',
    'LogisticConfig',
    'logistic_objective',
    'predict_proba',
    'train_logreg',
    'PartitionModel',
    'kmeans_assign',
    'kmeans_fit',
]
