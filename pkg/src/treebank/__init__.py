"""Frequent dependency subtree mining and subtree-match features"""

from src.treebank.mining import (
    contains,
    count_support,
    mine_frequent_subtrees,
    mine_per_class,
    subtree_features,
)

__all__ = [
    'contains',
    'count_support',
    'mine_frequent_subtrees',
    'mine_per_class',
    'subtree_features',
]
