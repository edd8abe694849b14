"""Word embedding tables and post centroids"""

from src.embeddings.table import (
    CentroidVector,
    EmbeddingTable,
    NeighbourIndex,
    centroid,
    nearest_in_set,
    weighted_centroid,
)

__all__ = [
    'CentroidVector',
    'EmbeddingTable',
    'NeighbourIndex',
    'centroid',
    'nearest_in_set',
    'weighted_centroid',
]
