"""Similarity measures with explicit ranking direction."""

from .base import Direction, InputKind, MetricDescriptor, available_metrics, get_metric, register_metric
from .image_metrics import MSE, SAM, UIQ, mse, sam, uiq
from .vector_metrics import COSINE, EUCLIDEAN, JACCARD, MANHATTAN, cosine, euclidean, jaccard, manhattan

__all__ = [
    'Direction', 'InputKind', 'MetricDescriptor', 'available_metrics', 'get_metric', 'register_metric',
    'MSE', 'SAM', 'UIQ', 'mse', 'sam', 'uiq',
    'COSINE', 'EUCLIDEAN', 'JACCARD', 'MANHATTAN', 'cosine', 'euclidean', 'jaccard', 'manhattan',
]
