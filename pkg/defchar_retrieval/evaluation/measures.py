"""Precision@K, AP@K and mAP@K.

AP@K here is the mean of Precision@K over the queries of one class, not the
rank-weighted average precision. Spreads are population standard deviations.
"""

from typing import Any, Callable, Sequence, Tuple

import numpy as np

from defchar_retrieval.exceptions import ConfigurationError, EmptyClass, EvaluationError


def precision_at_k(ranked: Sequence[Any], relevant: Callable[[Any], bool], k: int) -> float:
    """Relevant items among the first ``k``, divided by ``k`` even if fewer were ranked."""
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    hits = sum(1 for item in list(ranked)[:k] if relevant(item))
    return hits / k


def ap_at_k(per_query_precisions: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(per_query_precisions, dtype=np.float64)
    if values.size == 0:
        raise EmptyClass("AP@K needs at least one scored query")
    return float(values.mean()), float(values.std())


def map_at_k(per_class_ap_means: Sequence[float]) -> Tuple[float, float]:
    """Unweighted mean and spread of class AP@K values."""
    values = np.asarray(per_class_ap_means, dtype=np.float64)
    if values.size == 0:
        raise EvaluationError("mAP@K needs at least one class")
    return float(values.mean()), float(values.std())
