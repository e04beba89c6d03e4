"""Feature-vector measures: Euclidean, cosine, Manhattan and weighted Jaccard."""

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval.exceptions import BothZero, InputError, NegativeInput, ZeroVector
from defchar_retrieval.metrics.base import Direction, InputKind, MetricDescriptor, register_metric


def _rows(query: NDArray, entries: NDArray):
    q = np.asarray(query, dtype=np.float64).reshape(1, -1)
    e = np.asarray(entries, dtype=np.float64)
    return q, np.ascontiguousarray(e.reshape(e.shape[0], -1))


def _all_valid(e: NDArray) -> NDArray[np.bool_]:
    return np.ones(e.shape[0], dtype=bool)


def _validate_vector(x: NDArray) -> None:
    if x.ndim != 1 or x.size == 0:
        raise InputError(f"expected a nonempty 1-D feature vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("feature vectors must be finite")


def _euclidean_kernel(query, entries):
    q, e = _rows(query, entries)
    diff = e - q
    return np.sqrt(np.einsum('nd,nd->n', diff, diff)), _all_valid(e)


def _manhattan_kernel(query, entries):
    q, e = _rows(query, entries)
    return np.abs(e - q).sum(axis=1), _all_valid(e)


def _cosine_kernel(query, entries):
    q, e = _rows(query, entries)
    norms = np.sqrt(np.einsum('nd,nd->n', e, e) * np.einsum('nd,nd->n', q, q))
    valid = norms > 0
    dots = np.einsum('nd,nd->n', e, np.broadcast_to(q, e.shape))
    with np.errstate(divide='ignore', invalid='ignore'):
        scores = np.where(valid, dots / norms, 0.0)
    return scores, valid


def _validate_cosine(x: NDArray) -> None:
    _validate_vector(x)
    if not np.any(x):
        raise ZeroVector("cosine similarity is undefined for an all-zero vector")


def _jaccard_kernel(query, entries):
    q, e = _rows(query, entries)
    numerator = np.minimum(e, q).sum(axis=1)
    denominator = np.maximum(e, q).sum(axis=1)
    valid = (denominator > 0) & ~np.any(e < 0, axis=1) & ~np.any(q < 0)
    with np.errstate(divide='ignore', invalid='ignore'):
        scores = np.where(valid, numerator / denominator, 0.0)
    return scores, valid


def _validate_jaccard(x: NDArray) -> None:
    _validate_vector(x)
    if np.any(x < 0):
        raise NegativeInput("weighted Jaccard needs nonnegative feature values")


EUCLIDEAN = register_metric(MetricDescriptor('euclidean', InputKind.FEATURE_VECTOR, Direction.LOWER_IS_SIMILAR,
                                             kernel=_euclidean_kernel, validate=_validate_vector))
MANHATTAN = register_metric(MetricDescriptor('manhattan', InputKind.FEATURE_VECTOR, Direction.LOWER_IS_SIMILAR,
                                             kernel=_manhattan_kernel, validate=_validate_vector))
COSINE = register_metric(MetricDescriptor('cosine', InputKind.FEATURE_VECTOR, Direction.HIGHER_IS_SIMILAR,
                                          kernel=_cosine_kernel, validate=_validate_cosine,
                                          degenerate_error=ZeroVector))
JACCARD = register_metric(MetricDescriptor('jaccard', InputKind.FEATURE_VECTOR, Direction.HIGHER_IS_SIMILAR,
                                           kernel=_jaccard_kernel, validate=_validate_jaccard,
                                           degenerate_error=BothZero))


def euclidean(x: NDArray, y: NDArray) -> float:
    return EUCLIDEAN.score_pair(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


def manhattan(x: NDArray, y: NDArray) -> float:
    return MANHATTAN.score_pair(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


def cosine(x: NDArray, y: NDArray) -> float:
    """Cosine of the angle between two nonzero vectors; 1 means identical direction."""
    return COSINE.score_pair(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


def jaccard(x: NDArray, y: NDArray) -> float:
    """Weighted Jaccard: sum of element-wise minima over sum of element-wise maxima."""
    return JACCARD.score_pair(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
