"""Metric descriptors, ordering semantics and the name registry."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Tuple, Type

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval.exceptions import DimensionMismatch, MetricError, UnknownMetric

# (query row, entry matrix) -> (scores, valid)
BatchKernel = Callable[[NDArray, NDArray], Tuple[NDArray[np.float64], NDArray[np.bool_]]]


class InputKind(str, Enum):
    FEATURE_VECTOR = 'feature_vector'
    IMAGE = 'image'


class Direction(str, Enum):
    LOWER_IS_SIMILAR = 'lower_is_similar'
    HIGHER_IS_SIMILAR = 'higher_is_similar'


@dataclass(frozen=True)
class MetricDescriptor:
    """A similarity measure with its input kind and ranking direction.

    ``kernel`` scores one query against a stack of entries and reports which
    entries were degenerate; ``validate`` raises for a degenerate operand and
    ``degenerate_error`` is raised when a single pair cannot be scored.
    """
    name: str
    input_kind: InputKind
    direction: Direction
    kernel: BatchKernel = field(repr=False, compare=False)
    validate: Callable[[NDArray], None] = field(repr=False, compare=False)
    degenerate_error: Type[MetricError] = field(default=MetricError, repr=False, compare=False)

    @property
    def sentinel(self) -> float:
        """Score given to degenerate entries so they rank after every valid one."""
        return np.inf if self.direction is Direction.LOWER_IS_SIMILAR else -np.inf

    def rank_key(self, scores: NDArray[np.float64]) -> NDArray[np.float64]:
        """Ascending key: most similar first."""
        return scores if self.direction is Direction.LOWER_IS_SIMILAR else -scores

    def score_batch(self, query: NDArray, entries: NDArray) -> Tuple[NDArray[np.float64], NDArray[np.bool_]]:
        scores, valid = self.kernel(query, entries)
        return np.where(valid, scores, self.sentinel), valid

    def score_pair(self, x: NDArray, y: NDArray) -> float:
        if x.shape != y.shape:
            raise DimensionMismatch(f"{self.name}: operand shapes {x.shape} and {y.shape} differ")
        self.validate(x)
        self.validate(y)
        scores, valid = self.kernel(x, y[np.newaxis])
        if not valid[0]:
            raise self.degenerate_error(f"{self.name} is undefined for this pair")
        return float(scores[0])


_METRICS: Dict[str, MetricDescriptor] = {}


def register_metric(descriptor: MetricDescriptor) -> MetricDescriptor:
    _METRICS[descriptor.name] = descriptor
    return descriptor


def get_metric(name: str) -> MetricDescriptor:
    try:
        return _METRICS[name.strip().lower()]
    except KeyError:
        raise UnknownMetric(f"unknown metric '{name}'; choose from {', '.join(sorted(_METRICS))}") from None


def available_metrics(input_kind: InputKind = None) -> Tuple[str, ...]:
    return tuple(sorted(name for name, metric in _METRICS.items()
                        if input_kind is None or metric.input_kind is input_kind))
