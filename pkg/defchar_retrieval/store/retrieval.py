"""Exhaustive similarity scoring and ranking over a datastore."""

from dataclasses import dataclass
from typing import Any, Iterator, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import ConfigurationError, KindMismatch
from defchar_retrieval.metrics import MetricDescriptor, get_metric
from defchar_retrieval.store.datastore import Datastore
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class RankedItem:
    index: int
    score: float
    class_label: int
    source_image: str
    valid: bool = True


@dataclass(frozen=True)
class RankedResults:
    """Entries ordered most-similar first; ties broken by ascending index.

    Entries the metric could not score sit at the end with a sentinel score
    and ``valid=False``.
    """
    items: Tuple[RankedItem, ...]
    metric: MetricDescriptor

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[RankedItem]:
        return iter(self.items)

    def __getitem__(self, position: int) -> RankedItem:
        return self.items[position]

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(item.index for item in self.items)

    @property
    def degenerate_count(self) -> int:
        return sum(1 for item in self.items if not item.valid)


def score_all(store: Datastore,
              query_row: np.ndarray,
              metric: MetricDescriptor,
              threads: int = 1,
              chunk_size: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Score every entry; chunked fan-out gives the same values as one sequential pass."""
    matrix = store.matrix
    chunk_size = chunk_size or Config.RETRIEVAL_CHUNK_SIZE
    bounds = [(start, min(start + chunk_size, len(matrix))) for start in range(0, len(matrix), chunk_size)]
    if not bounds:
        return np.empty(0, dtype=np.float64), np.empty(0, dtype=bool)

    if threads > 1 and len(bounds) > 1:
        parts = Parallel(n_jobs=threads, prefer='threads')(
            delayed(metric.score_batch)(query_row, matrix[start:stop]) for start, stop in bounds
        )
    else:
        parts = [metric.score_batch(query_row, matrix[start:stop]) for start, stop in bounds]
    scores = np.concatenate([part[0] for part in parts])
    valid = np.concatenate([part[1] for part in parts])
    return scores, valid


def retrieve(store: Datastore,
             query: Any,
             metric: Union[str, MetricDescriptor],
             k: int,
             exclude: Optional[int] = None,
             threads: int = 1,
             chunk_size: Optional[int] = None) -> RankedResults:
    """Top-k entries for ``query`` under ``metric``.

    ``exclude`` drops one index from the ranking (leave-one-out queries). A
    query the metric cannot score raises that metric's error.
    """
    if isinstance(metric, str):
        metric = get_metric(metric)
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    if metric.input_kind is not store.input_kind:
        raise KindMismatch(
            f"metric '{metric.name}' compares {metric.input_kind.value} payloads, "
            f"store '{store.feature_kind}' holds {store.input_kind.value} payloads"
        )

    query_row = store.coerce(query)
    metric.validate(query_row)

    scores, valid = score_all(store, query_row, metric, threads=threads, chunk_size=chunk_size)
    indices = np.arange(len(scores))
    if exclude is not None and 0 <= exclude < len(scores):
        keep = indices != exclude
        scores, valid, indices = scores[keep], valid[keep], indices[keep]

    order = np.lexsort((indices, metric.rank_key(scores), ~valid))[:k]
    if not valid.all():
        logger.debug(f"{np.count_nonzero(~valid)} entries could not be scored with {metric.name}")

    items = tuple(
        RankedItem(index=int(indices[i]), score=float(scores[i]),
                   class_label=store.entries[indices[i]].class_label,
                   source_image=store.entries[indices[i]].source_image,
                   valid=bool(valid[i]))
        for i in order
    )
    return RankedResults(items=items, metric=metric)
