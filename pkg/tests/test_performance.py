"""Query latency on stores the size of the largest benchmark dataset."""

import time

import numpy as np
import pytest

from defchar_retrieval.features import LBP_BINS, NUM_SLOTS, DefCharVector, LBPHistogram
from defchar_retrieval.store import IndexItem, build_store, retrieve

pytestmark = pytest.mark.slow

HEATSINK_PATTERNS = 2160 + 4927
QUERY_BUDGET_SECONDS = 0.26


def timed_queries(store, queries, metric):
    store.matrix
    seconds = []
    for query in queries:
        start = time.perf_counter()
        retrieve(store, query, metric, k=20)
        seconds.append(time.perf_counter() - start)
    return float(np.median(seconds))


@pytest.mark.parametrize('metric', ['manhattan', 'euclidean', 'cosine', 'jaccard'])
def test_defchars_query_latency(metric):
    rng = np.random.default_rng(0)
    items = [IndexItem(DefCharVector(row, normalized=True), 1 + i % 2, f'p{i}')
             for i, row in enumerate(rng.random((HEATSINK_PATTERNS, NUM_SLOTS)))]
    store = build_store(items, 'defchars')
    assert len(store) == HEATSINK_PATTERNS
    queries = [items[i].payload for i in range(0, HEATSINK_PATTERNS, 700)]
    assert timed_queries(store, queries, metric) <= QUERY_BUDGET_SECONDS


def test_lbp_query_latency():
    rng = np.random.default_rng(1)
    bins = rng.random((HEATSINK_PATTERNS, LBP_BINS))
    bins /= bins.sum(axis=1, keepdims=True)
    items = [IndexItem(LBPHistogram(row), 1, f'p{i}') for i, row in enumerate(bins)]
    store = build_store(items, 'lbp', image_side=20)
    queries = [items[i].payload for i in range(0, HEATSINK_PATTERNS, 1000)]
    assert timed_queries(store, queries, 'manhattan') <= QUERY_BUDGET_SECONDS
