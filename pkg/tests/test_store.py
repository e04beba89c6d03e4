import numpy as np
import pytest

from defchar_retrieval.exceptions import (
    ConfigurationError, KindMismatch, MixedKinds, UnnormalizedVector, ZeroVector,
)
from defchar_retrieval.features import NUM_SLOTS, DefCharVector, LBPHistogram
from defchar_retrieval.metrics import InputKind, available_metrics, get_metric
from defchar_retrieval.store import IndexItem, append, build_store, retrieve


def defchar_items(n, seed=0):
    rng = np.random.default_rng(seed)
    return [IndexItem(DefCharVector(rng.random(NUM_SLOTS), normalized=True), 1 + i % 3, f'img{i:03d}.png')
            for i in range(n)]


def vector_store(rows):
    return build_store([IndexItem(np.asarray(row, dtype=np.float64), 1, f's{i}') for i, row in enumerate(rows)],
                       'mean_colour')


def brute_force(store, query, metric):
    scores, valid = metric.score_batch(np.asarray(query, dtype=np.float64), store.matrix)
    key = metric.rank_key(scores)
    return sorted(range(len(store)), key=lambda i: (not valid[i], key[i], i))


class TestBuild:
    def test_dense_indices(self):
        store = build_store(defchar_items(3), 'defchars')
        assert [e.index for e in store.entries] == [0, 1, 2]
        assert store.matrix.shape == (3, NUM_SLOTS)

    def test_empty(self):
        store = build_store([], 'defchars')
        assert len(store) == 0
        assert store.matrix.shape[0] == 0

    def test_wind_turbine_sized_store(self):
        store = build_store(defchar_items(304), 'defchars')
        assert len(store) == 304
        assert store.entries[-1].index == 303

    def test_mixed_kinds(self):
        items = defchar_items(2) + [IndexItem(LBPHistogram(np.full(256, 1 / 256)), 1, 'x')]
        with pytest.raises(MixedKinds):
            build_store(items, 'defchars')

    def test_unnormalized_defchars(self):
        with pytest.raises(UnnormalizedVector):
            build_store([IndexItem(DefCharVector(np.zeros(NUM_SLOTS)), 1, 'x')], 'defchars')

    def test_image_rows_share_a_shape(self):
        items = [IndexItem(np.zeros((8, 8, 3), dtype=np.uint8), 1, 'a'),
                 IndexItem(np.zeros((4, 4, 3), dtype=np.uint8), 1, 'b')]
        with pytest.raises(MixedKinds):
            build_store(items, 'raw', image_side=8)

    def test_metadata_has_no_timestamp(self):
        store = build_store(defchar_items(1), 'defchars', extraction={'padding_ratio': 0.1})
        assert set(store.metadata) == {'feature_kind', 'input_kind', 'image_side', 'extraction', 'package_version'}


class TestAppend:
    def test_first_index_is_zero(self):
        store = build_store([], 'defchars')
        assert append(store, defchar_items(1)[0].payload, 2, 'a.png') == 0

    def test_next_index(self):
        store = build_store(defchar_items(5), 'defchars')
        item = defchar_items(1, seed=9)[0]
        assert append(store, item.payload, 1, 'new.png') == 5
        ranked = retrieve(store, item.payload, 'manhattan', k=1)
        assert ranked[0].index == 5
        assert ranked[0].score == 0.0

    def test_wrong_kind(self):
        store = build_store(defchar_items(2), 'defchars')
        with pytest.raises(KindMismatch):
            append(store, LBPHistogram(np.full(256, 1 / 256)), 1, 'x')


class TestRetrieve:
    def test_self_match(self):
        items = defchar_items(10)
        store = build_store(items, 'defchars')
        ranked = retrieve(store, items[7].payload, get_metric('manhattan'), k=3)
        assert (ranked[0].index, ranked[0].score) == (7, 0.0)
        assert ranked[0].class_label == items[7].class_label

    def test_ties_go_to_the_lower_index(self):
        store = vector_store([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert retrieve(store, np.zeros(3), 'manhattan', k=3).indices == (0, 1, 2)

    @pytest.mark.parametrize('metric_name', available_metrics(InputKind.FEATURE_VECTOR))
    def test_matches_a_full_sort(self, metric_name):
        rng = np.random.default_rng(21)
        items = defchar_items(50, seed=5)
        store = build_store(items, 'defchars')
        query = DefCharVector(rng.random(NUM_SLOTS), normalized=True)
        metric = get_metric(metric_name)
        ranked = retrieve(store, query, metric, k=50)
        assert list(ranked.indices) == brute_force(store, query.values, metric)

    def test_chunked_threads_agree_with_sequential(self):
        items = defchar_items(60, seed=2)
        store = build_store(items, 'defchars')
        query = items[11].payload
        one = retrieve(store, query, 'euclidean', k=60)
        many = retrieve(store, query, 'euclidean', k=60, threads=4, chunk_size=7)
        assert one.indices == many.indices
        assert [i.score for i in one] == [i.score for i in many]

    def test_deterministic(self):
        items = defchar_items(20, seed=3)
        store = build_store(items, 'defchars')
        assert retrieve(store, items[0].payload, 'cosine', k=5) == retrieve(store, items[0].payload, 'cosine', k=5)

    def test_k_larger_than_the_store(self):
        store = build_store(defchar_items(4), 'defchars')
        assert len(retrieve(store, defchar_items(1)[0].payload, 'jaccard', k=100)) == 4

    def test_exclude(self):
        items = defchar_items(6)
        store = build_store(items, 'defchars')
        ranked = retrieve(store, items[2].payload, 'manhattan', k=6, exclude=2)
        assert 2 not in ranked.indices
        assert len(ranked) == 5

    def test_degenerate_entries_rank_last(self):
        store = vector_store([[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
        ranked = retrieve(store, np.array([1.0, 1.0, 0.0]), 'cosine', k=3)
        assert ranked.indices == (1, 2, 0)
        assert not ranked[2].valid
        assert ranked.degenerate_count == 1

    def test_degenerate_query(self):
        store = vector_store([[1.0, 0.0, 0.0]])
        with pytest.raises(ZeroVector):
            retrieve(store, np.zeros(3), 'cosine', k=1)

    def test_metric_kind_must_match(self):
        store = build_store(defchar_items(2), 'defchars')
        with pytest.raises(KindMismatch):
            retrieve(store, defchar_items(1)[0].payload, 'mse', k=1)

    def test_k_must_be_positive(self):
        store = build_store(defchar_items(2), 'defchars')
        with pytest.raises(ConfigurationError):
            retrieve(store, defchar_items(1)[0].payload, 'manhattan', k=0)

    def test_image_store(self):
        rng = np.random.default_rng(4)
        images = [rng.integers(1, 256, size=(8, 8, 3), dtype=np.uint8) for _ in range(5)]
        store = build_store([IndexItem(img, 1, f'i{n}') for n, img in enumerate(images)], 'raw', image_side=8)
        for name in ('mse', 'sam', 'uiq'):
            assert retrieve(store, images[3], name, k=1)[0].index == 3


RANKING_TRIALS = 100


def coarse_vectors(rng, n, metric_name):
    """Few distinct levels so ties are common; a few rows the metric cannot score."""
    rows = rng.integers(0, 3, size=(n, 6)) / 2.0
    broken = rng.choice(n, size=min(3, n), replace=False)
    if metric_name == 'cosine':
        rows[broken] = 0.0
    elif metric_name == 'jaccard':
        rows[broken, 0] = -0.5
    query = rng.integers(1, 3, size=6) / 2.0
    return rows, query


def coarse_images(rng, n, metric_name):
    images = rng.choice([1, 128, 255], size=(n, 4, 4, 3)).astype(np.uint8)
    images[:, 0, 0, :] = 1
    images[:, -1, -1, :] = 255
    broken = rng.choice(n, size=min(3, n), replace=False)
    if metric_name == 'sam':
        images[broken, ..., 1] = 0
    elif metric_name == 'uiq':
        images[broken, ..., 2] = 77
    query = rng.choice([1, 128, 255], size=(4, 4, 3)).astype(np.uint8)
    query[0, 0, :] = 1
    query[-1, -1, :] = 255
    return images, query


@pytest.mark.parametrize('metric_name', available_metrics())
def test_random_stores_rank_like_a_full_sort(metric_name):
    metric = get_metric(metric_name)
    rng = np.random.default_rng(sum(map(ord, metric_name)))
    for _ in range(RANKING_TRIALS):
        n = int(rng.integers(1, 51))
        if metric.input_kind is InputKind.IMAGE:
            rows, query = coarse_images(rng, n, metric_name)
            store = build_store([IndexItem(img, 1, f'i{i}') for i, img in enumerate(rows)], 'raw', image_side=4)
        else:
            rows, query = coarse_vectors(rng, n, metric_name)
            store = vector_store(rows)

        expected = brute_force(store, query, metric)
        exclude = int(rng.integers(0, n)) if rng.random() < 0.3 else None
        if exclude is not None:
            expected.remove(exclude)
        k = int(rng.integers(1, n + 2))
        ranked = retrieve(store, query, metric, k=k, exclude=exclude)
        assert list(ranked.indices) == expected[:k]
