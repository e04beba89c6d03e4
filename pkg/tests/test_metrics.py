import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from defchar_retrieval.exceptions import (
    BothZero, DegenerateStatistics, DimensionMismatch, NegativeInput, UnknownMetric, ZeroChannel, ZeroVector,
)
from defchar_retrieval.metrics import (
    Direction, InputKind, available_metrics, cosine, euclidean, get_metric, jaccard, manhattan, mse, sam, uiq,
)

unit_vectors = arrays(np.float64, 12, elements=st.floats(0.01, 1.0))


def random_image(seed, side=4):
    return np.random.default_rng(seed).integers(1, 256, size=(side, side, 3), dtype=np.uint8)


class TestRegistry:
    def test_directions(self):
        lower = {'mse', 'sam', 'euclidean', 'manhattan'}
        for name in available_metrics():
            expected = Direction.LOWER_IS_SIMILAR if name in lower else Direction.HIGHER_IS_SIMILAR
            assert get_metric(name).direction is expected

    def test_kinds(self):
        assert available_metrics(InputKind.IMAGE) == ('mse', 'sam', 'uiq')
        assert available_metrics(InputKind.FEATURE_VECTOR) == ('cosine', 'euclidean', 'jaccard', 'manhattan')

    def test_unknown(self):
        with pytest.raises(UnknownMetric):
            get_metric('hamming')

    def test_lookup_is_case_insensitive(self):
        assert get_metric(' Cosine ').name == 'cosine'


class TestMse:
    def test_identical(self):
        img = random_image(0)
        assert mse(img, img) == 0.0

    def test_black_and_white(self):
        black = np.zeros((3, 3, 3), dtype=np.uint8)
        white = np.full((3, 3, 3), 255, dtype=np.uint8)
        assert mse(black, white) == 65025.0

    def test_matches_a_pixel_loop(self):
        x, y = random_image(1), random_image(2)
        total = 0.0
        for r in range(4):
            for c in range(4):
                for ch in range(3):
                    total += (float(x[r, c, ch]) - float(y[r, c, ch])) ** 2
        assert mse(x, y) == pytest.approx(total / 48, abs=1e-9)

    def test_shapes_must_match(self):
        with pytest.raises(DimensionMismatch):
            mse(random_image(0, 4), random_image(0, 5))


class TestSam:
    def test_identical(self):
        img = random_image(3)
        assert sam(img, img) == pytest.approx(0.0, abs=1e-9)

    def test_scale_invariant(self):
        x = random_image(4).astype(np.float64)
        assert sam(x, 2 * x) == pytest.approx(0.0, abs=1e-9)

    def test_orthogonal(self):
        x = np.array([[[1, 1, 1], [0, 0, 0]]], dtype=np.uint8)
        y = np.array([[[0, 0, 0], [1, 1, 1]]], dtype=np.uint8)
        assert sam(x, y) == pytest.approx(math.pi / 2)

    def test_zero_channel(self):
        x = random_image(5)
        y = x.copy()
        y[..., 1] = 0
        with pytest.raises(ZeroChannel):
            sam(x, y)


class TestUiq:
    def test_identical(self):
        img = random_image(6, side=8)
        assert uiq(img, img) == pytest.approx(1.0, abs=1e-6)

    def test_constant_image(self):
        with pytest.raises(DegenerateStatistics):
            uiq(np.full((8, 8, 3), 9, dtype=np.uint8), random_image(7, side=8))

    def test_matches_direct_formula(self):
        x, y = random_image(8, side=8), random_image(9, side=8)
        expected = []
        for ch in range(3):
            a = x[..., ch].astype(np.float64).ravel()
            b = y[..., ch].astype(np.float64).ravel()
            cov = np.mean((a - a.mean()) * (b - b.mean()))
            expected.append(4 * cov * a.mean() * b.mean() / ((a.var() + b.var()) * (a.mean() ** 2 + b.mean() ** 2)))
        assert uiq(x, y) == pytest.approx(np.mean(expected), abs=1e-9)

    def test_bounded_above_by_one(self):
        assert uiq(random_image(10, side=8), random_image(11, side=8)) <= 1.0


class TestVectorMetrics:
    def test_euclidean(self):
        assert euclidean([0.0, 0.0], [3.0, 4.0]) == 5.0
        assert euclidean([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_manhattan(self):
        assert manhattan([0.2, 0.5], [0.4, 0.1]) == pytest.approx(0.6)
        assert manhattan(np.zeros(38), np.ones(38)) == 38.0

    def test_cosine(self):
        assert cosine([0.2, 0.4], [0.2, 0.4]) == pytest.approx(1.0)
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
        with pytest.raises(ZeroVector):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_jaccard(self):
        assert jaccard([0.3, 0.6], [0.3, 0.6]) == 1.0
        assert jaccard([0.5, 0.0], [0.0, 0.5]) == 0.0
        assert jaccard([1.0, 1.0], [1.0, 0.0]) == 0.5
        with pytest.raises(BothZero):
            jaccard([0.0, 0.0], [0.0, 0.0])
        with pytest.raises(NegativeInput):
            jaccard([-0.1, 0.5], [0.2, 0.5])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            euclidean([0.0, 1.0], [0.0, 1.0, 2.0])

    @settings(max_examples=1000, deadline=None)
    @given(unit_vectors, unit_vectors)
    def test_symmetric(self, x, y):
        for fn in (euclidean, manhattan, cosine, jaccard):
            assert fn(x, y) == pytest.approx(fn(y, x), rel=1e-12, abs=1e-12)

    @settings(max_examples=1000, deadline=None)
    @given(unit_vectors, unit_vectors, unit_vectors)
    def test_triangle_inequality(self, x, y, z):
        for fn in (euclidean, manhattan):
            assert fn(x, z) <= fn(x, y) + fn(y, z) + 1e-12

    @settings(max_examples=1000, deadline=None)
    @given(unit_vectors, unit_vectors)
    def test_ranges(self, x, y):
        assert euclidean(x, y) >= 0
        assert 0 <= manhattan(x, y) <= len(x)
        assert -1 - 1e-12 <= cosine(x, y) <= 1 + 1e-12
        assert 0 <= jaccard(x, y) <= 1

    @settings(max_examples=1000, deadline=None)
    @given(unit_vectors)
    def test_identity_extremes(self, x):
        assert euclidean(x, x) == 0.0
        assert manhattan(x, x) == 0.0
        assert cosine(x, x) == pytest.approx(1.0, abs=1e-9)
        assert jaccard(x, x) == 1.0

    def test_batch_flags_degenerate_entries(self):
        metric = get_metric('cosine')
        scores, valid = metric.score_batch(np.array([1.0, 0.0]), np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert valid.tolist() == [True, False]
        assert scores[1] == -np.inf


@st.composite
def image_pairs(draw, min_pixels=1):
    height = draw(st.integers(1, 8))
    width = draw(st.integers(max(1, min_pixels // height + (min_pixels % height > 0)), 8))
    pixels = arrays(np.uint8, (height, width, 3), elements=st.integers(1, 255), fill=st.nothing())
    return draw(pixels), draw(pixels)


IMAGE_HEALTH_CHECKS = [HealthCheck.too_slow]


def with_spread(img):
    """Same image with a darkest and a brightest pixel, so no channel is constant."""
    img = img.copy()
    img.reshape(-1, 3)[0] = 1
    img.reshape(-1, 3)[-1] = 255
    return img


class TestImageMetricProperties:
    @settings(max_examples=1000, deadline=None, suppress_health_check=IMAGE_HEALTH_CHECKS)
    @given(image_pairs())
    def test_mse(self, pair):
        x, y = pair
        assert mse(x, x) == 0.0
        assert mse(x, y) >= 0.0
        assert mse(x, y) == mse(y, x)

    @settings(max_examples=1000, deadline=None, suppress_health_check=IMAGE_HEALTH_CHECKS)
    @given(image_pairs())
    def test_sam(self, pair):
        x, y = pair
        assert sam(x, x) == pytest.approx(0.0, abs=1e-9)
        assert 0.0 <= sam(x, y) <= math.pi / 2 + 1e-12
        assert sam(x, y) == pytest.approx(sam(y, x), abs=1e-9)

    @settings(max_examples=1000, deadline=None, suppress_health_check=IMAGE_HEALTH_CHECKS)
    @given(image_pairs(), st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
    def test_sam_ignores_scale(self, pair, factor):
        x = pair[0].astype(np.float64)
        assert sam(x, factor * x) == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=1000, deadline=None, suppress_health_check=IMAGE_HEALTH_CHECKS)
    @given(image_pairs(min_pixels=2))
    def test_uiq(self, pair):
        x, y = with_spread(pair[0]), with_spread(pair[1])
        assert uiq(x, x) == pytest.approx(1.0, abs=1e-6)
        assert -1.0 - 1e-6 <= uiq(x, y) <= 1.0 + 1e-6
        assert uiq(x, y) == pytest.approx(uiq(y, x), abs=1e-6)


def loop_mse(x, y):
    total, count = 0.0, 0
    for a, b in zip(x.ravel().tolist(), y.ravel().tolist()):
        total += (a - b) ** 2
        count += 1
    return total / count


def loop_sam(x, y):
    angles = []
    for ch in range(x.shape[2]):
        a, b = x[..., ch].ravel().tolist(), y[..., ch].ravel().tolist()
        dot = sum(p * q for p, q in zip(a, b))
        norm = math.sqrt(sum(p * p for p in a)) * math.sqrt(sum(q * q for q in b))
        angles.append(math.acos(max(-1.0, min(1.0, dot / norm))))
    return sum(angles) / len(angles)


def loop_uiq(x, y):
    scores = []
    for ch in range(x.shape[2]):
        a, b = x[..., ch].ravel().tolist(), y[..., ch].ravel().tolist()
        n = len(a)
        mean_a, mean_b = sum(a) / n, sum(b) / n
        var_a = sum((p - mean_a) ** 2 for p in a) / n
        var_b = sum((q - mean_b) ** 2 for q in b) / n
        cov = sum((p - mean_a) * (q - mean_b) for p, q in zip(a, b)) / n
        scores.append(4 * cov * mean_a * mean_b / ((var_a + var_b) * (mean_a ** 2 + mean_b ** 2)))
    return sum(scores) / len(scores)


def loop_euclidean(x, y):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))


def loop_manhattan(x, y):
    return sum(abs(a - b) for a, b in zip(x, y))


def loop_cosine(x, y):
    dot = sum(a * b for a, b in zip(x, y))
    return dot / (math.sqrt(sum(a * a for a in x)) * math.sqrt(sum(b * b for b in y)))


def loop_jaccard(x, y):
    return sum(min(a, b) for a, b in zip(x, y)) / sum(max(a, b) for a, b in zip(x, y))


REFERENCE_CASES = 500


class TestAgainstScalarLoops:
    @pytest.mark.parametrize('fn, reference', [(mse, loop_mse), (sam, loop_sam), (uiq, loop_uiq)])
    def test_image_metrics(self, fn, reference):
        rng = np.random.default_rng(17)
        for _ in range(REFERENCE_CASES):
            height, width = rng.integers(1, 9, size=2)
            if height * width < 2:
                width = 2
            x = with_spread(rng.integers(1, 256, size=(height, width, 3), dtype=np.uint8))
            y = with_spread(rng.integers(1, 256, size=(height, width, 3), dtype=np.uint8))
            expected = reference(x.astype(np.float64), y.astype(np.float64))
            assert fn(x, y) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize('fn, reference', [
        (euclidean, loop_euclidean), (manhattan, loop_manhattan), (cosine, loop_cosine), (jaccard, loop_jaccard),
    ])
    def test_vector_metrics(self, fn, reference):
        rng = np.random.default_rng(23)
        for _ in range(REFERENCE_CASES):
            x, y = rng.random(38), rng.random(38)
            assert fn(x, y) == pytest.approx(reference(x.tolist(), y.tolist()), rel=1e-9, abs=1e-12)
