import numpy as np
import pytest

from defchar_retrieval.exceptions import EmptyRegion, InputError
from defchar_retrieval.features import color_complexity, color_region_stats, total_variation


def hsv_row(*pixels):
    """1 x n HSV image from (h, s, v) triples."""
    return np.array([pixels], dtype=np.float64)


def everything(img):
    return np.ones(img.shape[:2], dtype=bool)


class TestColorRegionStats:
    def test_uniform_red(self):
        img = hsv_row(*[(0.0, 255.0, 255.0)] * 4)
        stats = color_region_stats(img, everything(img))
        assert (stats.avg_hue, stats.mode_hue, stats.unique_hue, stats.hue_range) == (0, 0, 1, 0)
        assert (stats.avg_sat, stats.unique_sat, stats.sat_range) == (255, 1, 0)

    def test_hue_range_is_circular(self):
        img = hsv_row((10.0, 100.0, 100.0), (350.0, 100.0, 100.0))
        assert color_region_stats(img, everything(img)).hue_range == 20

    def test_hand_counted_hues(self):
        img = hsv_row((10.0, 50.0, 10.0), (10.0, 60.0, 20.0), (20.0, 70.0, 30.0))
        stats = color_region_stats(img, everything(img))
        assert (stats.mode_hue, stats.unique_hue, stats.avg_hue) == (10, 2, 13)
        assert (stats.avg_sat, stats.sat_range, stats.unique_sat) == (60, 20, 3)

    def test_mode_ties_pick_the_smallest_level(self):
        img = hsv_row((30.0, 9.0, 1.0), (40.0, 8.0, 1.0))
        stats = color_region_stats(img, everything(img))
        assert stats.mode_hue == 30
        assert stats.mode_sat == 8

    def test_average_rounds_half_up(self):
        img = hsv_row((0.0, 1.0, 0.0), (0.0, 2.0, 0.0))
        assert color_region_stats(img, everything(img)).avg_sat == 2

    def test_only_region_pixels_count(self):
        img = hsv_row((0.0, 0.0, 0.0), (200.0, 0.0, 0.0))
        stats = color_region_stats(img, np.array([[False, True]]))
        assert stats.avg_hue == 200
        assert stats.unique_hue == 1

    def test_empty_region(self):
        img = hsv_row((0.0, 0.0, 0.0))
        with pytest.raises(EmptyRegion):
            color_region_stats(img, np.zeros((1, 1), dtype=bool))

    def test_region_shape_mismatch(self):
        img = hsv_row((0.0, 0.0, 0.0))
        with pytest.raises(InputError):
            color_region_stats(img, np.ones((2, 2), dtype=bool))


class TestColorComplexity:
    def test_identical_distributions(self):
        img = hsv_row((10.0, 20.0, 30.0), (10.0, 20.0, 30.0))
        assert color_complexity(img, np.array([[True, False]]), np.array([[False, True]])) == (0.0, 0.0, 0.0)

    def test_disjoint_hues(self):
        img = hsv_row((0.0, 255.0, 255.0), (240.0, 255.0, 255.0))
        hue_diff, sat_diff, bri_diff = color_complexity(img, np.array([[True, False]]), np.array([[False, True]]))
        assert hue_diff == 1.0
        assert sat_diff == 0.0
        assert bri_diff == 0.0

    def test_half_overlap(self):
        img = hsv_row((0.0, 10.0, 10.0), (0.0, 10.0, 10.0), (0.0, 10.0, 10.0), (120.0, 10.0, 10.0))
        defect = np.array([[True, True, False, False]])
        hue_diff, _, _ = color_complexity(img, defect, ~defect)
        assert hue_diff == pytest.approx(0.5)

    def test_total_variation_bounds(self):
        rng = np.random.default_rng(0)
        p = rng.random(20)
        q = rng.random(20)
        p, q = p / p.sum(), q / q.sum()
        assert 0.0 <= total_variation(p, q) <= 1.0
        assert total_variation(p, p) == 0.0
