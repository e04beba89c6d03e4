"""Colour information and colour complexity over masked HSV regions."""

import math
from dataclasses import astuple, dataclass
from typing import Tuple

import numpy as np

from defchar_retrieval.exceptions import EmptyRegion, InputError
from defchar_retrieval.imaging import ImageHSV, Mask

HUE_LEVELS = 360
SV_LEVELS = 256


@dataclass(frozen=True)
class ColorRegionStats:
    avg_hue: int
    mode_hue: int
    unique_hue: int
    hue_range: int
    avg_sat: int
    mode_sat: int
    unique_sat: int
    sat_range: int
    avg_bri: int
    mode_bri: int
    unique_bri: int
    bri_range: int

    def as_tuple(self) -> Tuple[int, ...]:
        return astuple(self)


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def region_levels(img: ImageHSV, region: Mask) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer hue / saturation / brightness levels of the pixels in ``region``."""
    region = np.asarray(region, dtype=bool)
    if region.shape != img.shape[:2]:
        raise InputError(f"region shape {region.shape} does not match image {img.shape[:2]}")
    if not region.any():
        raise EmptyRegion("colour statistics need a nonempty region")
    pixels = img[region]
    hue = np.floor(pixels[:, 0] + 0.5).astype(np.int64) % HUE_LEVELS
    sat = np.clip(np.floor(pixels[:, 1] + 0.5), 0, SV_LEVELS - 1).astype(np.int64)
    bri = np.clip(np.floor(pixels[:, 2] + 0.5), 0, SV_LEVELS - 1).astype(np.int64)
    return hue, sat, bri


def _channel_stats(values: np.ndarray, levels: int) -> Tuple[int, int, int, int]:
    counts = np.bincount(values, minlength=levels)
    average = round_half_up(float(values.mean()))
    mode = int(np.argmax(counts))  # first maximum: smallest value wins ties
    unique = int(np.count_nonzero(counts))
    spread = int(values.max() - values.min())
    return average, mode, unique, spread


def color_region_stats(img: ImageHSV, region: Mask) -> ColorRegionStats:
    """Average, mode, unique count and range of H, S and V inside ``region``.

    Hue range is read circularly: min(max - min, 360 - (max - min)).
    """
    hue, sat, bri = region_levels(img, region)
    avg_hue, mode_hue, unique_hue, hue_spread = _channel_stats(hue, HUE_LEVELS)
    return ColorRegionStats(
        avg_hue, mode_hue, unique_hue, min(hue_spread, HUE_LEVELS - hue_spread),
        *_channel_stats(sat, SV_LEVELS),
        *_channel_stats(bri, SV_LEVELS),
    )


def _frequencies(values: np.ndarray, levels: int) -> np.ndarray:
    return np.bincount(values, minlength=levels) / float(values.size)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def color_complexity(img: ImageHSV, defect: Mask, background: Mask) -> Tuple[float, float, float]:
    """Total variation distance between defect and background H, S, V histograms."""
    defect_levels = region_levels(img, defect)
    background_levels = region_levels(img, background)
    bins = (HUE_LEVELS, SV_LEVELS, SV_LEVELS)
    return tuple(
        total_variation(_frequencies(d, n), _frequencies(b, n))
        for d, b, n in zip(defect_levels, background_levels, bins)
    )
