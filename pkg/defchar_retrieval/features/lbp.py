"""8-neighbour local binary patterns aggregated into a 256-bin histogram."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval.exceptions import InputError, TooSmall
from defchar_retrieval.imaging import GrayImage

LBP_BINS = 256

# clockwise from the top-left neighbour; the first neighbour is the most significant bit
NEIGHBOUR_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


@dataclass(frozen=True, eq=False)
class LBPHistogram:
    bins: NDArray[np.float64]

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.float64).reshape(-1)
        if bins.size != LBP_BINS:
            raise InputError(f"an LBP histogram has {LBP_BINS} bins, got {bins.size}")
        object.__setattr__(self, 'bins', bins)

    def __len__(self) -> int:
        return LBP_BINS


def lbp_codes(gray: GrayImage) -> NDArray[np.int64]:
    """LBP code of every interior pixel; a bit is set when neighbour >= centre."""
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise InputError(f"LBP needs a single-channel image, got shape {gray.shape}")
    height, width = gray.shape
    if height < 3 or width < 3:
        raise TooSmall(f"LBP needs at least a 3x3 image, got {width}x{height}")

    centre = gray[1:-1, 1:-1]
    codes = np.zeros(centre.shape, dtype=np.int64)
    for bit, (dy, dx) in enumerate(NEIGHBOUR_OFFSETS):
        neighbour = gray[1 + dy:height - 1 + dy, 1 + dx:width - 1 + dx]
        codes |= (neighbour >= centre).astype(np.int64) << (7 - bit)
    return codes


def lbp_histogram(gray: GrayImage) -> LBPHistogram:
    codes = lbp_codes(gray)
    counts = np.bincount(codes.ravel(), minlength=LBP_BINS).astype(np.float64)
    return LBPHistogram(counts / counts.sum())
