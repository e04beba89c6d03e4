"""
The 38-slot DefChars vector and its fixed-range [0, 1] normalization.

Slot order is canonical and is the column order of the datastore CSV:
12 defect colour slots, 12 background colour slots, 3 colour complexity,
5 shape information, 4 shape complexity and 2 meta slots.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Sequence

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import AlreadyNormalized, EmptyRegion, InputError
from defchar_retrieval.features.color import color_complexity, color_region_stats
from defchar_retrieval.features.shape import meta_info, shape_complexity, shape_info
from defchar_retrieval.geometry import polygon_from_mask
from defchar_retrieval.imaging import PatternRecord, to_hsv
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

MAX_EDGES = 64

_COLOUR_SLOTS = (
    'avg_hue', 'mode_hue', 'unique_hue', 'hue_range',
    'avg_sat', 'mode_sat', 'unique_sat', 'sat_range',
    'avg_bri', 'mode_bri', 'unique_bri', 'bri_range',
)

SLOT_NAMES = (
    tuple(f'defect_{name}' for name in _COLOUR_SLOTS)
    + tuple(f'background_{name}' for name in _COLOUR_SLOTS)
    + ('hue_diff', 'sat_diff', 'bri_diff')
    + ('num_edges', 'coverage', 'aspect_ratio', 'avg_turn_angle', 'mode_turn_angle')
    + ('edge_ratio', 'followed_turns', 'small_turns', 'reversed_turns')
    + ('defect_size', 'neighbour_distance')
)
NUM_SLOTS = len(SLOT_NAMES)
SLOT_INDEX = {name: i for i, name in enumerate(SLOT_NAMES)}

# (offset, span) per colour slot
_COLOUR_SCALES = (
    (0, 359), (0, 359), (1, 359), (0, 180),
    (0, 254), (0, 254), (1, 254), (0, 254),
    (0, 254), (0, 254), (1, 254), (0, 254),
)
_SCALES = (
    _COLOUR_SCALES + _COLOUR_SCALES
    + ((0, 1),) * 3
    + ((3, MAX_EDGES - 3), (0, 1), (0, 1), (0, 180), (0, 180))
    + ((0, 1),) * 4
    + ((0, None), (0, 2))  # defect_size span is the crop area
)
_OFFSETS = np.array([offset for offset, _ in _SCALES], dtype=np.float64)


@dataclass(frozen=True)
class ExtractionSettings:
    """Parameters that change extracted values; recorded in store manifests."""
    padding_ratio: float = field(default_factory=lambda: Config.BACKGROUND_PADDING_RATIO)
    neighbour_distance_px: float = field(default_factory=lambda: Config.NEIGHBOUR_DISTANCE_PX)
    rdp_min_epsilon: float = field(default_factory=lambda: Config.RDP_MIN_EPSILON)
    rdp_relative_epsilon: float = field(default_factory=lambda: Config.RDP_RELATIVE_EPSILON)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class DefCharVector:
    """Ordered 38-slot DefChars values.

    ``crop_area`` is the pattern's crop width x height, the span used to
    normalize ``defect_size``.
    """
    values: NDArray[np.float64]
    normalized: bool = False
    crop_area: int = 0

    slot_names = SLOT_NAMES

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size != NUM_SLOTS:
            raise InputError(f"a DefChars vector has {NUM_SLOTS} slots, got {values.size}")
        if self.normalized and (np.any(values < 0) or np.any(values > 1)):
            raise InputError("normalized DefChars values must lie in [0, 1]")
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return NUM_SLOTS

    def __getitem__(self, name: str) -> float:
        return float(self.values[SLOT_INDEX[name]])

    def as_dict(self) -> Dict[str, float]:
        return {name: float(value) for name, value in zip(SLOT_NAMES, self.values)}


def extract_defchars(record: PatternRecord,
                     siblings: Sequence[PatternRecord] = (),
                     settings: ExtractionSettings = None) -> DefCharVector:
    """Compute the unnormalized DefChars of one pattern.

    Background statistics use the padded context around the crop; siblings are
    the other patterns of the same source image.
    """
    settings = settings or ExtractionSettings()

    context, background = record.background_view()
    if not background.any():
        raise EmptyRegion(f"pattern {record.id} has no background pixels")
    defect = ~background
    hsv = to_hsv(context)

    defect_colour = color_region_stats(hsv, defect)
    background_colour = color_region_stats(hsv, background)
    complexity = color_complexity(hsv, defect, background)

    polygon = polygon_from_mask(record.mask, settings.rdp_min_epsilon, settings.rdp_relative_epsilon)
    info = shape_info(polygon)
    shape = shape_complexity(polygon)
    meta = meta_info(record, siblings, settings.neighbour_distance_px)

    values = (
        defect_colour.as_tuple() + background_colour.as_tuple()
        + tuple(complexity) + tuple(info) + tuple(shape)
        + (meta.defect_size, int(meta.neighbour))
    )
    logger.debug(f"Extracted DefChars for pattern {record.id}: {len(polygon)} vertices")
    return DefCharVector(np.array(values, dtype=np.float64),
                         normalized=False,
                         crop_area=record.width * record.height)


def normalize(v: DefCharVector) -> DefCharVector:
    """Fixed-range scaling of every slot into [0, 1]; query independent and monotone."""
    if v.normalized:
        raise AlreadyNormalized("DefChars vector is already normalized")
    spans = np.array([span if span is not None else max(v.crop_area, 1) for _, span in _SCALES],
                     dtype=np.float64)
    scaled = np.clip((v.values - _OFFSETS) / spans, 0.0, 1.0)
    return DefCharVector(scaled, normalized=True, crop_area=v.crop_area)
