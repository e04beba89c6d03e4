"""DefChars extraction and the baseline feature extractors."""

from .color import ColorRegionStats, color_complexity, color_region_stats, round_half_up, total_variation
from .defchars import (
    MAX_EDGES, NUM_SLOTS, SLOT_NAMES, DefCharVector, ExtractionSettings, extract_defchars, normalize,
)
from .extractors import (
    FeatureExtractor, FeatureKind, extract_payload, get_extractor, lbp_feature, raw_feature, register_extractor,
)
from .lbp import LBP_BINS, LBPHistogram, lbp_codes, lbp_histogram
from .shape import (
    MetaInfo, NeighbourCategory, ShapeComplexity, ShapeInfo, box_gap, meta_info, shape_complexity, shape_info,
)

__all__ = [
    'ColorRegionStats', 'color_complexity', 'color_region_stats', 'round_half_up', 'total_variation',
    'MAX_EDGES', 'NUM_SLOTS', 'SLOT_NAMES', 'DefCharVector', 'ExtractionSettings', 'extract_defchars', 'normalize',
    'FeatureExtractor', 'FeatureKind', 'extract_payload', 'get_extractor', 'lbp_feature', 'raw_feature',
    'register_extractor',
    'LBP_BINS', 'LBPHistogram', 'lbp_codes', 'lbp_histogram',
    'MetaInfo', 'NeighbourCategory', 'ShapeComplexity', 'ShapeInfo', 'box_gap', 'meta_info', 'shape_complexity',
    'shape_info',
]
