"""Feature-kind registry: how a PatternRecord becomes a datastore payload."""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np

from defchar_retrieval.exceptions import ConfigurationError, UnknownFeature
from defchar_retrieval.features.defchars import ExtractionSettings, extract_defchars, normalize
from defchar_retrieval.features.lbp import lbp_histogram
from defchar_retrieval.imaging import ImageRGB, PatternRecord, resize, to_grayscale
from defchar_retrieval.metrics import InputKind

# (record, siblings, side, settings) -> payload
ExtractFn = Callable[[PatternRecord, Sequence[PatternRecord], Optional[int], ExtractionSettings], object]


class FeatureKind(str, Enum):
    DEFCHARS = 'defchars'
    RAW_IMAGE = 'raw'
    LBP = 'lbp'

    @classmethod
    def parse(cls, name: Union[str, 'FeatureKind']) -> 'FeatureKind':
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise UnknownFeature(f"unknown feature '{name}'") from None

    @property
    def input_kind(self) -> InputKind:
        return InputKind.IMAGE if self is FeatureKind.RAW_IMAGE else InputKind.FEATURE_VECTOR


_ALIASES = {'raw_image': 'raw', 'image': 'raw', 'dc': 'defchars'}


@dataclass(frozen=True)
class FeatureExtractor:
    name: str
    input_kind: InputKind
    extract: ExtractFn
    uses_image_size: bool = False
    display_name: str = ''

    @property
    def label(self) -> str:
        return self.display_name or self.name


_EXTRACTORS: Dict[str, FeatureExtractor] = {}


def register_extractor(name: str,
                       extract: ExtractFn,
                       input_kind: InputKind = InputKind.FEATURE_VECTOR,
                       uses_image_size: bool = False,
                       display_name: str = '') -> FeatureExtractor:
    """Register a feature extractor under ``name``.

    Vector extractors return a 1-D array of floats; the datastore and the
    feature-vector metrics accept them without further changes.
    """
    extractor = FeatureExtractor(name.strip().lower(), InputKind(input_kind), extract,
                                 uses_image_size, display_name)
    _EXTRACTORS[extractor.name] = extractor
    return extractor


def get_extractor(name: Union[str, FeatureKind]) -> FeatureExtractor:
    if isinstance(name, FeatureKind):
        key = name.value
    else:
        key = str(name).strip().lower()
        key = _ALIASES.get(key, key)
    try:
        return _EXTRACTORS[key]
    except KeyError:
        raise UnknownFeature(f"unknown feature '{name}'; choose from {', '.join(sorted(_EXTRACTORS))}") from None


def _require_side(kind: str, side: Optional[int]) -> int:
    if side is None:
        raise ConfigurationError(f"feature '{kind}' needs an image size")
    return int(side)


def raw_feature(record: PatternRecord, side: int) -> ImageRGB:
    """The pattern crop resized to side x side, compared directly by image metrics."""
    return resize(record.crop, side)


def lbp_feature(record: PatternRecord, side: int):
    return lbp_histogram(to_grayscale(resize(record.crop, side)))


def _defchars(record, siblings, side, settings):
    return normalize(extract_defchars(record, siblings, settings))


def _raw(record, siblings, side, settings):
    return raw_feature(record, _require_side(FeatureKind.RAW_IMAGE.value, side))


def _lbp(record, siblings, side, settings):
    return lbp_feature(record, _require_side(FeatureKind.LBP.value, side))


register_extractor(FeatureKind.DEFCHARS.value, _defchars, InputKind.FEATURE_VECTOR, display_name='DefChars')
register_extractor(FeatureKind.RAW_IMAGE.value, _raw, InputKind.IMAGE, uses_image_size=True, display_name='Image')
register_extractor(FeatureKind.LBP.value, _lbp, InputKind.FEATURE_VECTOR, uses_image_size=True, display_name='LBP')


def extract_payload(kind: Union[str, FeatureKind],
                    record: PatternRecord,
                    siblings: Sequence[PatternRecord] = (),
                    side: Optional[int] = None,
                    settings: Optional[ExtractionSettings] = None):
    extractor = get_extractor(kind)
    payload = extractor.extract(record, siblings, side, settings or ExtractionSettings())
    if isinstance(payload, (list, tuple)):
        payload = np.asarray(payload, dtype=np.float64)
    return payload
