"""
Append-only datastore of extracted payloads.

One store holds one payload kind: normalized DefChars vectors, LBP
histograms, resized RGB crops, or vectors from a registered extractor.
Indices are dense and assigned in insertion order.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval import __version__
from defchar_retrieval.exceptions import KindMismatch, MixedKinds, UnnormalizedVector
from defchar_retrieval.features import (
    LBP_BINS, NUM_SLOTS, SLOT_NAMES, DefCharVector, FeatureKind, LBPHistogram, get_extractor,
)
from defchar_retrieval.metrics import InputKind
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class StoreEntry:
    index: int
    class_label: int
    source_image: str


class IndexItem(NamedTuple):
    """An extracted payload waiting to be indexed."""
    payload: Any
    class_label: int
    source_image: str


def column_names(feature_kind: str, width: int) -> Tuple[str, ...]:
    """Payload column names used in the entries CSV."""
    if feature_kind == FeatureKind.DEFCHARS.value:
        return SLOT_NAMES
    if feature_kind == FeatureKind.LBP.value:
        return tuple(f'lbp_{i:03d}' for i in range(LBP_BINS))
    return tuple(f'f_{i:03d}' for i in range(width))


class Datastore:
    """Indexed payload matrix plus per-entry metadata."""

    def __init__(self, feature_kind: str,
                 image_side: Optional[int] = None,
                 extraction: Optional[Dict[str, Any]] = None):
        self.feature_kind = get_extractor(feature_kind).name
        self.input_kind = get_extractor(self.feature_kind).input_kind
        self.image_side = image_side
        self.extraction = dict(extraction or {})
        self.package_version = __version__
        self.entries: List[StoreEntry] = []
        self._rows: List[NDArray] = []
        self._matrix: Optional[NDArray] = None
        self._row_shape: Optional[Tuple[int, ...]] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return f'<Datastore {self.feature_kind}: {len(self)} entries>'

    @property
    def row_shape(self) -> Optional[Tuple[int, ...]]:
        return self._row_shape

    @property
    def metadata(self) -> Dict[str, Any]:
        """Creation metadata. Carries no timestamp so rebuilt stores are byte-identical."""
        return {
            'feature_kind': self.feature_kind,
            'input_kind': self.input_kind.value,
            'image_side': self.image_side,
            'extraction': self.extraction,
            'package_version': self.package_version,
        }

    @property
    def matrix(self) -> NDArray:
        """All payload rows stacked as (n, *row_shape)."""
        if self._matrix is None or len(self._matrix) != len(self._rows):
            if self._rows:
                self._matrix = np.stack(self._rows)
            else:
                shape = self._row_shape or (0,)
                dtype = np.uint8 if self.input_kind is InputKind.IMAGE else np.float64
                self._matrix = np.empty((0,) + shape, dtype=dtype)
        return self._matrix

    def payload(self, index: int) -> NDArray:
        return self._rows[index]

    def coerce(self, payload: Any, error=KindMismatch) -> NDArray:
        """Turn a payload into a storage row, raising ``error`` when it is not this store's kind."""
        row = _payload_row(self.feature_kind, self.input_kind, payload, error)
        if self._row_shape is not None and row.shape != self._row_shape:
            raise error(f"payload shape {row.shape} does not match store rows {self._row_shape}")
        return row

    def _add(self, row: NDArray, class_label: int, source_image: str) -> int:
        index = len(self.entries)
        if self._row_shape is None:
            self._row_shape = row.shape
        self._rows.append(row)
        self.entries.append(StoreEntry(index, int(class_label), str(source_image)))
        return index


def _stored_row(payload: Any, width: int) -> Optional[NDArray]:
    if isinstance(payload, np.ndarray) and payload.ndim == 1 and payload.size == width:
        return payload.astype(np.float64)
    return None


def _payload_row(feature_kind: str, input_kind: InputKind, payload: Any, error) -> NDArray:
    """Storage row for ``payload``; rows already read back from a store pass through unchanged."""
    if feature_kind == FeatureKind.DEFCHARS.value:
        row = _stored_row(payload, NUM_SLOTS)
        if row is not None:
            return row
        if not isinstance(payload, DefCharVector):
            raise error(f"expected a DefChars vector, got {type(payload).__name__}")
        if not payload.normalized:
            raise UnnormalizedVector("DefChars payloads must be normalized before indexing")
        return payload.values.copy()

    if feature_kind == FeatureKind.LBP.value:
        row = _stored_row(payload, LBP_BINS)
        if row is not None:
            return row
        if not isinstance(payload, LBPHistogram):
            raise error(f"expected an LBP histogram, got {type(payload).__name__}")
        return payload.bins.copy()

    if isinstance(payload, (DefCharVector, LBPHistogram)):
        raise error(f"{type(payload).__name__} payload cannot be stored as '{feature_kind}'")
    array = np.asarray(payload)
    if input_kind is InputKind.IMAGE:
        if array.ndim != 3 or array.shape[2] != 3 or array.dtype != np.uint8:
            raise error(f"expected an 8-bit RGB image payload, got {array.dtype} {array.shape}")
        return np.ascontiguousarray(array)
    if array.ndim != 1:
        raise error(f"expected a 1-D feature vector payload, got shape {array.shape}")
    return array.astype(np.float64)


def build_store(items: Iterable[IndexItem],
                feature_kind: str,
                image_side: Optional[int] = None,
                extraction: Optional[Dict[str, Any]] = None) -> Datastore:
    """Index payloads in input order starting at 0."""
    store = Datastore(feature_kind, image_side=image_side, extraction=extraction)
    for payload, class_label, source_image in items:
        store._add(store.coerce(payload, error=MixedKinds), class_label, source_image)
    logger.info(f"Built {store.feature_kind} datastore with {len(store)} entries")
    return store


def append(store: Datastore, payload: Any, class_label: int, source_image: str) -> int:
    """Add one payload; existing entries keep their indices."""
    index = store._add(store.coerce(payload), class_label, source_image)
    logger.debug(f"Appended entry {index} ({source_image}, class {class_label})")
    return index
