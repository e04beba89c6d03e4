"""Annotation rasterisation and pattern cropping for manifest entries."""

import json
from collections import Counter
from typing import Dict, Iterable, List, Tuple

import cv2
import numpy as np

from defchar_retrieval.dataset.manifest import Annotation, DatasetManifest, ManifestEntry, Ring, parse_rings
from defchar_retrieval.exceptions import DatasetError, InputError
from defchar_retrieval.geometry import rasterize
from defchar_retrieval.imaging import ImageRGB, Mask, PatternRecord, crop_pattern, read_image, read_label_image
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)


def split_label_mask(labels: np.ndarray) -> List[Tuple[int, Mask]]:
    """One (class, mask) pair per 8-connected component of every nonzero label value."""
    patterns = []
    for value in np.unique(labels):
        if value <= 0:
            continue
        count, components = cv2.connectedComponents((labels == value).astype(np.uint8), connectivity=8)
        for component in range(1, count):
            patterns.append((int(value), components == component))
    return patterns


def annotation_masks(annotation: Annotation, shape: Tuple[int, int]) -> List[Tuple[int, Mask]]:
    """(class, mask) pairs for one annotation, rasterised at image ``shape``."""
    if annotation.kind == 'polygon':
        return [(annotation.class_label, rasterize(annotation.rings, shape))]

    labels = read_label_image(annotation.path)
    if labels.shape != shape:
        raise DatasetError(f"{annotation.path}: mask is {labels.shape[::-1]}, image is {shape[::-1]}")
    if annotation.kind == 'mask':
        return [(annotation.class_label, labels != 0)]
    return split_label_mask(labels)


def entry_patterns(entry: ManifestEntry, image: ImageRGB = None, padding_ratio: float = None) -> List[PatternRecord]:
    """Every annotated pattern of one source image, ids ``<source>#<n>`` in annotation order."""
    if image is None:
        image = read_image(entry.image)
    records = []
    for annotation in entry.annotations:
        for class_label, mask in annotation_masks(annotation, image.shape[:2]):
            pattern_id = f"{entry.source_id}#{len(records)}"
            try:
                records.append(crop_pattern(image, mask, class_label, pattern_id, entry.source_id, padding_ratio))
            except InputError as e:
                raise type(e)(f"{entry.image}: {e}") from e
    return records


def load_patterns(manifest: DatasetManifest, padding_ratio: float = None) -> List[PatternRecord]:
    records: List[PatternRecord] = []
    for entry in manifest.entries:
        records.extend(entry_patterns(entry, padding_ratio=padding_ratio))
    logger.info(f"Loaded {len(records)} patterns from {len(manifest)} images")
    return records


def class_distribution(records: Iterable[PatternRecord]) -> Dict[int, int]:
    """Pattern count per class label, ascending by label."""
    counts = Counter(record.class_label for record in records)
    return dict(sorted(counts.items()))


def read_polygon_file(path) -> Tuple[Ring, ...]:
    """Rings from a polygon JSON file: a list of rings, or an object with 'rings' or 'points'."""
    try:
        with open(path, encoding='utf-8') as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise DatasetError(f"missing file {path}") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DatasetError(f"cannot read polygon file {path}: {e}") from e
    if isinstance(data, dict):
        data = data.get('rings', [data['points']] if 'points' in data else None)
    return parse_rings(data, str(path))
