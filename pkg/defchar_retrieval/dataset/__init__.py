"""Dataset manifests, annotation rasterisation and synthetic datasets."""

from .annotations import (
    annotation_masks, class_distribution, entry_patterns, load_patterns, read_polygon_file, split_label_mask,
)
from .manifest import Annotation, DatasetManifest, ManifestEntry, load_manifest
from .synthetic import (
    SHAPE_FAMILIES, SyntheticImage, class_count_list, synthetic_images, synthetic_records, write_synthetic_dataset,
)

__all__ = [
    'annotation_masks', 'class_distribution', 'entry_patterns', 'load_patterns', 'read_polygon_file',
    'split_label_mask',
    'Annotation', 'DatasetManifest', 'ManifestEntry', 'load_manifest',
    'SHAPE_FAMILIES', 'SyntheticImage', 'class_count_list', 'synthetic_images', 'synthetic_records',
    'write_synthetic_dataset',
]
