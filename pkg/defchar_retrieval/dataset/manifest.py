"""
Dataset manifests.

A manifest is a JSON file listing source images and their annotations::

    {
      "name": "lake-ice",
      "entries": [
        {"image": "images/a.png", "mask": "masks/a.png", "class": 1},
        {"image": "images/b.png", "masks": [{"mask": "masks/b0.png", "class": 2}]},
        {"image": "images/c.png", "polygons": [{"class": 3, "rings": [[[0, 0], [9, 0], [9, 9]]]}]},
        {"image": "images/d.png", "label_mask": "labels/d.png"}
      ]
    }

Paths are relative to ``root`` (default: the manifest's directory). A label
mask stores the class label as the pixel value.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from defchar_retrieval.exceptions import DatasetError
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

Ring = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class Annotation:
    kind: str  # 'mask', 'polygon' or 'label_mask'
    class_label: Optional[int] = None
    path: Optional[Path] = None
    rings: Tuple[Ring, ...] = ()


@dataclass(frozen=True)
class ManifestEntry:
    image: Path
    source_id: str
    annotations: Tuple[Annotation, ...]


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    entries: Tuple[ManifestEntry, ...]
    name: str = ''

    def __len__(self) -> int:
        return len(self.entries)


def _class_label(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 1:
        raise DatasetError(f"{where}: class labels must be positive integers, got {raw!r}")
    return raw


def _existing(root: Path, relative: Any, where: str) -> Path:
    if not isinstance(relative, str) or not relative:
        raise DatasetError(f"{where}: expected a file path, got {relative!r}")
    path = root / relative
    if not path.is_file():
        raise DatasetError(f"{where}: missing file {path}")
    return path


def parse_rings(raw: Any, where: str) -> Tuple[Ring, ...]:
    rings = []
    for ring in raw if isinstance(raw, list) else []:
        try:
            points = tuple((float(x), float(y)) for x, y in ring)
        except (TypeError, ValueError) as e:
            raise DatasetError(f"{where}: polygon points must be [x, y] pairs") from e
        if len(points) < 3:
            raise DatasetError(f"{where}: polygon ring needs at least 3 points")
        rings.append(points)
    if not rings:
        raise DatasetError(f"{where}: polygon needs at least one ring")
    return tuple(rings)


def _annotations(root: Path, item: dict, where: str) -> Tuple[Annotation, ...]:
    annotations: List[Annotation] = []
    if 'mask' in item:
        annotations.append(Annotation('mask', _class_label(item.get('class'), where),
                                      path=_existing(root, item['mask'], where)))
    for j, sub in enumerate(item.get('masks', [])):
        sub_where = f"{where} masks[{j}]"
        annotations.append(Annotation('mask', _class_label(sub.get('class'), sub_where),
                                      path=_existing(root, sub.get('mask'), sub_where)))
    for j, polygon in enumerate(item.get('polygons', [])):
        sub_where = f"{where} polygons[{j}]"
        raw_rings = polygon.get('rings')
        if raw_rings is None and 'points' in polygon:
            raw_rings = [polygon['points']]
        annotations.append(Annotation('polygon', _class_label(polygon.get('class'), sub_where),
                                      rings=parse_rings(raw_rings, sub_where)))
    if 'label_mask' in item:
        annotations.append(Annotation('label_mask', path=_existing(root, item['label_mask'], where)))
    if not annotations:
        raise DatasetError(f"{where}: no annotation (mask, masks, polygons or label_mask)")
    return tuple(annotations)


def load_manifest(path: Union[str, Path], root: Union[str, Path, None] = None) -> DatasetManifest:
    """Parse and validate a manifest; every referenced file must exist."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise DatasetError(f"missing file {path}") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DatasetError(f"cannot read manifest {path}: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get('entries'), list):
        raise DatasetError(f"{path}: manifest must be an object with an 'entries' list")

    base = Path(root) if root is not None else path.parent / data.get('root', '.')
    entries = []
    for i, item in enumerate(data['entries']):
        where = f"{path.name} entries[{i}]"
        if not isinstance(item, dict):
            raise DatasetError(f"{where}: expected an object")
        image = _existing(base, item.get('image'), where)
        entries.append(ManifestEntry(image=image, source_id=item['image'],
                                     annotations=_annotations(base, item, where)))

    manifest = DatasetManifest(root=base, entries=tuple(entries), name=data.get('name', path.stem))
    logger.info(f"Loaded manifest {path} with {len(manifest)} images")
    return manifest
