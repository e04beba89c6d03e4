"""
Deterministic class-structured synthetic datasets.

Every class has its own shape family and defect hue; instances jitter in
size, position, colour and per-pixel brightness. Used by the test suite, the
performance checks and ``scripts/make_synthetic_dataset.py``.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from skimage import draw

from defchar_retrieval.exceptions import StoreIOError
from defchar_retrieval.geometry import rasterize
from defchar_retrieval.imaging import ImageRGB, Mask, PatternRecord, crop_pattern, encode_png, hsv_to_rgb
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

SHAPE_FAMILIES = ('rectangle', 'ellipse', 'triangle', 'notch')
BACKGROUND_HUE = 30.0

# unit-square outline of a hexagon with one reflex vertex
_NOTCH = np.array([[0, 0], [1, 0], [1, 1], [2 / 3, 1], [0.5, 0.5], [0, 1]], dtype=np.float64)


@dataclass(frozen=True)
class SyntheticImage:
    name: str
    class_label: int
    image: ImageRGB
    mask: Mask


def _shape_mask(family: str, side: int, x0: int, y0: int, w: int, h: int) -> Mask:
    if family == 'rectangle':
        mask = np.zeros((side, side), dtype=bool)
        mask[y0:y0 + h, x0:x0 + w] = True
        return mask
    if family == 'ellipse':
        mask = np.zeros((side, side), dtype=bool)
        rr, cc = draw.ellipse(y0 + h / 2.0, x0 + w / 2.0, h / 2.0, w / 2.0, shape=(side, side))
        mask[rr, cc] = True
        return mask
    if family == 'triangle':
        ring = [(x0, y0 + h), (x0 + w / 2.0, y0), (x0 + w, y0 + h)]
    else:
        ring = [(x0 + px * w, y0 + py * h) for px, py in _NOTCH]
    return rasterize([ring], (side, side))


def _draw(label: int, n_classes: int, side: int, rng: np.random.Generator, name: str) -> SyntheticImage:
    hsv = np.empty((side, side, 3), dtype=np.float64)
    hsv[..., 0] = BACKGROUND_HUE
    hsv[..., 1] = 40.0 + rng.uniform(-5, 5)
    hsv[..., 2] = 120.0 + rng.normal(0.0, 6.0, size=(side, side))

    w = int(rng.integers(int(side * 0.3), int(side * 0.5) + 1))
    h = int(rng.integers(int(side * 0.3), int(side * 0.5) + 1))
    x0 = int(rng.integers(2, side - w - 1))
    y0 = int(rng.integers(2, side - h - 1))
    family = SHAPE_FAMILIES[(label - 1) % len(SHAPE_FAMILIES)]
    mask = _shape_mask(family, side, x0, y0, w, h)
    if not mask.any():
        mask[y0:y0 + h, x0:x0 + w] = True

    hue = ((label - 1) * 360.0 / max(n_classes, 1) + 90.0 + rng.uniform(-5, 5)) % 360.0
    hsv[mask, 0] = hue
    hsv[mask, 1] = 200.0 + rng.uniform(-20, 20)
    hsv[mask, 2] = 200.0 + rng.normal(0.0, 5.0, size=int(mask.sum()))
    np.clip(hsv[..., 1:], 0, 255, out=hsv[..., 1:])
    return SyntheticImage(name=name, class_label=label, image=hsv_to_rgb(hsv), mask=mask)


def synthetic_images(class_counts: Sequence[int], image_side: int = 64, seed: int = 0) -> Iterator[SyntheticImage]:
    """One image per pattern; ``class_counts[i]`` patterns of class ``i + 1``."""
    rng = np.random.default_rng(seed)
    for index, count in enumerate(class_counts):
        label = index + 1
        for i in range(count):
            yield _draw(label, len(class_counts), image_side, rng, f'c{label}_{i:05d}.png')


def synthetic_records(class_counts: Sequence[int],
                      image_side: int = 64,
                      seed: int = 0,
                      padding_ratio: float = None) -> List[PatternRecord]:
    return [
        crop_pattern(item.image, item.mask, item.class_label, f'{item.name}#0', item.name, padding_ratio)
        for item in synthetic_images(class_counts, image_side, seed)
    ]


def write_synthetic_dataset(out_dir: Union[str, Path],
                            class_counts: Sequence[int],
                            image_side: int = 64,
                            seed: int = 0,
                            name: str = 'synthetic') -> Path:
    """Write images/, masks/ and manifest.json under ``out_dir``; returns the manifest path."""
    out_dir = Path(out_dir)
    entries: List[dict] = []
    try:
        (out_dir / 'images').mkdir(parents=True, exist_ok=True)
        (out_dir / 'masks').mkdir(parents=True, exist_ok=True)
        for item in synthetic_images(class_counts, image_side, seed):
            (out_dir / 'images' / item.name).write_bytes(encode_png(item.image))
            (out_dir / 'masks' / item.name).write_bytes(encode_png(item.mask.astype(np.uint8) * 255))
            entries.append({'image': f'images/{item.name}', 'mask': f'masks/{item.name}', 'class': item.class_label})
        manifest_path = out_dir / 'manifest.json'
        manifest_path.write_text(json.dumps({'name': name, 'entries': entries}, indent=2) + '\n', encoding='utf-8')
    except OSError as e:
        raise StoreIOError(f"cannot write synthetic dataset to {out_dir}: {e}") from e

    logger.info(f"Wrote {len(entries)} synthetic patterns in {len(class_counts)} classes to {out_dir}")
    return manifest_path


def class_count_list(raw: str) -> Tuple[int, ...]:
    """Parse '120,80,40' into per-class counts."""
    return tuple(int(part) for part in raw.split(',') if part.strip())
