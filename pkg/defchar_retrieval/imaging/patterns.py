import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import EmptyMask, InputError
from defchar_retrieval.imaging.image_ops import ImageRGB, Mask, validate_rgb


@dataclass(frozen=True, eq=False)
class PatternRecord:
    """One cropped irregular pattern.

    ``crop`` is the tight bounding box of the mask in the source image, ``mask``
    is crop-local. ``context`` is the crop widened by the background padding
    (clipped to the source image) and ``context_origin`` its top-left corner in
    source coordinates; it is what background statistics are computed over.
    """
    id: str
    class_label: int
    source_image: str
    crop: ImageRGB
    mask: Mask
    bbox_origin: Tuple[int, int]
    context: Optional[ImageRGB] = None
    context_origin: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        validate_rgb(self.crop)
        if self.mask.shape != self.crop.shape[:2]:
            raise InputError(
                f"pattern {self.id}: mask shape {self.mask.shape} does not match crop {self.crop.shape[:2]}"
            )
        if not self.mask.any():
            raise EmptyMask(f"pattern {self.id} has an empty mask")
        if self.context is not None and self.context_origin is None:
            raise InputError(f"pattern {self.id}: context given without context_origin")

    @property
    def width(self) -> int:
        return self.crop.shape[1]

    @property
    def height(self) -> int:
        return self.crop.shape[0]

    @property
    def pixel_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def source_bbox(self) -> Tuple[int, int, int, int]:
        """(x0, y0, x1, y1) in source coordinates, x1/y1 exclusive."""
        x0, y0 = self.bbox_origin
        return x0, y0, x0 + self.width, y0 + self.height

    def background_view(self) -> Tuple[ImageRGB, Mask]:
        """Pixels and region used for background statistics.

        Falls back to the crop itself when no context was recorded.
        """
        if self.context is None:
            return self.crop, ~self.mask
        cx, cy = self.context_origin
        x0, y0 = self.bbox_origin
        inside = np.zeros(self.context.shape[:2], dtype=bool)
        inside[y0 - cy:y0 - cy + self.height, x0 - cx:x0 - cx + self.width] = self.mask
        return self.context, ~inside


def crop_pattern(image: ImageRGB,
                 mask: Mask,
                 class_label: int,
                 pattern_id: str,
                 source_image: str,
                 padding_ratio: float = None) -> PatternRecord:
    """Crop the tight bounding box of ``mask`` out of ``image``."""
    validate_rgb(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != image.shape[:2]:
        raise InputError(
            f"pattern {pattern_id}: mask shape {mask.shape} does not match image {image.shape[:2]}"
        )
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise EmptyMask(f"pattern {pattern_id} has an empty mask")

    if padding_ratio is None:
        padding_ratio = Config.BACKGROUND_PADDING_RATIO

    x0, x1 = int(xs.min()), int(xs.max()) + 1
    y0, y1 = int(ys.min()), int(ys.max()) + 1

    pad_x = int(math.ceil(padding_ratio * (x1 - x0)))
    pad_y = int(math.ceil(padding_ratio * (y1 - y0)))
    height, width = mask.shape
    cx0, cy0 = max(0, x0 - pad_x), max(0, y0 - pad_y)
    cx1, cy1 = min(width, x1 + pad_x), min(height, y1 + pad_y)

    return PatternRecord(
        id=pattern_id,
        class_label=int(class_label),
        source_image=source_image,
        crop=image[y0:y1, x0:x1].copy(),
        mask=mask[y0:y1, x0:x1].copy(),
        bbox_origin=(x0, y0),
        context=image[cy0:cy1, cx0:cx1].copy(),
        context_origin=(cx0, cy0),
    )
