"""
Pixel-level primitives.

Images are numpy arrays: RGB as ``uint8`` of shape (H, W, 3), HSV as
``float64`` of shape (H, W, 3) with hue in degrees [0, 360) and saturation /
brightness on the 8-bit scale [0, 255], grayscale as ``uint8`` of shape (H, W).
"""

import io
from pathlib import Path
from typing import Union

import cv2
import numpy as np
from numpy.typing import NDArray
from PIL import Image, UnidentifiedImageError
from skimage import color

from defchar_retrieval.exceptions import DatasetError, InputError, MalformedImage, TooSmall
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)

ImageRGB = NDArray[np.uint8]
ImageHSV = NDArray[np.float64]
GrayImage = NDArray[np.uint8]
Mask = NDArray[np.bool_]

SUPPORTED_FORMATS = ('PNG', 'JPEG')
# Pillow opens 16-bit grayscale PNGs in one of these, depending on version and byte order
SIXTEEN_BIT_MODES = ('I;16', 'I;16B', 'I;16L', 'I')
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def validate_rgb(img: np.ndarray) -> ImageRGB:
    """Check the ImageRGB contract and return the array unchanged."""
    if img.ndim != 3 or img.shape[2] != 3:
        raise InputError(f"expected an (H, W, 3) RGB image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InputError("image must be at least 1x1")
    return img


def decode_image(data: bytes) -> ImageRGB:
    """Decode a PNG or JPEG stream into 8-bit RGB; alpha is dropped, not composited."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            if img.format not in SUPPORTED_FORMATS:
                raise MalformedImage(f"unsupported image format: {img.format}")
            img.load()
            if img.mode in SIXTEEN_BIT_MODES:
                # the high byte, whatever the value range of this particular image
                arr = np.clip(np.asarray(img, dtype=np.int64), 0, 0xFFFF)
                gray = (arr >> 8).astype(np.uint8)
                return np.repeat(gray[:, :, None], 3, axis=2)
            return np.array(img.convert('RGB'), dtype=np.uint8)
    except MalformedImage:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError, Image.DecompressionBombError) as e:
        raise MalformedImage(f"cannot decode image: {e}") from e


def encode_png(img: np.ndarray) -> bytes:
    """Encode an RGB or single-channel uint8 array as lossless PNG."""
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img)).save(buffer, format='PNG')
    return buffer.getvalue()


def _read_bytes(path: Union[str, Path]) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e


def read_image(path: Union[str, Path]) -> ImageRGB:
    """Read an image file from disk."""
    try:
        return decode_image(_read_bytes(path))
    except MalformedImage as e:
        raise MalformedImage(f"{path}: {e}") from e


def read_label_image(path: Union[str, Path]) -> NDArray[np.int64]:
    """Read a single-channel mask/label PNG, keeping the stored integer values."""
    try:
        with Image.open(io.BytesIO(_read_bytes(path))) as img:
            img.load()
            if img.mode in ('L', 'P', 'I', 'I;16', '1'):
                return np.asarray(img).astype(np.int64)
            return np.asarray(img.convert('L')).astype(np.int64)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise MalformedImage(f"{path}: cannot decode mask: {e}") from e


def read_mask(path: Union[str, Path]) -> Mask:
    """Read a mask PNG: nonzero = inside the pattern."""
    return read_label_image(path) != 0


def to_hsv(img: ImageRGB) -> ImageHSV:
    """Hexcone RGB -> HSV; h in [0, 360), s and v in [0, 255], h = 0 where s = 0."""
    validate_rgb(img)
    hsv = color.rgb2hsv(img.astype(np.uint8))
    out = np.empty(hsv.shape, dtype=np.float64)
    out[..., 0] = (hsv[..., 0] * 360.0) % 360.0
    out[..., 1] = hsv[..., 1] * 255.0
    out[..., 2] = hsv[..., 2] * 255.0
    out[..., 0][out[..., 1] == 0] = 0.0
    return out


def hsv_to_rgb(hsv: ImageHSV) -> ImageRGB:
    """Inverse of :func:`to_hsv`, rounded to 8-bit RGB."""
    scaled = np.empty(hsv.shape, dtype=np.float64)
    scaled[..., 0] = (np.asarray(hsv[..., 0], dtype=np.float64) % 360.0) / 360.0
    scaled[..., 1] = np.clip(hsv[..., 1], 0, 255) / 255.0
    scaled[..., 2] = np.clip(hsv[..., 2], 0, 255) / 255.0
    rgb = color.hsv2rgb(scaled) * 255.0
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def resize(img: ImageRGB, side: int) -> ImageRGB:
    """Resize to a side x side square: area averaging when shrinking, bilinear when growing."""
    validate_rgb(img)
    if side < 1:
        raise TooSmall(f"resize side must be >= 1, got {side}")

    height, width = img.shape[:2]
    if (height, width) == (side, side):
        return img.copy()

    src = np.ascontiguousarray(img)
    if side <= width and side <= height:
        return cv2.resize(src, (side, side), interpolation=cv2.INTER_AREA)
    if side >= width and side >= height:
        return cv2.resize(src, (side, side), interpolation=cv2.INTER_LINEAR)

    # Mixed case: shrink one axis, grow the other, one pass per axis
    horizontal = cv2.INTER_AREA if side < width else cv2.INTER_LINEAR
    out = cv2.resize(src, (side, height), interpolation=horizontal)
    vertical = cv2.INTER_AREA if side < height else cv2.INTER_LINEAR
    return cv2.resize(out, (side, side), interpolation=vertical)


def to_grayscale(img: ImageRGB) -> GrayImage:
    """ITU-R 601 luma, rounded half up."""
    validate_rgb(img)
    luma = img.astype(np.float64) @ LUMA_WEIGHTS
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
