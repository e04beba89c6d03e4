"""Decoding, colour conversion, resizing and pattern cropping."""

from .image_ops import (
    ImageRGB, ImageHSV, GrayImage, Mask,
    decode_image, encode_png, read_image, read_mask, read_label_image,
    to_hsv, hsv_to_rgb, resize, to_grayscale, validate_rgb,
)
from .patterns import PatternRecord, crop_pattern

__all__ = [
    'ImageRGB', 'ImageHSV', 'GrayImage', 'Mask',
    'decode_image', 'encode_png', 'read_image', 'read_mask', 'read_label_image',
    'to_hsv', 'hsv_to_rgb', 'resize', 'to_grayscale', 'validate_rgb',
    'PatternRecord', 'crop_pattern',
]
