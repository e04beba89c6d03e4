"""
Image-based measures: MSE, spectral angle mapper and universal image quality.

Kernels take a query of shape (H, W, C) and entries of shape (n, H, W, C) and
compute in float64 over the integer pixel values. UIQ is a global per-channel
statistic, not a windowed one.
"""

import numpy as np
from numpy.typing import NDArray

from defchar_retrieval.exceptions import DegenerateStatistics, InputError, ZeroChannel
from defchar_retrieval.metrics.base import Direction, InputKind, MetricDescriptor, register_metric


def _flatten(query: NDArray, entries: NDArray):
    q = np.asarray(query, dtype=np.float64)
    e = np.asarray(entries, dtype=np.float64)
    channels = q.shape[-1]
    return q.reshape(1, -1, channels), np.ascontiguousarray(e.reshape(e.shape[0], -1, channels))


def _validate_image(img: NDArray) -> None:
    if img.ndim != 3 or img.size == 0:
        raise InputError(f"expected an (H, W, C) image, got shape {img.shape}")


def _mse_kernel(query, entries):
    q, e = _flatten(query, entries)
    diff = e - q
    scores = (diff * diff).reshape(e.shape[0], -1).mean(axis=1)
    return scores, np.ones(e.shape[0], dtype=bool)


def _channel_energy(x: NDArray) -> NDArray:
    return np.einsum('npc,npc->nc', x, x)


def _sam_kernel(query, entries):
    q, e = _flatten(query, entries)
    dots = np.einsum('npc,npc->nc', e, np.broadcast_to(q, e.shape))
    norms = np.sqrt(_channel_energy(e) * _channel_energy(q))
    valid = np.all(norms > 0, axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        cosines = np.clip(dots / norms, -1.0, 1.0)
    angles = np.arccos(np.where(norms > 0, cosines, 1.0))
    return angles.mean(axis=1), valid


def _validate_sam(img: NDArray) -> None:
    _validate_image(img)
    flat = np.asarray(img, dtype=np.float64).reshape(-1, img.shape[-1])
    if np.any(~flat.any(axis=0)):
        raise ZeroChannel("spectral angle is undefined for an image with an all-zero channel")


def _channel_moments(x: NDArray):
    mean = x.mean(axis=1)
    centred = x - mean[:, np.newaxis, :]
    return mean, centred


def _uiq_kernel(query, entries):
    q, e = _flatten(query, entries)
    mean_q, centred_q = _channel_moments(q)
    mean_e, centred_e = _channel_moments(e)
    pixels = e.shape[1]
    var_q = np.einsum('npc,npc->nc', centred_q, centred_q) / pixels
    var_e = np.einsum('npc,npc->nc', centred_e, centred_e) / pixels
    cov = np.einsum('npc,npc->nc', centred_e, np.broadcast_to(centred_q, centred_e.shape)) / pixels
    sigma_q, sigma_e = np.sqrt(var_q), np.sqrt(var_e)
    mean_sq = mean_q ** 2 + mean_e ** 2

    valid = np.all((sigma_q > 0) & (sigma_e > 0) & (mean_sq > 0), axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        correlation = cov / (sigma_q * sigma_e)
        luminance = 2.0 * mean_q * mean_e / mean_sq
        contrast = 2.0 * sigma_q * sigma_e / (var_q + var_e)
        per_channel = correlation * luminance * contrast
    scores = np.where(valid, per_channel.mean(axis=1), 0.0)
    return scores, valid


def _validate_uiq(img: NDArray) -> None:
    _validate_image(img)
    flat = np.asarray(img, dtype=np.float64).reshape(-1, img.shape[-1])
    if np.any(flat.std(axis=0) == 0):
        raise DegenerateStatistics("UIQ needs nonzero variance in every channel")
    if np.any(flat.mean(axis=0) == 0):
        raise DegenerateStatistics("UIQ needs a nonzero mean in every channel")


MSE = register_metric(MetricDescriptor('mse', InputKind.IMAGE, Direction.LOWER_IS_SIMILAR,
                                       kernel=_mse_kernel, validate=_validate_image))
SAM = register_metric(MetricDescriptor('sam', InputKind.IMAGE, Direction.LOWER_IS_SIMILAR,
                                       kernel=_sam_kernel, validate=_validate_sam,
                                       degenerate_error=ZeroChannel))
UIQ = register_metric(MetricDescriptor('uiq', InputKind.IMAGE, Direction.HIGHER_IS_SIMILAR,
                                       kernel=_uiq_kernel, validate=_validate_uiq,
                                       degenerate_error=DegenerateStatistics))


def mse(x: NDArray, y: NDArray) -> float:
    """Mean squared pixel difference over all rows, columns and channels."""
    return MSE.score_pair(np.asarray(x), np.asarray(y))


def sam(x: NDArray, y: NDArray) -> float:
    """Mean per-channel angle, in radians, between the two images as pixel vectors."""
    return SAM.score_pair(np.asarray(x), np.asarray(y))


def uiq(x: NDArray, y: NDArray) -> float:
    return UIQ.score_pair(np.asarray(x), np.asarray(y))
