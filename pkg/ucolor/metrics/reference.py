"""Full-reference fidelity metrics on the 0–255 scale."""

from __future__ import annotations

import math

import numpy as np

from ucolor.errors import ShapeError
from ucolor.models import Image

PEAK = 255.0
# Reported for identical images, where the PSNR is unbounded.
PSNR_INF = math.inf


def _pixels(img: Image | np.ndarray) -> np.ndarray:
    return img.pixels if isinstance(img, Image) else np.asarray(img, dtype=np.float64)


def _check(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"images differ in shape: {a.shape} vs {b.shape}", axis="shape")


def mse(a: Image | np.ndarray, b: Image | np.ndarray) -> float:
    """Mean of ``(255 a - 255 b) ** 2`` over every pixel and channel."""
    pa, pb = _pixels(a), _pixels(b)
    _check(pa, pb)
    return float(np.mean((PEAK * pa - PEAK * pb) ** 2))


def psnr_from_mse(value: float) -> float:
    if value == 0.0:
        return PSNR_INF
    return float(10.0 * math.log10(PEAK**2 / value))


def psnr(a: Image | np.ndarray, b: Image | np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; :data:`PSNR_INF` for identical inputs."""
    return psnr_from_mse(mse(a, b))
