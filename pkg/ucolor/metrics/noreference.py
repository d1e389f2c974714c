"""No-reference underwater quality scores: UCIQE and UIQM.

Coefficients and sub-measures come from the metrics' original definitions:
UCIQE combines chroma spread, luminance contrast and mean saturation; UIQM
combines colorfulness (UICM), sharpness (UISM) and contrast (UIConM).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from ucolor.colorspace import rgb_to_lab
from ucolor.errors import ShapeError
from ucolor.models import Image

# UCIQE weights (chroma std, luminance contrast, saturation mean).
UCIQE_WEIGHTS = (0.4680, 0.2745, 0.2576)
# UIQM weights (UICM, UISM, UIConM).
UIQM_WEIGHTS = (0.0282, 0.2953, 3.5753)
REC601 = np.array([0.299, 0.587, 0.114])

CONTRAST_FRACTION = 0.01
CHROMA_SCALE = 255.0
# Chroma below this is treated as exactly achromatic.
ACHROMATIC_TOLERANCE = 1e-9
TRIM_ALPHA = 0.1
BLOCK = 8
PLIP_GAMMA = 1026.0


def _rgb(img: Image | np.ndarray) -> np.ndarray:
    return img.pixels if isinstance(img, Image) else np.asarray(img, dtype=np.float64)


@dataclass
class UciqeComponents:
    sigma_chroma: float
    contrast_luminance: float
    mean_saturation: float
    score: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass
class UiqmComponents:
    uicm: float
    uism: float
    uiconm: float
    score: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


# --------------------------------------------------------------------------- UCIQE


def uciqe_components(img: Image | np.ndarray) -> UciqeComponents:
    """UCIQE and its three statistics.

    ``l = L / 100`` and ``chroma = sqrt(a² + b²) / 255``; saturation is
    ``chroma / sqrt(chroma² + l²)`` (0 for black). The luminance contrast is
    the mean of the top 1 % of ``l`` minus the mean of the bottom 1 %.
    """
    lab = rgb_to_lab(_rgb(img)).reshape(-1, 3)
    lightness = lab[:, 0] / 100.0
    chroma = np.hypot(lab[:, 1], lab[:, 2]) / CHROMA_SCALE
    chroma = np.where(chroma < ACHROMATIC_TOLERANCE, 0.0, chroma)

    sigma_c = float(np.std(chroma))
    count = max(1, int(round(CONTRAST_FRACTION * lightness.size)))
    ordered = np.sort(lightness)
    con_l = float(ordered[-count:].mean() - ordered[:count].mean())
    norm = np.hypot(chroma, lightness)
    saturation = np.divide(chroma, norm, out=np.zeros_like(chroma), where=norm > 0)
    mu_s = float(saturation.mean())

    c1, c2, c3 = UCIQE_WEIGHTS
    return UciqeComponents(sigma_c, con_l, mu_s, c1 * sigma_c + c2 * con_l + c3 * mu_s)


def uciqe(img: Image | np.ndarray) -> float:
    return uciqe_components(img).score


# --------------------------------------------------------------------------- UIQM


def _trimmed_stats(values: np.ndarray, alpha: float = TRIM_ALPHA) -> tuple[float, float]:
    """Alpha-trimmed mean and variance (``alpha`` dropped from each tail)."""
    ordered = np.sort(values, axis=None)
    trim = int(alpha * ordered.size)
    kept = ordered[trim : ordered.size - trim] if 2 * trim < ordered.size else ordered
    mean = float(kept.mean())
    return mean, float(np.mean((kept - mean) ** 2))


def uicm(rgb255: np.ndarray) -> float:
    rg = rgb255[..., 0] - rgb255[..., 1]
    yb = (rgb255[..., 0] + rgb255[..., 1]) / 2.0 - rgb255[..., 2]
    mu_rg, var_rg = _trimmed_stats(rg)
    mu_yb, var_yb = _trimmed_stats(yb)
    return -0.0268 * math.sqrt(mu_rg**2 + mu_yb**2) + 0.1586 * math.sqrt(var_rg + var_yb)


def _blocks(channel: np.ndarray, size: int = BLOCK):
    """Yield ``size``×``size`` blocks; the last row/column of blocks takes the remainder."""
    height, width = channel.shape
    rows = max(1, height // size)
    cols = max(1, width // size)
    for i in range(rows):
        bottom = height if i == rows - 1 else (i + 1) * size
        for j in range(cols):
            right = width if j == cols - 1 else (j + 1) * size
            yield channel[i * size : bottom, j * size : right]


def _block_count(shape: tuple[int, int], size: int = BLOCK) -> int:
    return max(1, shape[0] // size) * max(1, shape[1] // size)


def eme(channel: np.ndarray, size: int = BLOCK) -> float:
    """Measure of enhancement: ``2 / (k1 k2) * sum log(max / min)`` over blocks.

    Blocks whose minimum or maximum is zero contribute nothing.
    """
    total = 0.0
    for block in _blocks(channel, size):
        low, high = float(block.min()), float(block.max())
        if low > 0.0 and high > 0.0:
            total += math.log(high / low)
    return 2.0 * total / _block_count(channel.shape, size)


def sobel_magnitude(channel: np.ndarray) -> np.ndarray:
    gx = ndimage.sobel(channel, axis=1, mode="nearest")
    gy = ndimage.sobel(channel, axis=0, mode="nearest")
    return np.hypot(gx, gy)


def uism(rgb255: np.ndarray) -> float:
    scores = [eme(rgb255[..., c] * sobel_magnitude(rgb255[..., c])) for c in range(3)]
    return float(np.dot(REC601, scores))


def _plip_sum(a: float, b: float, gamma: float = PLIP_GAMMA) -> float:
    return a + b - a * b / gamma


def _plip_sub(a: float, b: float, k: float = PLIP_GAMMA) -> float:
    return k * (a - b) / (k - b)


def _plip_scalar_mul(c: float, a: float, gamma: float = PLIP_GAMMA) -> float:
    return gamma - gamma * (1.0 - a / gamma) ** c


def log_amee(gray255: np.ndarray, size: int = BLOCK) -> float:
    """Logarithmic AMEE contrast under PLIP arithmetic, with ``0 · log 0 = 0``."""
    total = 0.0
    for block in _blocks(gray255, size):
        low, high = float(block.min()), float(block.max())
        bottom = _plip_sum(high, low)
        ratio = _plip_sub(high, low) / bottom if bottom != 0.0 else 0.0
        if ratio > 0.0:
            total += ratio * math.log(ratio)
    return _plip_scalar_mul(1.0 / _block_count(gray255.shape, size), total)


def uiconm(rgb255: np.ndarray) -> float:
    return log_amee(rgb255 @ REC601)


def uiqm_components(img: Image | np.ndarray) -> UiqmComponents:
    """UIQM and its colorfulness, sharpness and contrast terms on the 0–255 scale."""
    rgb = _rgb(img)
    if rgb.shape[0] < BLOCK or rgb.shape[1] < BLOCK:
        raise ShapeError(
            f"UIQM needs at least one {BLOCK}×{BLOCK} block; got {rgb.shape[0]}×{rgb.shape[1]}",
            axis="spatial",
        )
    rgb255 = rgb * 255.0
    colorfulness = uicm(rgb255)
    sharpness = uism(rgb255)
    contrast = uiconm(rgb255)
    p1, p2, p3 = UIQM_WEIGHTS
    return UiqmComponents(
        colorfulness,
        sharpness,
        contrast,
        p1 * colorfulness + p2 * sharpness + p3 * contrast,
    )


def uiqm(img: Image | np.ndarray) -> float:
    return uiqm_components(img).score
