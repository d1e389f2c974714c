"""RGB ↔ HSV ↔ CIELab conversions and the network-input normalization.

All conversions are vectorized over arrays shaped ``(..., 3)``; a single
color is simply the ``(3,)`` case. Lab uses sRGB companding and the D65
white point of the sRGB primaries.
"""

from __future__ import annotations

from typing import Tuple, overload

import numpy as np
from numpy.typing import ArrayLike

from ucolor.errors import ColorSpaceError
from ucolor.models import ColorSpace, Image

SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)
# XYZ of RGB (1, 1, 1) so that white maps onto L=100, a=b=0.
D65_WHITE = SRGB_TO_XYZ.sum(axis=1)

LAB_EPSILON = 216.0 / 24389.0
LAB_KAPPA = 24389.0 / 27.0
COMPANDING_KNEE = 0.04045
LINEAR_KNEE = COMPANDING_KNEE / 12.92

LAB01_OFFSET = 128.0
LAB01_SCALE = 255.0

GAMUT_TOLERANCE = 1e-9


def _as_triples(values: ArrayLike, what: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.shape[-1:] != (3,):
        raise ColorSpaceError(f"{what} must have a trailing axis of 3 components; got {array.shape}")
    return array


def _require_unit(array: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(array)):
        raise ColorSpaceError(f"{what} contains non-finite components")
    if array.size and (array.min() < 0.0 or array.max() > 1.0):
        raise ColorSpaceError(
            f"{what} components must lie in [0, 1]; got range [{array.min():.6g}, {array.max():.6g}]"
        )


def rgb_to_hsv(rgb: ArrayLike) -> np.ndarray:
    """Hexcone HSV with hue expressed as angle/360; achromatic pixels get H = S = 0."""
    rgb = _as_triples(rgb, "rgb")
    _require_unit(rgb, "rgb")
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc
    chromatic = delta > 0.0
    safe = np.where(chromatic, delta, 1.0)
    sector = np.select(
        [maxc == r, maxc == g],
        [np.mod((g - b) / safe, 6.0), (b - r) / safe + 2.0],
        default=(r - g) / safe + 4.0,
    )
    hue = np.where(chromatic, np.mod(sector / 6.0, 1.0), 0.0)
    saturation = np.where(chromatic & (maxc > 0.0), delta / np.where(maxc > 0.0, maxc, 1.0), 0.0)
    return np.stack([hue, saturation, maxc], axis=-1)


def hsv_to_rgb(hsv: ArrayLike) -> np.ndarray:
    """Inverse of :func:`rgb_to_hsv`."""
    hsv = _as_triples(hsv, "hsv")
    _require_unit(hsv, "hsv")
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    scaled = h * 6.0
    floor = np.floor(scaled)
    frac = scaled - floor
    sector = np.mod(floor, 6.0).astype(int)
    p = v * (1.0 - s)
    q = v * (1.0 - s * frac)
    t = v * (1.0 - s * (1.0 - frac))
    choices_r = [v, q, p, p, t, v]
    choices_g = [t, v, v, q, p, p]
    choices_b = [p, p, t, v, v, q]
    conditions = [sector == k for k in range(6)]
    return np.stack(
        [
            np.select(conditions, choices_r),
            np.select(conditions, choices_g),
            np.select(conditions, choices_b),
        ],
        axis=-1,
    )


def _expand_srgb(rgb: np.ndarray) -> np.ndarray:
    return np.where(rgb <= COMPANDING_KNEE, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)


def _compress_srgb(linear: np.ndarray) -> np.ndarray:
    clipped = np.clip(linear, 0.0, None)
    return np.where(clipped <= LINEAR_KNEE, clipped * 12.92, 1.055 * clipped ** (1.0 / 2.4) - 0.055)


def rgb_to_lab(rgb: ArrayLike) -> np.ndarray:
    """sRGB → linear RGB → XYZ (D65) → CIELab."""
    rgb = _as_triples(rgb, "rgb")
    _require_unit(rgb, "rgb")
    xyz = _expand_srgb(rgb) @ SRGB_TO_XYZ.T
    ratio = xyz / D65_WHITE
    f = np.where(ratio > LAB_EPSILON, np.cbrt(ratio), (LAB_KAPPA * ratio + 16.0) / 116.0)
    lightness = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return np.stack([lightness, a, b], axis=-1)


@overload
def lab_to_rgb(lab: ArrayLike) -> np.ndarray: ...


@overload
def lab_to_rgb(lab: ArrayLike, *, return_gamut: bool) -> np.ndarray | Tuple[np.ndarray, np.ndarray]: ...


def lab_to_rgb(lab: ArrayLike, *, return_gamut: bool = False):
    """Inverse of :func:`rgb_to_lab`, clamped to [0, 1].

    With ``return_gamut=True`` a boolean array (one flag per color) reports
    which inputs fell outside the sRGB gamut before clamping.
    """
    lab = _as_triples(lab, "lab")
    if not np.all(np.isfinite(lab)):
        raise ColorSpaceError("lab contains non-finite components")
    lightness, a, b = lab[..., 0], lab[..., 1], lab[..., 2]
    fy = (lightness + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0
    xr = np.where(fx**3 > LAB_EPSILON, fx**3, (116.0 * fx - 16.0) / LAB_KAPPA)
    yr = np.where(lightness > LAB_KAPPA * LAB_EPSILON, fy**3, lightness / LAB_KAPPA)
    zr = np.where(fz**3 > LAB_EPSILON, fz**3, (116.0 * fz - 16.0) / LAB_KAPPA)
    xyz = np.stack([xr, yr, zr], axis=-1) * D65_WHITE
    linear = xyz @ XYZ_TO_SRGB.T
    out_of_gamut = np.any((linear < -GAMUT_TOLERANCE) | (linear > 1.0 + GAMUT_TOLERANCE), axis=-1)
    rgb = np.clip(_compress_srgb(linear), 0.0, 1.0)
    if return_gamut:
        return rgb, out_of_gamut
    return rgb


def lab_to_lab01(lab: ArrayLike) -> np.ndarray:
    """Map Lab onto [0, 1]: ``(L/100, (a+128)/255, (b+128)/255)`` with clamping."""
    lab = _as_triples(lab, "lab")
    normalized = np.stack(
        [
            lab[..., 0] / 100.0,
            (lab[..., 1] + LAB01_OFFSET) / LAB01_SCALE,
            (lab[..., 2] + LAB01_OFFSET) / LAB01_SCALE,
        ],
        axis=-1,
    )
    return np.clip(normalized, 0.0, 1.0)


def lab01_to_lab(lab01: ArrayLike) -> np.ndarray:
    """Undo :func:`lab_to_lab01` (exact for unclamped values)."""
    lab01 = _as_triples(lab01, "lab01")
    return np.stack(
        [
            lab01[..., 0] * 100.0,
            lab01[..., 1] * LAB01_SCALE - LAB01_OFFSET,
            lab01[..., 2] * LAB01_SCALE - LAB01_OFFSET,
        ],
        axis=-1,
    )


def to_network_input(img: Image) -> tuple[Image, Image, Image]:
    """Return the RGB, HSV01 and LAB01 renditions fed to the three encoder paths."""
    if img.space is not ColorSpace.RGB:
        raise ColorSpaceError(f"network input must be an RGB image; got {img.space.value}")
    rgb = img.pixels
    hsv = rgb_to_hsv(rgb)
    lab01 = lab_to_lab01(rgb_to_lab(rgb))
    return (
        Image(rgb.copy(), space=ColorSpace.RGB, meta=dict(img.meta)),
        Image(hsv, space=ColorSpace.HSV01),
        Image(lab01, space=ColorSpace.LAB01),
    )


def from_network_input(img: Image) -> Image:
    """Convert an HSV01 or LAB01 rendition back to an RGB image."""
    if img.space is ColorSpace.RGB:
        return img.copy()
    if img.space is ColorSpace.HSV01:
        rgb = hsv_to_rgb(img.pixels)
    else:
        rgb = lab_to_rgb(lab01_to_lab(img.pixels))
    return Image(np.clip(rgb, 0.0, 1.0), space=ColorSpace.RGB, meta=dict(img.meta))
