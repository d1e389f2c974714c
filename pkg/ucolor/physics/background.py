"""Background-light estimation by hierarchical quad-tree search."""

from __future__ import annotations

import logging

import numpy as np

from ucolor.errors import PhysicsError
from ucolor.models import BackgroundLight, ColorSpace, Image

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-3
MIN_REGION = 32


def _quadrants(region: np.ndarray) -> list[np.ndarray]:
    height, width = region.shape[:2]
    mid_h, mid_w = height // 2, width // 2
    return [
        region[:mid_h, :mid_w],
        region[:mid_h, mid_w:],
        region[mid_h:, :mid_w],
        region[mid_h:, mid_w:],
    ]


def estimate_background_light(
    img: Image | np.ndarray,
    *,
    epsilon: float = DEFAULT_EPSILON,
    min_region: int = MIN_REGION,
) -> BackgroundLight:
    """Estimate the homogeneous background light ``A`` of an underwater image.

    The image is split into four quadrants and the search recurses into the
    quadrant whose mean color lies farthest from the global mean color, until
    the region is smaller than ``min_region`` pixels on its short side. ``A``
    is the mean color of the final region with every channel clamped to
    ``[epsilon, 1 - epsilon]``.

    Parameters
    ----------
    img : Image or numpy.ndarray
        RGB image, or an ``(H, W, 3)`` array in [0, 1].
    epsilon : float, optional
        Clamp margin keeping each component strictly inside (0, 1).
    min_region : int, optional
        Stop splitting once ``min(height, width)`` drops below this size.

    Returns
    -------
    BackgroundLight
    """
    if isinstance(img, Image):
        if img.space is not ColorSpace.RGB:
            raise PhysicsError(f"background light needs an RGB image; got {img.space.value}")
        pixels = img.pixels
    else:
        pixels = np.asarray(img, dtype=np.float64)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise PhysicsError(f"expected an (H, W, 3) array; got shape {pixels.shape}")
    if pixels.shape[0] == 0 or pixels.shape[1] == 0:
        raise PhysicsError("cannot estimate background light of an empty image")
    if not 0.0 < epsilon < 0.5:
        raise PhysicsError(f"epsilon must lie in (0, 0.5); got {epsilon}")

    global_mean = pixels.reshape(-1, 3).mean(axis=0)
    region = pixels
    depth = 0
    while min(region.shape[:2]) >= min_region and min(region.shape[:2]) >= 2:
        quads = _quadrants(region)
        distances = [np.linalg.norm(q.reshape(-1, 3).mean(axis=0) - global_mean) for q in quads]
        # argmax returns the first maximum, i.e. row-major order on ties.
        region = quads[int(np.argmax(distances))]
        depth += 1

    light = np.clip(region.reshape(-1, 3).mean(axis=0), epsilon, 1.0 - epsilon)
    logger.debug("background light %s after %d quad-tree splits", light.round(4).tolist(), depth)
    return BackgroundLight.from_array(light)
