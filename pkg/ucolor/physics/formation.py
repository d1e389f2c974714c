"""Forward and inverse use of the underwater image formation model.

The model is ``I = J * T + A * (1 - T)`` where ``J`` is the clean scene,
``T`` the medium transmission and ``A`` the background light.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ucolor.autodiff.ops import max_pool2_array
from ucolor.errors import PhysicsError, ShapeError
from ucolor.models import BackgroundLight, ColorSpace, Image, TransmissionMap
from ucolor.physics.background import estimate_background_light
from ucolor.physics.priors import DEFAULT_PATCH, get_prior

logger = logging.getLogger(__name__)

DEFAULT_T_FLOOR = 0.1


def _check_pair(img: Image, t: TransmissionMap, what: str) -> None:
    if img.space is not ColorSpace.RGB:
        raise PhysicsError(f"{what} expects an RGB image; got {img.space.value}")
    if t.shape != (img.height, img.width):
        raise ShapeError(
            f"{what}: transmission {t.shape} does not match image {img.height}×{img.width}",
            axis="spatial",
        )


def reverse_transmission(t: TransmissionMap) -> TransmissionMap:
    """Return the reverse map ``1 - T``; reversing twice restores ``t`` exactly."""
    values = t.complement if t.complement is not None else 1.0 - t.values
    return TransmissionMap(
        values.copy(),
        reverse=not t.reverse,
        prior=t.prior,
        complement=t.values.copy(),
    )


def rmt_pyramid(t_bar: TransmissionMap, levels: int) -> list[TransmissionMap]:
    """Max-pooled pyramid of a (reverse) transmission map, finest level first."""
    if levels < 1:
        raise PhysicsError(f"levels must be >= 1; got {levels}")
    minimum = 2 ** (levels - 1)
    if min(t_bar.shape) < minimum:
        raise ShapeError(
            f"a {levels}-level pyramid needs at least {minimum}×{minimum} pixels; got {t_bar.shape}",
            axis="spatial",
        )
    pyramid = [t_bar.copy()]
    current = t_bar.values
    for _ in range(levels - 1):
        current = max_pool2_array(current)
        pyramid.append(TransmissionMap(current, reverse=t_bar.reverse, prior=t_bar.prior))
    return pyramid


def synthesize(j: Image, t: TransmissionMap, light: BackgroundLight) -> Image:
    """Degrade a clean image: ``I = J * T + A * (1 - T)``."""
    _check_pair(j, t, "synthesize")
    transmission = t.values[..., None]
    degraded = j.pixels * transmission + light.as_array() * (1.0 - transmission)
    return Image(np.clip(degraded, 0.0, 1.0), meta=dict(j.meta))


def invert_model_raw(
    i: Image,
    t: TransmissionMap,
    light: BackgroundLight,
    t_floor: float = DEFAULT_T_FLOOR,
) -> np.ndarray:
    """Unclamped scene radiance ``(I - A * (1 - T)) / max(T, t_floor)``."""
    if not 0.0 < t_floor <= 1.0:
        raise PhysicsError(f"t_floor must lie in (0, 1]; got {t_floor}")
    _check_pair(i, t, "invert_model")
    transmission = t.values[..., None]
    a = light.as_array()
    return (i.pixels - a * (1.0 - transmission)) / np.maximum(transmission, t_floor)


def invert_model(
    i: Image,
    t: TransmissionMap,
    light: BackgroundLight,
    t_floor: float = DEFAULT_T_FLOOR,
) -> Image:
    """Algebraic inverse of :func:`synthesize`, clamped to [0, 1]."""
    restored = invert_model_raw(i, t, light, t_floor)
    return Image(np.clip(restored, 0.0, 1.0), meta=dict(i.meta))


@dataclass
class RestoreResult:
    """Output of :func:`classical_restore` with the intermediate estimates."""

    image: Image
    light: BackgroundLight
    transmission: TransmissionMap
    degenerate: bool = False


def classical_restore(
    img: Image,
    prior: str = "gdcp",
    *,
    patch: int = DEFAULT_PATCH,
    t_floor: float = DEFAULT_T_FLOOR,
    light: Optional[BackgroundLight] = None,
) -> RestoreResult:
    """Physics-only baseline: estimate ``A`` and ``T`` then invert the model.

    Passing ``light`` skips background-light estimation. The result is
    flagged ``degenerate`` when the estimated transmission falls below
    ``t_floor`` everywhere, so every pixel was restored through the floor.
    """
    if light is None:
        light = estimate_background_light(img)
    transmission = get_prior(prior).estimate(img, light, patch)
    restored = invert_model(img, transmission, light, t_floor)
    degenerate = bool(np.all(transmission.values < t_floor))
    if degenerate:
        logger.warning(
            "degenerate restore: %s transmission below t_floor=%.3g at every pixel",
            prior,
            t_floor,
        )
    restored.meta["prior"] = prior
    return RestoreResult(restored, light, transmission, degenerate)
