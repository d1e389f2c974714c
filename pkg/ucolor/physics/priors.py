"""Patch-statistics priors that estimate the medium transmission map."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, Type

import numpy as np
from scipy import ndimage

from ucolor.errors import PhysicsError
from ucolor.models import BackgroundLight, ColorSpace, Image, TransmissionMap

DEFAULT_PATCH = 15


def _check_patch(patch: int) -> int:
    patch = int(patch)
    if patch < 1 or patch % 2 == 0:
        raise PhysicsError(f"patch size must be a positive odd integer; got {patch}")
    return patch


def patch_max(values: np.ndarray, patch: int) -> np.ndarray:
    """Maximum over the ``patch``×``patch`` window centred at each pixel.

    Windows are truncated at the borders; edge replication never changes a
    max, so ``mode="nearest"`` is exactly the truncated operator.
    """
    return ndimage.maximum_filter(values, size=patch, mode="nearest")


def patch_min(values: np.ndarray, patch: int) -> np.ndarray:
    """Minimum over the truncated ``patch``×``patch`` window centred at each pixel."""
    return ndimage.minimum_filter(values, size=patch, mode="nearest")


def dark_channel(ratios: np.ndarray, patch: int) -> np.ndarray:
    """Patch minimum of the per-pixel channel minimum of an ``(H, W, C)`` array."""
    return patch_min(ratios.min(axis=-1), patch)


class TransmissionPrior(ABC):
    """Contract every transmission estimator implements.

    Subclasses register themselves under ``prior_name`` so that configuration
    files and the CLI can select them by name.
    """

    prior_name: ClassVar[str]
    description: ClassVar[str] = ""
    registry: ClassVar[Dict[str, Type["TransmissionPrior"]]] = {}

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        name = getattr(cls, "prior_name", None)
        if name:
            TransmissionPrior.registry[name] = cls

    @classmethod
    @abstractmethod
    def estimate_raw(cls, rgb: np.ndarray, light: np.ndarray, patch: int) -> np.ndarray:
        """Return the unclamped transmission for an ``(H, W, 3)`` image."""

    @classmethod
    def estimate(
        cls,
        img: Image,
        light: BackgroundLight,
        patch: int = DEFAULT_PATCH,
    ) -> TransmissionMap:
        """Estimate the transmission map of ``img`` under background light ``light``."""
        if img.space is not ColorSpace.RGB:
            raise PhysicsError(f"{cls.prior_name} expects an RGB image; got {img.space.value}")
        patch = _check_patch(patch)
        a = light.as_array()
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise PhysicsError(f"background light components must lie in (0, 1); got {a.tolist()}")
        raw = cls.estimate_raw(img.pixels, a, patch)
        return TransmissionMap(np.clip(raw, 0.0, 1.0), prior=cls.prior_name)


class GdcpPrior(TransmissionPrior):
    """Generalized dark channel prior.

    ``T(x) = max_c max_{y in patch(x)} (A_c - I_c(y)) / max(A_c, 1 - A_c)``.
    """

    prior_name = "gdcp"
    description = "generalized dark channel prior"

    @classmethod
    def estimate_raw(cls, rgb: np.ndarray, light: np.ndarray, patch: int) -> np.ndarray:
        scale = np.maximum(light, 1.0 - light)
        ratios = (light - rgb) / scale
        return patch_max(ratios.max(axis=-1), patch)


class DcpPrior(TransmissionPrior):
    """Classic dark channel prior over all three channels."""

    prior_name = "dcp"
    description = "dark channel prior"
    channels: ClassVar[tuple[int, ...]] = (0, 1, 2)

    @classmethod
    def estimate_raw(cls, rgb: np.ndarray, light: np.ndarray, patch: int) -> np.ndarray:
        index = list(cls.channels)
        ratios = rgb[..., index] / light[index]
        return 1.0 - dark_channel(ratios, patch)


class UdcpPrior(DcpPrior):
    """Underwater dark channel prior: the red channel is ignored."""

    prior_name = "udcp"
    description = "underwater dark channel prior (green and blue only)"
    channels = (1, 2)


def get_prior(name: str) -> Type[TransmissionPrior]:
    """Resolve a prior class by its registered name."""
    try:
        return TransmissionPrior.registry[name]
    except KeyError as exc:
        known = ", ".join(sorted(TransmissionPrior.registry))
        raise PhysicsError(f"unknown transmission prior '{name}' (known: {known})") from exc


def available_priors() -> tuple[str, ...]:
    return tuple(sorted(TransmissionPrior.registry))


def gdcp_transmission(img: Image, light: BackgroundLight, patch: int = DEFAULT_PATCH) -> TransmissionMap:
    return GdcpPrior.estimate(img, light, patch)


def dcp_transmission(img: Image, light: BackgroundLight, patch: int = DEFAULT_PATCH) -> TransmissionMap:
    return DcpPrior.estimate(img, light, patch)


def udcp_transmission(img: Image, light: BackgroundLight, patch: int = DEFAULT_PATCH) -> TransmissionMap:
    return UdcpPrior.estimate(img, light, patch)
