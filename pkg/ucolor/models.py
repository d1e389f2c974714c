"""Canonical image-domain data structures used across ucolor."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, MutableMapping

import numpy as np
from numpy.typing import ArrayLike

from ucolor.errors import PhysicsError, ShapeError

RANGE_TOLERANCE = 1e-12


class ColorSpace(str, Enum):
    """Channel semantics carried by an :class:`Image`."""

    RGB = "rgb"
    HSV01 = "hsv01"
    LAB01 = "lab01"


def _check_unit_range(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise PhysicsError(f"{what} contains non-finite values")
    lo = float(values.min()) if values.size else 0.0
    hi = float(values.max()) if values.size else 0.0
    if lo < -RANGE_TOLERANCE or hi > 1.0 + RANGE_TOLERANCE:
        raise PhysicsError(f"{what} must lie in [0, 1]; got range [{lo:.6g}, {hi:.6g}]")


@dataclass
class Image:
    """H×W×3 float image in [0, 1] tagged with its channel semantics."""

    pixels: ArrayLike
    space: ColorSpace = ColorSpace.RGB
    meta: MutableMapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.pixels = np.array(self.pixels, dtype=np.float64)
        self.space = ColorSpace(self.space)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ShapeError(
                f"Image pixels must have shape (H, W, 3); got {self.pixels.shape}",
                axis="channel" if self.pixels.ndim == 3 else "rank",
            )
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ShapeError("Image must have at least one pixel", axis="spatial")
        _check_unit_range(self.pixels, f"{self.space.value} image")
        np.clip(self.pixels, 0.0, 1.0, out=self.pixels)
        self.meta = dict(self.meta)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.height, self.width, 3)

    def to_chw(self) -> np.ndarray:
        """Return the pixels in channels × height × width layout."""
        return np.ascontiguousarray(self.pixels.transpose(2, 0, 1))

    @classmethod
    def from_chw(cls, data: np.ndarray, space: ColorSpace = ColorSpace.RGB) -> "Image":
        """Build an image from a channels × height × width array."""
        return cls(np.asarray(data).transpose(1, 2, 0), space=space)

    def crop(self, top: int, left: int, height: int, width: int) -> "Image":
        """Return the rectangular window starting at ``(top, left)``."""
        if top < 0 or left < 0 or top + height > self.height or left + width > self.width:
            raise ShapeError(
                f"crop ({top}, {left}, {height}, {width}) exceeds image {self.height}×{self.width}",
                axis="spatial",
            )
        window = self.pixels[top : top + height, left : left + width]
        return Image(window.copy(), space=self.space, meta=dict(self.meta))

    def copy(self) -> "Image":
        """Return a detached copy of the image."""
        return replace(self, pixels=self.pixels.copy(), meta=dict(self.meta))


@dataclass
class BackgroundLight:
    """Homogeneous background light ``A`` of the image formation model."""

    a_r: float
    a_g: float
    a_b: float

    def __post_init__(self) -> None:
        values = np.array([self.a_r, self.a_g, self.a_b], dtype=np.float64)
        _check_unit_range(values, "background light")
        self.a_r, self.a_g, self.a_b = (float(v) for v in values)

    @classmethod
    def from_array(cls, values: ArrayLike) -> "BackgroundLight":
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        if arr.shape != (3,):
            raise ShapeError(f"background light needs 3 components; got {arr.shape[0]}", axis="channel")
        return cls(*arr.tolist())

    def as_array(self) -> np.ndarray:
        return np.array([self.a_r, self.a_g, self.a_b], dtype=np.float64)

    def __iter__(self):
        return iter((self.a_r, self.a_g, self.a_b))


@dataclass
class TransmissionMap:
    """Per-pixel medium transmission (or its reverse) in [0, 1].

    ``complement`` remembers the map this one was reversed from so that
    reversing twice returns the original values bit for bit.
    """

    values: ArrayLike
    reverse: bool = False
    prior: str | None = None
    complement: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.values = np.array(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ShapeError(
                f"transmission map must be 2-D (H, W); got shape {self.values.shape}",
                axis="rank",
            )
        if self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ShapeError("transmission map must have at least one pixel", axis="spatial")
        _check_unit_range(self.values, "transmission map")

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))

    def copy(self) -> "TransmissionMap":
        complement = None if self.complement is None else self.complement.copy()
        return replace(self, values=self.values.copy(), complement=complement)
