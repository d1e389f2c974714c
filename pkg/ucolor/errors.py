"""Exception hierarchy shared by every ucolor module."""

from __future__ import annotations

from typing import Iterable, Optional


class UcolorError(RuntimeError):
    """Base class for all errors raised by ucolor."""


class ShapeError(UcolorError, ValueError):
    """Raised when tensor or image extents disagree.

    The message always names the offending axis so callers can tell a channel
    mismatch from a spatial one.
    """

    def __init__(self, message: str, *, axis: Optional[str] = None) -> None:
        super().__init__(message if axis is None else f"{message} (axis: {axis})")
        self.axis = axis


class ColorSpaceError(UcolorError, ValueError):
    """Raised when a color component lies outside its valid range."""


class PhysicsError(UcolorError, ValueError):
    """Raised when the image formation model receives unusable inputs."""


class ConfigError(UcolorError, ValueError):
    """Raised when a configuration document fails validation.

    All violations are collected so they can be reported together.
    """

    def __init__(self, violations: Iterable[str]) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid configuration")


class ImageFormatError(UcolorError, OSError):
    """Raised for malformed, truncated, or unsupported image files."""


class WeightsFormatError(UcolorError, OSError):
    """Raised when a weights file cannot be read or does not match the model."""


class ManifestError(UcolorError, OSError):
    """Raised when a dataset manifest is malformed or references missing files."""


class NumericError(UcolorError, ArithmeticError):
    """Raised when training produces a non-finite loss."""

    def __init__(self, message: str, *, step: Optional[int] = None) -> None:
        super().__init__(message if step is None else f"{message} at step {step}")
        self.step = step
