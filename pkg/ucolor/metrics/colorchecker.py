"""Color-checker protocol: mean CIEDE2000 between chart patches and reference colors."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ucolor.colorspace import rgb_to_lab
from ucolor.errors import ConfigError, ShapeError
from ucolor.metrics.ciede2000 import ciede2000
from ucolor.models import Image

PATCH_COUNT = 24
GRID_ROWS = 4
GRID_COLS = 6

# CIELab (D65) of the 24 Macbeth ColorChecker patches, row-major from "dark skin".
MACBETH_LAB = np.array(
    [
        [37.986, 13.555, 14.059],
        [65.711, 18.130, 17.810],
        [49.927, -4.880, -21.925],
        [43.139, -13.095, 21.905],
        [55.112, 8.844, -25.399],
        [70.719, -33.397, -0.199],
        [62.661, 36.067, 57.096],
        [40.020, 10.410, -45.964],
        [51.124, 48.239, 16.248],
        [30.325, 22.976, -21.587],
        [72.532, -23.709, 57.255],
        [71.941, 19.363, 67.857],
        [28.778, 14.179, -50.297],
        [55.261, -38.342, 31.370],
        [42.101, 53.378, 28.190],
        [81.733, 4.039, 79.819],
        [51.935, 49.986, -14.574],
        [51.038, -28.631, -28.638],
        [96.539, -0.425, 1.186],
        [81.257, -0.638, -0.335],
        [66.766, -0.734, -0.504],
        [50.867, -0.153, -0.270],
        [35.656, -0.421, -1.231],
        [20.461, -0.079, -0.973],
    ]
)

MACBETH_NAMES = (
    "dark skin",
    "light skin",
    "blue sky",
    "foliage",
    "blue flower",
    "bluish green",
    "orange",
    "purplish blue",
    "moderate red",
    "purple",
    "yellow green",
    "orange yellow",
    "blue",
    "green",
    "red",
    "yellow",
    "magenta",
    "cyan",
    "white 9.5",
    "neutral 8",
    "neutral 6.5",
    "neutral 5",
    "neutral 3.5",
    "black 2",
)


@dataclass(frozen=True)
class PatchRect:
    top: int
    left: int
    height: int
    width: int

    @property
    def bottom(self) -> int:
        return self.top + self.height

    @property
    def right(self) -> int:
        return self.left + self.width

    def overlaps(self, other: "PatchRect") -> bool:
        return (
            self.top < other.bottom
            and other.top < self.bottom
            and self.left < other.right
            and other.left < self.right
        )


@dataclass
class ColorCheckerLayout:
    """Pixel rectangles of the 24 chart patches and their reference Lab colors."""

    rects: Sequence[PatchRect]
    reference_lab: ArrayLike = MACBETH_LAB

    def __post_init__(self) -> None:
        self.rects = [r if isinstance(r, PatchRect) else PatchRect(*r) for r in self.rects]
        self.reference_lab = np.array(self.reference_lab, dtype=np.float64)
        problems = []
        if len(self.rects) != PATCH_COUNT:
            problems.append(f"layout needs {PATCH_COUNT} patches; got {len(self.rects)}")
        if self.reference_lab.shape != (len(self.rects), 3):
            problems.append(
                f"reference colors must have shape ({len(self.rects)}, 3); got {self.reference_lab.shape}"
            )
        for index, rect in enumerate(self.rects):
            if rect.top < 0 or rect.left < 0 or rect.height < 1 or rect.width < 1:
                problems.append(f"patch {index} has an invalid rectangle {rect}")
            for other_index in range(index + 1, len(self.rects)):
                if rect.overlaps(self.rects[other_index]):
                    problems.append(f"patches {index} and {other_index} overlap")
        if problems:
            raise ConfigError(problems)

    @classmethod
    def grid(
        cls,
        height: int,
        width: int,
        *,
        inset: float = 0.2,
        reference_lab: ArrayLike = MACBETH_LAB,
    ) -> "ColorCheckerLayout":
        """Standard 4×6 chart filling a ``height``×``width`` image.

        Each cell is shrunk by ``inset`` of its size on every side so that
        the sampled areas avoid patch borders.
        """
        cell_h = height / GRID_ROWS
        cell_w = width / GRID_COLS
        rects = []
        for row in range(GRID_ROWS):
            for col in range(GRID_COLS):
                top = int(np.floor(row * cell_h + inset * cell_h))
                left = int(np.floor(col * cell_w + inset * cell_w))
                bottom = int(np.ceil((row + 1) * cell_h - inset * cell_h))
                right = int(np.ceil((col + 1) * cell_w - inset * cell_w))
                rects.append(PatchRect(top, left, max(1, bottom - top), max(1, right - left)))
        return cls(rects, reference_lab)

    def check_bounds(self, height: int, width: int) -> None:
        for index, rect in enumerate(self.rects):
            if rect.bottom > height or rect.right > width:
                raise ShapeError(
                    f"patch {index} {rect} lies outside the {height}×{width} image",
                    axis="spatial",
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "patches": [
                {
                    "top": rect.top,
                    "left": rect.left,
                    "height": rect.height,
                    "width": rect.width,
                    "lab": [float(v) for v in lab],
                }
                for rect, lab in zip(self.rects, self.reference_lab)
            ]
        }

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "ColorCheckerLayout":
        patches = payload.get("patches") if isinstance(payload, Mapping) else None
        if not isinstance(patches, list):
            raise ConfigError(["layout needs a 'patches' list"])
        rects, labs = [], []
        for index, patch in enumerate(patches):
            try:
                rects.append(
                    PatchRect(int(patch["top"]), int(patch["left"]), int(patch["height"]), int(patch["width"]))
                )
                labs.append([float(v) for v in patch.get("lab", MACBETH_LAB[index % PATCH_COUNT])])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError([f"layout patch {index} is malformed: {exc}"]) from exc
        return cls(rects, np.array(labs))


def load_layout(path: str | os.PathLike[str]) -> ColorCheckerLayout:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from exc
    return ColorCheckerLayout.from_mapping(payload)


def patch_colors(result: Image, layout: ColorCheckerLayout) -> np.ndarray:
    """Mean RGB of every patch, converted to Lab, shape ``(24, 3)``."""
    layout.check_bounds(result.height, result.width)
    means = np.array(
        [
            result.pixels[rect.top : rect.bottom, rect.left : rect.right].reshape(-1, 3).mean(axis=0)
            for rect in layout.rects
        ]
    )
    return rgb_to_lab(np.clip(means, 0.0, 1.0))


def patch_differences(result: Image, layout: ColorCheckerLayout) -> np.ndarray:
    return np.asarray(ciede2000(patch_colors(result, layout), layout.reference_lab))


def color_checker_score(result: Image, layout: ColorCheckerLayout) -> float:
    """Mean CIEDE2000 over the 24 patches."""
    return float(np.mean(patch_differences(result, layout)))
