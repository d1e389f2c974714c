"""Quality metrics and the manifest-driven evaluation driver."""

from .ciede2000 import ciede2000
from .colorchecker import (
    MACBETH_LAB,
    ColorCheckerLayout,
    PatchRect,
    color_checker_score,
    load_layout,
    patch_colors,
)
from .evaluate import EvalReport, ImageRecord, evaluate
from .noreference import (
    UciqeComponents,
    UiqmComponents,
    uciqe,
    uciqe_components,
    uiqm,
    uiqm_components,
)
from .reference import PSNR_INF, mse, psnr

__all__ = [
    "MACBETH_LAB",
    "PSNR_INF",
    "ColorCheckerLayout",
    "EvalReport",
    "ImageRecord",
    "PatchRect",
    "UciqeComponents",
    "UiqmComponents",
    "ciede2000",
    "color_checker_score",
    "evaluate",
    "load_layout",
    "mse",
    "patch_colors",
    "psnr",
    "uciqe",
    "uciqe_components",
    "uiqm",
    "uiqm_components",
]
