"""High-level inference facade over the enhancement network."""

from __future__ import annotations

import logging
import os
import time
from pathlib import Path
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from ucolor.errors import ImageFormatError
from ucolor.io.images import SUPPORTED_SUFFIXES, image_read, image_write
from ucolor.io.weights_file import load_weights
from ucolor.models import Image
from ucolor.network.config import ModelConfig
from ucolor.network.ucolor_net import SIZE_MULTIPLE, forward
from ucolor.network.weights import ModelWeights

logger = logging.getLogger(__name__)


def pad_to_multiple(img: Image, multiple: int = SIZE_MULTIPLE) -> Image:
    """Extend ``img`` at the bottom and right by edge replication."""
    pad_h = -img.height % multiple
    pad_w = -img.width % multiple
    if not pad_h and not pad_w:
        return img
    padded = np.pad(img.pixels, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")
    return Image(padded, space=img.space, meta=dict(img.meta))


def list_images(directory: str | os.PathLike[str]) -> list[Path]:
    """Every supported image below ``directory``, relative to it, in sorted order."""
    root = Path(directory)
    if not root.is_dir():
        raise ImageFormatError(f"input directory {root} does not exist")
    return sorted(
        path.relative_to(root)
        for path in root.rglob("*")
        if path.is_file() and path.suffix.lower() in SUPPORTED_SUFFIXES
    )


class Enhancer:
    """Runs a trained model on images of any size.

    Inputs are padded to a multiple of 4 and the output is cropped back, so
    callers never see the network's size constraint.
    """

    def __init__(self, config: ModelConfig, weights: ModelWeights) -> None:
        self.config = config
        self.weights = weights
        # Fails on the first mismatching parameter rather than mid-batch.
        ModelWeights(config, weights.params)

    def enhance(self, img: Image) -> Image:
        padded = pad_to_multiple(img)
        out = forward(padded, self.config, self.weights)
        if padded is not img:
            out = out.crop(0, 0, img.height, img.width)
        out.meta.update(img.meta)
        out.meta["prior"] = self.config.prior
        return out

    def enhance_file(self, source: str | os.PathLike[str], target: str | os.PathLike[str]) -> Path:
        started = time.perf_counter()
        result = image_write(self.enhance(image_read(source)), target)
        logger.debug("enhanced %s in %.3f s", source, time.perf_counter() - started)
        return result

    def enhance_directory(
        self,
        source: str | os.PathLike[str],
        target: str | os.PathLike[str],
        *,
        threads: int = 1,
    ) -> list[Path]:
        """Enhance every image under ``source`` into the same relative path under ``target``."""
        source, target = Path(source), Path(target)
        names = list_images(source)
        logger.info("enhancing %d images from %s with %d thread(s)", len(names), source, threads)
        written = Parallel(n_jobs=max(1, threads), prefer="threads")(
            delayed(self.enhance_file)(source / name, target / name) for name in names
        )
        return list(written)


def enhancer(
    *,
    weights_path: Optional[str | os.PathLike[str]] = None,
    weights: Optional[ModelWeights] = None,
    config: Optional[ModelConfig] = None,
    prior: Optional[str] = None,
    seed: int = 0,
) -> Enhancer:
    """Build an :class:`Enhancer`.

    Weights come from ``weights_path``, from ``weights``, or are freshly
    initialized from ``seed``. ``config`` defaults to the configuration
    stored with the weights; ``prior`` overrides its transmission prior.
    """
    if weights_path is not None:
        weights = load_weights(weights_path, expected=config)
    if config is None:
        config = weights.config if weights is not None else ModelConfig()
    if prior is not None:
        config = config.with_updates(prior=prior)
    if weights is None:
        weights = ModelWeights.initialize(config, seed)
    return Enhancer(config, weights)
