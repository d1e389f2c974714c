"""Random aligned patch crops from paired training images."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ucolor.errors import ShapeError
from ucolor.io.manifest import DatasetManifest
from ucolor.models import Image
from ucolor.training.config import TrainConfig

ImagePair = Tuple[Image, Image]


@dataclass
class PatchPair:
    """Input and reference crops taken at the same coordinates."""

    input: Image
    reference: Image
    source: int
    top: int
    left: int


def check_pairs(pairs: Sequence[ImagePair], patch: int) -> None:
    if not pairs:
        raise ShapeError("training set is empty", axis="dataset")
    for index, (inp, ref) in enumerate(pairs):
        if inp.shape != ref.shape:
            raise ShapeError(
                f"pair {index}: input {inp.shape[:2]} and reference {ref.shape[:2]} differ",
                axis="spatial",
            )
        if inp.height < patch or inp.width < patch:
            raise ShapeError(
                f"pair {index}: image {inp.height}×{inp.width} is smaller than patch {patch}",
                axis="spatial",
            )


def sample_patches(
    dataset: DatasetManifest | Sequence[ImagePair],
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> list[PatchPair]:
    """Draw ``cfg.batch_size`` aligned ``cfg.patch``-sized crops.

    Each draw picks an image uniformly, then a uniformly random top-left
    corner; a given generator state always yields the same batch.
    """
    pairs = dataset.load_pairs() if isinstance(dataset, DatasetManifest) else list(dataset)
    patch = cfg.patch
    check_pairs(pairs, patch)
    batch = []
    for _ in range(cfg.batch_size):
        source = int(rng.integers(len(pairs)))
        inp, ref = pairs[source]
        top = int(rng.integers(inp.height - patch + 1))
        left = int(rng.integers(inp.width - patch + 1))
        batch.append(
            PatchPair(
                inp.crop(top, left, patch, patch),
                ref.crop(top, left, patch, patch),
                source,
                top,
                left,
            )
        )
    return batch
