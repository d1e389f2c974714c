"""Shared fixtures: tiny model configs, seeded images and image files."""

from __future__ import annotations

import numpy as np
import pytest
from ucolor.io.images import image_write
from ucolor.models import Image
from ucolor.network.config import ModelConfig


def random_image(rng: np.random.Generator, height: int = 16, width: int = 16) -> Image:
    """Seeded random RGB image quantized to 8 bits so file round trips are exact."""
    return Image(np.round(rng.random((height, width, 3)) * 255.0) / 255.0)


def uniform_image(color, height: int = 16, width: int = 16) -> Image:
    return Image(np.broadcast_to(np.asarray(color, dtype=float), (height, width, 3)))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def tiny_config():
    """Desk-scale architecture used by the network and training tests."""
    return ModelConfig(base_width=4, attention_reduction=2, prior_patch=3)


@pytest.fixture
def image_file(tmp_path, rng):
    """A 16×16 seeded PPM on disk."""
    path = tmp_path / "input.ppm"
    image_write(random_image(rng), path)
    return path
