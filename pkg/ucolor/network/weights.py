"""Named parameter sets of the enhancement network."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, Mapping, Optional

import numpy as np

from ucolor.autodiff import Tape, Tensor, constant
from ucolor.errors import WeightsFormatError
from ucolor.network.config import ModelConfig

logger = logging.getLogger(__name__)

Shape = tuple[int, ...]

REM_CONVS = ("b1.c1", "b1.c2", "b1.c3", "b2.c1", "b2.c2", "b2.c3")


def _conv(shapes: Dict[str, Shape], prefix: str, cout: int, cin: int) -> None:
    shapes[f"{prefix}.kernel"] = (cout, cin, 3, 3)
    shapes[f"{prefix}.bias"] = (cout,)


def _rem(shapes: Dict[str, Shape], prefix: str, width: int) -> None:
    for conv in REM_CONVS:
        _conv(shapes, f"{prefix}.rem.{conv}", width, width)


def parameter_shapes(cfg: ModelConfig) -> Dict[str, Shape]:
    """Declared parameter names and shapes, in a stable order, without allocating.

    Encoder stage ``k`` of every path is an entry conv followed by a
    residual-enhancement module. When more than one path exists, the RGB
    path's stage output is fused with the other paths' stage outputs by a
    3×3 conv back to the stage width. Decoder level ``k`` holds the channel
    attention layers, a merge conv and a residual-enhancement module; the
    reconstruction conv maps the finest level to three channels.
    """
    shapes: Dict[str, Shape] = {}
    widths = cfg.widths
    paths = cfg.paths
    for index, width in enumerate(widths, start=1):
        cin = 3 if index == 1 else widths[index - 2]
        for path in paths:
            _conv(shapes, f"enc.{path}.{index}.entry", width, cin)
            _rem(shapes, f"enc.{path}.{index}", width)
        if cfg.fused:
            _conv(shapes, f"enc.fuse.{index}", width, len(paths) * width)

    for index in range(len(widths), 0, -1):
        width = widths[index - 1]
        channels = len(paths) * width
        if cfg.use_cam:
            hidden = channels // cfg.attention_reduction
            shapes[f"dec.{index}.cam.fc1.weight"] = (hidden, channels)
            shapes[f"dec.{index}.cam.fc1.bias"] = (hidden,)
            shapes[f"dec.{index}.cam.fc2.weight"] = (channels, hidden)
            shapes[f"dec.{index}.cam.fc2.bias"] = (channels,)
        merge_in = channels if index == len(widths) else channels + widths[index]
        _conv(shapes, f"dec.{index}.merge", width, merge_in)
        _rem(shapes, f"dec.{index}", width)
    _conv(shapes, "dec.out", 3, widths[0])
    return shapes


def parameter_count(cfg: ModelConfig) -> int:
    return int(sum(int(np.prod(shape)) for shape in parameter_shapes(cfg).values()))


def first_mismatch(expected: Mapping[str, Shape], actual: Mapping[str, Shape]) -> Optional[str]:
    """Describe the first parameter (in declared order) whose presence or shape differs."""
    for name, shape in expected.items():
        if name not in actual:
            return f"parameter '{name}' missing (expected shape {shape})"
        if tuple(actual[name]) != tuple(shape):
            return f"parameter '{name}' has shape {tuple(actual[name])}, expected {shape}"
    for name in actual:
        if name not in expected:
            return f"unexpected parameter '{name}' with shape {tuple(actual[name])}"
    return None


@dataclass
class ModelWeights:
    """Flat ``name -> array`` parameter map checked against its :class:`ModelConfig`."""

    config: ModelConfig
    params: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.params = {name: np.asarray(value, dtype=np.float64) for name, value in self.params.items()}
        expected = parameter_shapes(self.config)
        problem = first_mismatch(expected, {name: value.shape for name, value in self.params.items()})
        if problem is not None:
            raise WeightsFormatError(f"weights incompatible with model config: {problem}")
        self.params = {name: self.params[name] for name in expected}

    @classmethod
    def initialize(cls, cfg: ModelConfig, seed: int = 0) -> "ModelWeights":
        """Gaussian weights (``cfg.init_std``) and zero biases drawn from ``seed``."""
        rng = np.random.default_rng(seed)
        params: Dict[str, np.ndarray] = {}
        for name, shape in parameter_shapes(cfg).items():
            if name.endswith(".bias"):
                params[name] = np.zeros(shape)
            else:
                params[name] = rng.normal(0.0, cfg.init_std, size=shape)
        weights = cls(cfg, params)
        logger.info(
            "initialized %d parameters (base_width=%d, paths=%s)",
            weights.count,
            cfg.base_width,
            "+".join(cfg.paths),
        )
        logger.debug(
            "full-width configuration would hold %d parameters",
            parameter_count(ModelConfig.paper_scale()),
        )
        return weights

    def __iter__(self) -> Iterator[str]:
        return iter(self.params)

    def __len__(self) -> int:
        return len(self.params)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.params)

    @property
    def count(self) -> int:
        return int(sum(value.size for value in self.params.values()))

    def shapes(self) -> Dict[str, Shape]:
        return {name: tuple(value.shape) for name, value in self.params.items()}

    def copy(self) -> "ModelWeights":
        return ModelWeights(self.config, {name: value.copy() for name, value in self.params.items()})

    def watch(self, tape: Tape) -> Dict[str, Tensor]:
        """Register every parameter as a leaf of ``tape``."""
        return {name: tape.watch(value, name=name) for name, value in self.params.items()}

    def constants(self) -> Dict[str, Tensor]:
        """Tape-free tensors for inference."""
        return {name: constant(value) for name, value in self.params.items()}

    def as_float32(self) -> "ModelWeights":
        """Round every parameter through 32-bit floats (the on-disk precision)."""
        return ModelWeights(
            self.config,
            {name: value.astype(np.float32).astype(np.float64) for name, value in self.params.items()},
        )
