"""Fixed, seeded convolutional feature extractor used by the perceptual loss."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from ucolor.autodiff import Tensor, conv2d, max_pool2, relu
from ucolor.errors import ShapeError

DEFAULT_WIDTHS = (8, 16, 32, 64)


@dataclass
class FeatureExtractor:
    """Stack of ``conv3×3 → relu → max-pool`` stages tapped at the deepest stage.

    Weights are drawn once from ``seed`` with fan-in scaled Gaussians and are
    read-only afterwards. Externally trained filters can be supplied through
    :meth:`from_arrays`.
    """

    seed: int = 0
    widths: Sequence[int] = DEFAULT_WIDTHS
    kernels: list[np.ndarray] = field(default_factory=list, repr=False)
    biases: list[np.ndarray] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        self.widths = tuple(int(w) for w in self.widths)
        if not self.kernels:
            rng = np.random.default_rng(self.seed)
            cin = 3
            for width in self.widths:
                std = np.sqrt(2.0 / (9.0 * cin))
                self.kernels.append(rng.normal(0.0, std, size=(width, cin, 3, 3)))
                self.biases.append(np.zeros(width))
                cin = width
        if len(self.kernels) != len(self.biases) or len(self.kernels) != len(self.widths):
            raise ShapeError("feature extractor needs one kernel and bias per stage", axis="stage")
        for array in (*self.kernels, *self.biases):
            array.flags.writeable = False

    @classmethod
    def from_arrays(cls, kernels: Sequence[ArrayLike], biases: Sequence[ArrayLike]) -> "FeatureExtractor":
        kernel_arrays = [np.array(k, dtype=np.float64) for k in kernels]
        return cls(
            seed=-1,
            widths=tuple(k.shape[0] for k in kernel_arrays),
            kernels=kernel_arrays,
            biases=[np.array(b, dtype=np.float64) for b in biases],
        )

    @property
    def min_size(self) -> int:
        return 2 ** len(self.widths)

    def _check(self, shape: tuple[int, ...]) -> None:
        if min(shape[-2:]) < self.min_size:
            raise ShapeError(
                f"perceptual features need images of at least {self.min_size}×{self.min_size}; "
                f"got {shape[-2]}×{shape[-1]}",
                axis="spatial",
            )

    def features(self, x: Tensor | ArrayLike) -> Tensor:
        """Differentiable features of a ``(3, H, W)`` input."""
        out = x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float64))
        self._check(out.shape)
        for kernel, bias in zip(self.kernels, self.biases):
            out = max_pool2(relu(conv2d(out, kernel, bias)))
        return out

    def features_array(self, x: ArrayLike) -> np.ndarray:
        """Constant (gradient-free) features, used for the reference branch."""
        return self.features(np.asarray(x, dtype=np.float64)).numpy()
