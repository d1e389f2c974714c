"""Reconstruction, perceptual and total training losses.

All losses take the prediction as a ``(3, H, W)`` :class:`Tensor` (or an
:class:`Image`) and the reference as an image or constant array, and return
a scalar tensor so they can be differentiated on the prediction's tape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from numpy.typing import ArrayLike

from ucolor.autodiff import (
    Tensor,
    absolute,
    detach,
    reduce_mean,
    reduce_sum,
    scale,
    square,
    sub,
)
from ucolor.errors import ShapeError
from ucolor.models import Image
from ucolor.training.config import TrainConfig
from ucolor.training.features import FeatureExtractor

Reduction = Literal["mean", "sum"]


def _as_chw(value: Tensor | Image | ArrayLike) -> Tensor:
    if isinstance(value, Tensor):
        return value
    if isinstance(value, Image):
        return Tensor(value.to_chw())
    return Tensor(np.asarray(value, dtype=np.float64))


def _reference(value: Tensor | Image | ArrayLike) -> np.ndarray:
    if isinstance(value, Tensor):
        return detach(value).data
    return _as_chw(value).data


def _reduce(x: Tensor, reduction: Reduction) -> Tensor:
    if reduction == "sum":
        return reduce_sum(x)
    if reduction == "mean":
        return reduce_mean(x)
    raise ValueError(f"unknown reduction '{reduction}'")


def _difference(pred: Tensor | Image | ArrayLike, gt: Tensor | Image | ArrayLike) -> Tensor:
    p = _as_chw(pred)
    g = _reference(gt)
    if p.shape != g.shape:
        raise ShapeError(f"prediction {p.shape} and reference {g.shape} differ", axis="shape")
    return sub(p, g)


def l2_loss(pred, gt, reduction: Reduction = "mean") -> Tensor:
    """Squared error, summed or averaged over every pixel and channel."""
    return _reduce(square(_difference(pred, gt)), reduction)


def l1_loss(pred, gt, reduction: Reduction = "mean") -> Tensor:
    """Absolute error; the subgradient at equality is 0."""
    return _reduce(absolute(_difference(pred, gt)), reduction)


def perceptual_loss(
    pred,
    gt,
    fx: FeatureExtractor,
    reduction: Reduction = "mean",
) -> Tensor:
    """Absolute distance between extractor features; the reference branch is constant."""
    p = _as_chw(pred)
    g = _reference(gt)
    if p.shape != g.shape:
        raise ShapeError(f"prediction {p.shape} and reference {g.shape} differ", axis="shape")
    target = fx.features_array(g)
    return _reduce(absolute(sub(fx.features(p), target)), reduction)


@dataclass
class LossTerms:
    recon: Tensor
    perceptual: Optional[Tensor]
    total: Tensor

    def values(self) -> tuple[float, float, float]:
        perceptual = 0.0 if self.perceptual is None else self.perceptual.item()
        return self.recon.item(), perceptual, self.total.item()


def combine_losses(recon: Tensor, perceptual: Optional[Tensor], weight: float) -> Tensor:
    """``recon + weight * perceptual``; a missing perceptual term contributes nothing."""
    if perceptual is None:
        return recon
    return recon + scale(perceptual, weight)


def loss_terms(pred, gt, cfg: TrainConfig, fx: Optional[FeatureExtractor] = None) -> LossTerms:
    recon_fn = l2_loss if cfg.recon_loss == "l2" else l1_loss
    recon = recon_fn(pred, gt, cfg.reduction)
    perceptual = None
    if cfg.use_perceptual:
        if fx is None:
            raise ValueError("use_perceptual is set but no feature extractor was given")
        perceptual = perceptual_loss(pred, gt, fx, cfg.reduction)
    return LossTerms(recon, perceptual, combine_losses(recon, perceptual, cfg.perceptual_weight))


def total_loss(pred, gt, cfg: TrainConfig, fx: Optional[FeatureExtractor] = None) -> Tensor:
    """Reconstruction loss plus the weighted perceptual term."""
    return loss_terms(pred, gt, cfg, fx).total
