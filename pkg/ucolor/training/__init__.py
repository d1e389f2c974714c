"""Losses, optimizer, patch sampling and the training loop."""

from .config import TrainConfig
from .features import FeatureExtractor
from .losses import (
    LossTerms,
    combine_losses,
    l1_loss,
    l2_loss,
    loss_terms,
    perceptual_loss,
    total_loss,
)
from .optim import Adam, AdamState, adam_step
from .sampling import PatchPair, sample_patches
from .trainer import TRACE_COLUMNS, TrainResult, train, write_trace

__all__ = [
    "Adam",
    "AdamState",
    "FeatureExtractor",
    "LossTerms",
    "PatchPair",
    "TRACE_COLUMNS",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "combine_losses",
    "l1_loss",
    "l2_loss",
    "loss_terms",
    "perceptual_loss",
    "sample_patches",
    "total_loss",
    "train",
    "write_trace",
]
