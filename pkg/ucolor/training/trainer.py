"""Training driver: sample → forward → loss → backward → ADAM."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from ucolor.autodiff import Tape, Tensor, scale
from ucolor.errors import NumericError
from ucolor.io.files import atomic_write_text
from ucolor.io.manifest import DatasetManifest
from ucolor.network.config import ModelConfig
from ucolor.network.ucolor_net import forward_tensor, prepare_inputs
from ucolor.network.weights import ModelWeights
from ucolor.training.config import TrainConfig
from ucolor.training.features import FeatureExtractor
from ucolor.training.losses import loss_terms
from ucolor.training.optim import AdamState, adam_step
from ucolor.training.sampling import ImagePair, PatchPair, check_pairs, sample_patches

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["step", "recon", "perceptual", "total"]

Checkpoint = Callable[[int, ModelWeights], None]


@dataclass
class TrainResult:
    """Final weights and the per-step loss trace (losses before each update)."""

    weights: ModelWeights
    trace: pd.DataFrame

    @property
    def final_loss(self) -> Optional[float]:
        if self.trace.empty:
            return None
        return float(self.trace["total"].iloc[-1])


def empty_trace() -> pd.DataFrame:
    dtypes = {column: "float64" for column in TRACE_COLUMNS}
    dtypes["step"] = "int64"
    return pd.DataFrame(columns=TRACE_COLUMNS).astype(dtypes)


def write_trace(trace: pd.DataFrame, path: str | os.PathLike[str]) -> Path:
    """Write the trace as CSV lines ``step,recon,perceptual,total``."""
    return atomic_write_text(path, trace.to_csv(index=False, columns=TRACE_COLUMNS))


def batch_loss(
    batch: Sequence[PatchPair],
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    params: dict[str, Tensor],
    fx: Optional[FeatureExtractor],
) -> tuple[Tensor, Tensor, Optional[Tensor]]:
    """Mean of the per-patch total, reconstruction and perceptual losses."""
    totals, recons, perceptuals = [], [], []
    for pair in batch:
        pred = forward_tensor(prepare_inputs(pair.input, model_cfg), model_cfg, params)
        terms = loss_terms(pred, pair.reference, train_cfg, fx)
        totals.append(terms.total)
        recons.append(terms.recon)
        if terms.perceptual is not None:
            perceptuals.append(terms.perceptual)

    def _mean(values: list[Tensor]) -> Tensor:
        acc = values[0]
        for value in values[1:]:
            acc = acc + value
        return scale(acc, 1.0 / len(values))

    perceptual = _mean(perceptuals) if perceptuals else None
    return _mean(totals), _mean(recons), perceptual


def train(
    dataset: DatasetManifest | Sequence[ImagePair],
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    *,
    initial: Optional[ModelWeights] = None,
    checkpoint: Optional[Checkpoint] = None,
) -> TrainResult:
    """Optimize the network on ``dataset`` for ``train_cfg.steps`` steps.

    Parameters
    ----------
    dataset : DatasetManifest or sequence of (input, reference) images
        Paired training data; every image must be at least one patch in size.
    model_cfg : ModelConfig
        Architecture to train.
    train_cfg : TrainConfig
        Optimizer, sampling and loss settings; ``seed`` drives initialization
        and patch sampling.
    initial : ModelWeights, optional
        Starting weights; drawn from ``train_cfg.seed`` when omitted.
    checkpoint : callable, optional
        Called as ``checkpoint(step, weights)`` every
        ``train_cfg.checkpoint_every`` steps.

    Returns
    -------
    TrainResult

    Raises
    ------
    NumericError
        If a step produces a non-finite loss or gradient.
    """
    pairs = dataset.load_pairs() if isinstance(dataset, DatasetManifest) else list(dataset)
    check_pairs(pairs, train_cfg.patch)
    weights = initial.copy() if initial is not None else ModelWeights.initialize(model_cfg, train_cfg.seed)
    if train_cfg.steps == 0:
        return TrainResult(weights, empty_trace())

    rng = np.random.default_rng(train_cfg.seed)
    fx = FeatureExtractor(seed=train_cfg.feature_seed) if train_cfg.use_perceptual else None
    state = AdamState()
    params = dict(weights.params)
    rows = []
    logger.info(
        "training %d steps: batch=%d patch=%d lr=%g recon=%s perceptual=%s",
        train_cfg.steps,
        train_cfg.batch_size,
        train_cfg.patch,
        train_cfg.learning_rate,
        train_cfg.recon_loss,
        train_cfg.use_perceptual,
    )
    for step in range(1, train_cfg.steps + 1):
        batch = sample_patches(pairs, train_cfg, rng)
        tape = Tape()
        leaves = {name: tape.watch(value, name=name) for name, value in params.items()}
        total, recon, perceptual = batch_loss(batch, model_cfg, train_cfg, leaves, fx)
        row = (
            step,
            recon.item(),
            0.0 if perceptual is None else perceptual.item(),
            total.item(),
        )
        if not np.isfinite(row[3]):
            raise NumericError(f"non-finite training loss {row[3]}", step=step)
        by_node = tape.backward(total)
        grads = {name: by_node[leaf.node_id] for name, leaf in leaves.items()}
        if not all(np.all(np.isfinite(grad)) for grad in grads.values()):
            raise NumericError("non-finite gradient", step=step)
        params, state = adam_step(
            params,
            grads,
            state,
            train_cfg.learning_rate,
            train_cfg.beta1,
            train_cfg.beta2,
            train_cfg.epsilon,
        )
        rows.append(row)
        logger.debug("step %d recon=%.6g perceptual=%.6g total=%.6g", *row)
        if step % train_cfg.log_every == 0 or step == train_cfg.steps:
            logger.info("step %d/%d total loss %.6g", step, train_cfg.steps, row[3])
        if checkpoint is not None and train_cfg.checkpoint_every and step % train_cfg.checkpoint_every == 0:
            checkpoint(step, ModelWeights(model_cfg, params))

    trace = pd.DataFrame(rows, columns=TRACE_COLUMNS)
    return TrainResult(ModelWeights(model_cfg, params), trace)
