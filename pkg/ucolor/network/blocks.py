"""Building blocks: residual enhancement, channel attention, transmission guidance."""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np
from numpy.typing import ArrayLike

from ucolor.autodiff import (
    DEFAULT_LEAKY_SLOPE,
    Tensor,
    add,
    conv2d,
    fully_connected,
    global_avg_pool,
    leaky_relu,
    mul,
    relu,
    sigmoid,
)
from ucolor.errors import ShapeError
from ucolor.models import TransmissionMap

Params = Mapping[str, Tensor]


def conv(x: Tensor, params: Params, prefix: str) -> Tensor:
    return conv2d(x, params[f"{prefix}.kernel"], params[f"{prefix}.bias"])


def conv_lrelu(x: Tensor, params: Params, prefix: str, slope: float = DEFAULT_LEAKY_SLOPE) -> Tensor:
    return leaky_relu(conv(x, params, prefix), slope)


def _residual_block(x: Tensor, params: Params, prefix: str, slope: float) -> Tensor:
    h = conv_lrelu(x, params, f"{prefix}.c1", slope)
    h = conv_lrelu(h, params, f"{prefix}.c2", slope)
    return add(conv(h, params, f"{prefix}.c3"), x)


def residual_enhancement_module(
    x: Tensor,
    params: Params,
    prefix: str,
    slope: float = DEFAULT_LEAKY_SLOPE,
) -> Tensor:
    """Two residual blocks of conv→lrelu→conv→lrelu→conv, each with an identity add.

    Parameters
    ----------
    x : Tensor
        Features of shape ``(C, H, W)``.
    params : Mapping[str, Tensor]
        Must hold ``{prefix}.rem.b{1,2}.c{1,2,3}.kernel`` and ``.bias`` with
        ``C`` filters each.
    prefix : str
        Parameter-name prefix of the owning stage.
    slope : float, optional
        Leaky ReLU negative slope.

    Returns
    -------
    Tensor
        ``block2(y) + y`` where ``y = block1(x) + x``.
    """
    kernel = params[f"{prefix}.rem.b1.c1.kernel"]
    if kernel.shape[0] != x.shape[0]:
        raise ShapeError(
            f"{prefix}: residual module has {kernel.shape[0]} filters but input has {x.shape[0]} channels",
            axis="channel",
        )
    y = _residual_block(x, params, f"{prefix}.rem.b1", slope)
    return _residual_block(y, params, f"{prefix}.rem.b2", slope)


def attention_weights(f: Tensor, w1: Tensor, b1: Tensor, w2: Tensor, b2: Tensor) -> Tensor:
    """Per-channel gate ``s = sigmoid(W2 relu(W1 z + b1) + b2)`` with ``z`` the pooled features."""
    z = global_avg_pool(f)
    return sigmoid(fully_connected(relu(fully_connected(z, w1, b1)), w2, b2))


def channel_attention(
    f: Tensor,
    w1: Tensor,
    b1: Tensor,
    w2: Tensor,
    b2: Tensor,
    *,
    gate: Optional[ArrayLike] = None,
) -> Tensor:
    """Recalibrate channels: ``U = F + F * s`` with ``s`` broadcast over space.

    ``gate`` replaces the computed ``s`` with a fixed per-channel value, which
    exposes the identity branch (``gate=0`` gives ``U = F``).
    """
    channels = f.shape[0]
    hidden = w1.shape[0]
    if hidden == 0 or channels % hidden or w1.shape[1] != channels:
        raise ShapeError(
            f"attention bottleneck {w1.shape} does not reduce {channels} channels evenly",
            axis="channel",
        )
    if gate is None:
        s = attention_weights(f, w1, b1, w2, b2)
    else:
        s = Tensor(np.broadcast_to(np.asarray(gate, dtype=np.float64), (channels,)).copy())
    return add(f, mul(f, s))


def mt_guidance(u: Tensor, t_bar: TransmissionMap | Tensor | ArrayLike) -> Tensor:
    """Weight spatial positions by the reverse transmission: ``V = U + U * T̄``."""
    if isinstance(t_bar, TransmissionMap):
        t_bar = t_bar.values
    weights = t_bar if isinstance(t_bar, Tensor) else Tensor(np.asarray(t_bar, dtype=np.float64))
    if weights.shape[-2:] != u.shape[1:]:
        raise ShapeError(
            f"reverse transmission {weights.shape} does not match features {u.shape[1:]}",
            axis="spatial",
        )
    return add(u, mul(u, weights))
