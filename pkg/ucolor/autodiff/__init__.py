"""Reverse-mode automatic differentiation over dense float64 tensors."""

from .ops import (
    DEFAULT_LEAKY_SLOPE,
    absolute,
    activation,
    add,
    channel_slice,
    clamp01,
    concat_channels,
    conv2d,
    detach,
    elementwise,
    fully_connected,
    global_avg_pool,
    leaky_relu,
    max_pool2,
    max_pool2_array,
    mul,
    reduce_mean,
    reduce_sum,
    relu,
    scale,
    sigmoid,
    split_channels,
    square,
    sub,
    upsample_bilinear2,
)
from .tape import Tape, Tensor, constant, numerical_gradient

__all__ = [
    "DEFAULT_LEAKY_SLOPE",
    "Tape",
    "Tensor",
    "constant",
    "numerical_gradient",
    "absolute",
    "activation",
    "add",
    "channel_slice",
    "clamp01",
    "concat_channels",
    "conv2d",
    "detach",
    "elementwise",
    "fully_connected",
    "global_avg_pool",
    "leaky_relu",
    "max_pool2",
    "max_pool2_array",
    "mul",
    "reduce_mean",
    "reduce_sum",
    "relu",
    "scale",
    "sigmoid",
    "split_channels",
    "square",
    "sub",
    "upsample_bilinear2",
]
