"""The enhancement network: configuration, parameters, blocks and forward pass."""

from .blocks import (
    attention_weights,
    channel_attention,
    mt_guidance,
    residual_enhancement_module,
)
from .config import ModelConfig
from .ucolor_net import (
    NetworkInputs,
    decode,
    encode,
    forward,
    forward_tensor,
    prepare_inputs,
)
from .weights import ModelWeights, first_mismatch, parameter_count, parameter_shapes

__all__ = [
    "ModelConfig",
    "ModelWeights",
    "NetworkInputs",
    "attention_weights",
    "channel_attention",
    "decode",
    "encode",
    "first_mismatch",
    "forward",
    "forward_tensor",
    "mt_guidance",
    "parameter_count",
    "parameter_shapes",
    "prepare_inputs",
    "residual_enhancement_module",
]
