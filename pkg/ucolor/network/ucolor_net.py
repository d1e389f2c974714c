"""Multi-color-space encoder, transmission-guided decoder and the end-to-end forward pass."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ucolor.autodiff import (
    Tensor,
    clamp01,
    concat_channels,
    max_pool2,
    upsample_bilinear2,
)
from ucolor.colorspace import to_network_input
from ucolor.errors import ShapeError, WeightsFormatError
from ucolor.models import BackgroundLight, ColorSpace, Image, TransmissionMap
from ucolor.network.blocks import (
    channel_attention,
    conv,
    conv_lrelu,
    mt_guidance,
    residual_enhancement_module,
)
from ucolor.network.config import ModelConfig
from ucolor.network.weights import ModelWeights, first_mismatch, parameter_shapes
from ucolor.physics import estimate_background_light, get_prior, reverse_transmission, rmt_pyramid

Params = Mapping[str, Tensor]

SIZE_MULTIPLE = 4


@dataclass
class NetworkInputs:
    """Constant inputs of one forward pass, in channels × height × width layout."""

    rgb: np.ndarray
    hsv: np.ndarray
    lab: np.ndarray
    pyramid: Optional[list[np.ndarray]] = None
    light: Optional[BackgroundLight] = None
    transmission: Optional[TransmissionMap] = None

    @property
    def spatial(self) -> tuple[int, int]:
        return (int(self.rgb.shape[1]), int(self.rgb.shape[2]))


def check_size(height: int, width: int) -> None:
    if height % SIZE_MULTIPLE or width % SIZE_MULTIPLE:
        raise ShapeError(
            f"network input {height}×{width} must be divisible by {SIZE_MULTIPLE}",
            axis="spatial",
        )


def prepare_inputs(img: Image, cfg: ModelConfig) -> NetworkInputs:
    """Color renditions and, when guidance is on, the reverse-transmission pyramid."""
    if img.space is not ColorSpace.RGB:
        raise ShapeError(f"forward expects an RGB image; got {img.space.value}", axis="channel")
    check_size(img.height, img.width)
    rgb, hsv, lab = to_network_input(img)
    rgb_chw = rgb.to_chw()
    if cfg.triplicate_rgb:
        hsv_chw, lab_chw = rgb_chw, rgb_chw
    else:
        hsv_chw, lab_chw = hsv.to_chw(), lab.to_chw()
    inputs = NetworkInputs(rgb_chw, hsv_chw, lab_chw)
    if cfg.use_mtgm:
        light = estimate_background_light(img)
        transmission = get_prior(cfg.prior).estimate(img, light, cfg.prior_patch)
        levels = rmt_pyramid(reverse_transmission(transmission), cfg.levels)
        inputs.pyramid = [level.values for level in levels]
        inputs.light = light
        inputs.transmission = transmission
    return inputs


def encode(inputs: NetworkInputs, cfg: ModelConfig, params: Params) -> list[Tensor]:
    """Run the encoder paths and return the concatenated features of every level.

    Level ``k`` has ``len(cfg.paths) * width_k`` channels: the fused RGB
    features followed by the HSV and Lab features of the same stage.
    """
    check_size(*inputs.spatial)
    sources = {"rgb": inputs.rgb, "hsv": inputs.hsv, "lab": inputs.lab}
    slope = cfg.leaky_slope
    current = {path: Tensor(sources[path]) for path in cfg.paths}
    features: list[Tensor] = []
    for index in range(1, cfg.levels + 1):
        if index > 1:
            current = {path: max_pool2(tensor) for path, tensor in current.items()}
        stage = {}
        for path in cfg.paths:
            entry = conv_lrelu(current[path], params, f"enc.{path}.{index}.entry", slope)
            stage[path] = residual_enhancement_module(entry, params, f"enc.{path}.{index}", slope)
        if cfg.fused:
            dense = concat_channels([stage[path] for path in cfg.paths])
            stage["rgb"] = conv_lrelu(dense, params, f"enc.fuse.{index}", slope)
        features.append(concat_channels([stage[path] for path in cfg.paths]))
        current = stage
    return features


def _check_pyramid(features: Sequence[Tensor], pyramid: Optional[Sequence[np.ndarray]], cfg) -> None:
    if len(features) != cfg.levels:
        raise ShapeError(f"decoder needs {cfg.levels} feature levels; got {len(features)}", axis="level")
    if not cfg.use_mtgm:
        return
    if pyramid is None or len(pyramid) != cfg.levels:
        found = 0 if pyramid is None else len(pyramid)
        raise ShapeError(f"decoder needs {cfg.levels} RMT levels; got {found}", axis="level")
    for index, (feature, level) in enumerate(zip(features, pyramid), start=1):
        if tuple(np.shape(level)) != feature.shape[1:]:
            raise ShapeError(
                f"RMT level {index} is {np.shape(level)} but features are {feature.shape[1:]}",
                axis="spatial",
            )


def decode(
    features: Sequence[Tensor],
    pyramid: Optional[Sequence[np.ndarray]],
    cfg: ModelConfig,
    params: Params,
) -> Tensor:
    """Coarse-to-fine decoder returning the reconstructed ``(3, H, W)`` image in [0, 1].

    Each level applies channel attention, transmission guidance, a merge conv
    over the attended features and the upsampled coarser output, then a
    residual-enhancement module.
    """
    _check_pyramid(features, pyramid, cfg)
    slope = cfg.leaky_slope
    decoded: Optional[Tensor] = None
    for index in range(cfg.levels, 0, -1):
        gated = features[index - 1]
        if cfg.use_cam:
            prefix = f"dec.{index}.cam"
            gated = channel_attention(
                gated,
                params[f"{prefix}.fc1.weight"],
                params[f"{prefix}.fc1.bias"],
                params[f"{prefix}.fc2.weight"],
                params[f"{prefix}.fc2.bias"],
            )
        if cfg.use_mtgm:
            gated = mt_guidance(gated, pyramid[index - 1])
        if decoded is not None:
            gated = concat_channels([gated, upsample_bilinear2(decoded)])
        merged = conv_lrelu(gated, params, f"dec.{index}.merge", slope)
        decoded = residual_enhancement_module(merged, params, f"dec.{index}", slope)
    return clamp01(conv(decoded, params, "dec.out"))


def forward_tensor(inputs: NetworkInputs, cfg: ModelConfig, params: Params) -> Tensor:
    return decode(encode(inputs, cfg, params), inputs.pyramid, cfg, params)


def _check_weights(cfg: ModelConfig, weights: ModelWeights) -> None:
    problem = first_mismatch(parameter_shapes(cfg), weights.shapes())
    if problem is not None:
        raise WeightsFormatError(f"weights incompatible with model config: {problem}")


def forward(img: Image, cfg: ModelConfig, weights: ModelWeights) -> Image:
    """Enhance ``img`` end to end.

    Parameters
    ----------
    img : Image
        RGB input whose height and width are multiples of 4.
    cfg : ModelConfig
        Architecture and ablation switches.
    weights : ModelWeights
        Parameters matching ``cfg``.

    Returns
    -------
    Image
        Enhanced RGB image of the same size, values in [0, 1].
    """
    _check_weights(cfg, weights)
    inputs = prepare_inputs(img, cfg)
    out = forward_tensor(inputs, cfg, weights.constants())
    return Image.from_chw(out.numpy())
