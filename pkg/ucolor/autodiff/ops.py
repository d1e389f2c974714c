"""Differentiable primitives needed by the enhancement network.

Every op accepts :class:`Tensor` inputs (or plain arrays, treated as
constants), computes its forward value with NumPy and, when any input is
recorded on a tape, records a closure that maps the upstream gradient to the
gradient of each input.
"""

from __future__ import annotations

from typing import Literal, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike
from scipy.special import expit

from ucolor.autodiff.tape import Tape, Tensor
from ucolor.errors import ShapeError

DEFAULT_LEAKY_SLOPE = 0.2

ActivationKind = Literal["leaky_relu", "relu", "sigmoid"]
ElementwiseKind = Literal["add", "sub", "mul"]


def _as_tensor(value: Tensor | ArrayLike | float) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


def _common_tape(tensors: Sequence[Tensor]) -> Optional[Tape]:
    tape: Optional[Tape] = None
    for tensor in tensors:
        if tensor.tape is None:
            continue
        if tape is None:
            tape = tensor.tape
        elif tensor.tape is not tape:
            raise ShapeError("inputs are recorded on different tapes", axis="tape")
    return tape


def _emit(op: str, inputs: Sequence[Tensor], data: np.ndarray, backward) -> Tensor:
    tape = _common_tape(inputs)
    if tape is None:
        return Tensor(data)
    return tape.record(op, inputs, data, backward)


def _require_rank(tensor: Tensor, rank: int, op: str, what: str) -> None:
    if tensor.ndim != rank:
        raise ShapeError(f"{op}: {what} must have rank {rank}; got shape {tensor.shape}", axis="rank")


# --------------------------------------------------------------------------- convolution


def _im2col3x3(x: np.ndarray) -> np.ndarray:
    """Return the (H*W, C*9) matrix of zero-padded 3×3 neighbourhoods."""
    channels, height, width = x.shape
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1)))
    windows = sliding_window_view(padded, (3, 3), axis=(1, 2))
    return windows.transpose(1, 2, 0, 3, 4).reshape(height * width, channels * 9)


def conv2d(input: Tensor | ArrayLike, kernel: Tensor | ArrayLike, bias: Tensor | ArrayLike) -> Tensor:
    """3×3, stride-1 convolution with zero "same" padding.

    Parameters
    ----------
    input : Tensor
        Feature map of shape ``(Cin, H, W)``.
    kernel : Tensor
        Filters of shape ``(Cout, Cin, 3, 3)``.
    bias : Tensor
        Per-filter offsets of shape ``(Cout,)``.

    Returns
    -------
    Tensor
        Feature map of shape ``(Cout, H, W)``.
    """
    x, k, b = _as_tensor(input), _as_tensor(kernel), _as_tensor(bias)
    _require_rank(x, 3, "conv2d", "input")
    _require_rank(k, 4, "conv2d", "kernel")
    cin, height, width = x.shape
    cout = k.shape[0]
    if k.shape[2:] != (3, 3):
        raise ShapeError(f"conv2d: kernel must be 3×3; got {k.shape[2:]}", axis="kernel spatial")
    if k.shape[1] != cin:
        raise ShapeError(
            f"conv2d: kernel expects {k.shape[1]} input channels, input has {cin}",
            axis="input channel",
        )
    if b.shape != (cout,):
        raise ShapeError(
            f"conv2d: bias shape {b.shape} does not match {cout} filters", axis="output channel"
        )

    cols = _im2col3x3(x.data)
    weights = k.data.reshape(cout, cin * 9)
    out = (cols @ weights.T).T.reshape(cout, height, width) + b.data[:, None, None]

    def backward(grad: np.ndarray):
        grad_flat = grad.reshape(cout, height * width)
        grad_kernel = (grad_flat @ cols).reshape(k.shape)
        grad_bias = grad.sum(axis=(1, 2))
        flipped = k.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3).reshape(cin, cout * 9)
        grad_input = (_im2col3x3(grad) @ flipped.T).T.reshape(cin, height, width)
        return grad_input, grad_kernel, grad_bias

    return _emit("conv2d", (x, k, b), out, backward)


# --------------------------------------------------------------------------- resampling


def _pool_windows(x: np.ndarray) -> tuple[np.ndarray, int, int]:
    channels, height, width = x.shape
    out_h, out_w = -(-height // 2), -(-width // 2)
    padded = np.full((channels, out_h * 2, out_w * 2), -np.inf)
    padded[:, :height, :width] = x
    windows = padded.reshape(channels, out_h, 2, out_w, 2).transpose(0, 1, 3, 2, 4)
    return windows.reshape(channels, out_h, out_w, 4), out_h, out_w


def max_pool2_array(x: ArrayLike) -> np.ndarray:
    """Forward-only 2×2/stride-2 max pooling of a ``(C, H, W)`` or ``(H, W)`` array."""
    array = np.asarray(x, dtype=np.float64)
    if array.ndim == 2:
        return max_pool2_array(array[None])[0]
    windows, _, _ = _pool_windows(array)
    return windows.max(axis=-1)


def max_pool2(input: Tensor | ArrayLike) -> Tensor:
    """2×2 max pooling with stride 2; odd trailing rows/columns use truncated windows.

    The gradient of each window goes to its first row-major argmax.
    """
    x = _as_tensor(input)
    _require_rank(x, 3, "max_pool2", "input")
    channels, height, width = x.shape
    windows, out_h, out_w = _pool_windows(x.data)
    argmax = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, argmax[..., None], axis=-1)[..., 0]

    def backward(grad: np.ndarray):
        scattered = np.zeros((channels, out_h, out_w, 4))
        np.put_along_axis(scattered, argmax[..., None], grad[..., None], axis=-1)
        full = scattered.reshape(channels, out_h, out_w, 2, 2).transpose(0, 1, 3, 2, 4)
        full = full.reshape(channels, out_h * 2, out_w * 2)
        return (full[:, :height, :width],)

    return _emit("max_pool2", (x,), out, backward)


def _interp_matrix(size: int) -> np.ndarray:
    """Rows map 2·size output samples onto ``size`` inputs (half-pixel centres)."""
    matrix = np.zeros((2 * size, size))
    dst = np.arange(2 * size, dtype=np.float64)
    src = np.clip((dst + 0.5) / 2.0 - 0.5, 0.0, size - 1)
    lower = np.floor(src).astype(int)
    upper = np.minimum(lower + 1, size - 1)
    frac = src - lower
    rows = np.arange(2 * size)
    np.add.at(matrix, (rows, lower), 1.0 - frac)
    np.add.at(matrix, (rows, upper), frac)
    return matrix


def upsample_bilinear2(input: Tensor | ArrayLike) -> Tensor:
    """Bilinear 2× upsampling with ``x_src = (x_dst + 0.5) / 2 - 0.5`` clamped to the grid."""
    x = _as_tensor(input)
    _require_rank(x, 3, "upsample_bilinear2", "input")
    _, height, width = x.shape
    rows = _interp_matrix(height)
    cols = _interp_matrix(width)
    out = np.einsum("yh,chw,xw->cyx", rows, x.data, cols, optimize=True)

    def backward(grad: np.ndarray):
        return (np.einsum("yh,cyx,xw->chw", rows, grad, cols, optimize=True),)

    return _emit("upsample_bilinear2", (x,), out, backward)


# --------------------------------------------------------------------------- pointwise


def activation(
    input: Tensor | ArrayLike,
    kind: ActivationKind,
    *,
    slope: float = DEFAULT_LEAKY_SLOPE,
) -> Tensor:
    """Elementwise ``leaky_relu``, ``relu`` or ``sigmoid``.

    The (leaky) rectifiers use subgradient 1 at zero.
    """
    x = _as_tensor(input)
    data = x.data
    if kind == "leaky_relu":
        positive = data >= 0.0
        out = np.where(positive, data, slope * data)
        local = np.where(positive, 1.0, slope)
    elif kind == "relu":
        positive = data >= 0.0
        out = np.where(positive, data, 0.0)
        local = positive.astype(np.float64)
    elif kind == "sigmoid":
        out = expit(data)
        local = out * (1.0 - out)
    else:
        raise ValueError(f"unknown activation kind '{kind}'")

    def backward(grad: np.ndarray):
        return (grad * local,)

    return _emit(kind, (x,), out, backward)


def leaky_relu(input: Tensor | ArrayLike, slope: float = DEFAULT_LEAKY_SLOPE) -> Tensor:
    return activation(input, "leaky_relu", slope=slope)


def relu(input: Tensor | ArrayLike) -> Tensor:
    return activation(input, "relu")


def sigmoid(input: Tensor | ArrayLike) -> Tensor:
    return activation(input, "sigmoid")


def _broadcast_shape(a_shape: tuple[int, ...], b_shape: tuple[int, ...], op: str) -> tuple[int, ...]:
    """Shape ``b`` must take to broadcast against ``a``."""
    if b_shape == a_shape:
        return b_shape
    if int(np.prod(b_shape)) == 1:
        return (1,) * len(a_shape)
    if len(a_shape) == 3:
        channels, height, width = a_shape
        if b_shape == (channels,):
            return (channels, 1, 1)
        if b_shape in {(height, width), (1, height, width)}:
            return (1, height, width)
    raise ShapeError(f"{op}: shape {b_shape} does not broadcast over {a_shape}", axis="broadcast")


def elementwise(
    a: Tensor | ArrayLike,
    b: Tensor | ArrayLike | float,
    kind: ElementwiseKind,
) -> Tensor:
    """Pixel-wise ``add``/``sub``/``mul`` with ``b`` broadcast over ``a``.

    ``b`` may match ``a`` exactly, be a scalar, a per-channel vector ``(C,)``
    or a per-pixel map ``(H, W)``.
    """
    x, y = _as_tensor(a), _as_tensor(b)
    view = _broadcast_shape(x.shape, y.shape, kind)
    y_view = y.data.reshape(view)
    reduce_axes = tuple(axis for axis, extent in enumerate(view) if extent == 1 and x.shape[axis] != 1)

    def _reduce(grad: np.ndarray) -> np.ndarray:
        if reduce_axes:
            grad = grad.sum(axis=reduce_axes, keepdims=True)
        return grad.reshape(y.shape)

    if kind == "add":
        out = x.data + y_view

        def backward(grad: np.ndarray):
            return grad, _reduce(grad)

    elif kind == "sub":
        out = x.data - y_view

        def backward(grad: np.ndarray):
            return grad, _reduce(-grad)

    elif kind == "mul":
        out = x.data * y_view

        def backward(grad: np.ndarray):
            return grad * y_view, _reduce(grad * x.data)

    else:
        raise ValueError(f"unknown elementwise kind '{kind}'")
    return _emit(kind, (x, y), out, backward)


def add(a, b) -> Tensor:
    return elementwise(a, b, "add")


def sub(a, b) -> Tensor:
    return elementwise(a, b, "sub")


def mul(a, b) -> Tensor:
    return elementwise(a, b, "mul")


def scale(input: Tensor | ArrayLike, factor: float) -> Tensor:
    """Multiply by a constant."""
    x = _as_tensor(input)
    factor = float(factor)

    def backward(grad: np.ndarray):
        return (grad * factor,)

    return _emit("scale", (x,), x.data * factor, backward)


def square(input: Tensor | ArrayLike) -> Tensor:
    x = _as_tensor(input)

    def backward(grad: np.ndarray):
        return (2.0 * x.data * grad,)

    return _emit("square", (x,), x.data * x.data, backward)


def absolute(input: Tensor | ArrayLike) -> Tensor:
    """Elementwise ``|x|``; the subgradient at 0 is 0."""
    x = _as_tensor(input)
    sign = np.sign(x.data)

    def backward(grad: np.ndarray):
        return (grad * sign,)

    return _emit("absolute", (x,), np.abs(x.data), backward)


def clamp01(input: Tensor | ArrayLike) -> Tensor:
    """Clamp to [0, 1]; gradient passes where the input already lies in range."""
    x = _as_tensor(input)
    inside = ((x.data >= 0.0) & (x.data <= 1.0)).astype(np.float64)

    def backward(grad: np.ndarray):
        return (grad * inside,)

    return _emit("clamp01", (x,), np.clip(x.data, 0.0, 1.0), backward)


# --------------------------------------------------------------------------- reductions


def reduce_sum(input: Tensor | ArrayLike) -> Tensor:
    x = _as_tensor(input)

    def backward(grad: np.ndarray):
        return (np.broadcast_to(grad, x.shape).copy(),)

    return _emit("sum", (x,), np.asarray(x.data.sum()), backward)


def reduce_mean(input: Tensor | ArrayLike) -> Tensor:
    x = _as_tensor(input)
    count = float(x.size)

    def backward(grad: np.ndarray):
        return (np.full(x.shape, float(grad) / count),)

    return _emit("mean", (x,), np.asarray(x.data.sum() / count), backward)


def global_avg_pool(input: Tensor | ArrayLike) -> Tensor:
    """Per-channel spatial mean of an ``(N, H, W)`` map, returned as ``(N,)``."""
    x = _as_tensor(input)
    _require_rank(x, 3, "global_avg_pool", "input")
    _, height, width = x.shape
    area = float(height * width)
    out = x.data.sum(axis=(1, 2)) / area

    def backward(grad: np.ndarray):
        return (np.broadcast_to(grad[:, None, None] / area, x.shape).copy(),)

    return _emit("global_avg_pool", (x,), out, backward)


def fully_connected(
    input: Tensor | ArrayLike,
    weight: Tensor | ArrayLike,
    bias: Tensor | ArrayLike,
) -> Tensor:
    """Affine map ``weight @ input + bias`` for a vector input."""
    x, w, b = _as_tensor(input), _as_tensor(weight), _as_tensor(bias)
    _require_rank(x, 1, "fully_connected", "input")
    _require_rank(w, 2, "fully_connected", "weight")
    if w.shape[1] != x.shape[0]:
        raise ShapeError(
            f"fully_connected: weight expects {w.shape[1]} inputs, got {x.shape[0]}", axis="input"
        )
    if b.shape != (w.shape[0],):
        raise ShapeError(
            f"fully_connected: bias shape {b.shape} does not match {w.shape[0]} outputs",
            axis="output",
        )
    out = w.data @ x.data + b.data

    def backward(grad: np.ndarray):
        return w.data.T @ grad, np.outer(grad, x.data), grad.copy()

    return _emit("fully_connected", (x, w, b), out, backward)


# --------------------------------------------------------------------------- channel plumbing


def concat_channels(inputs: Sequence[Tensor | ArrayLike]) -> Tensor:
    """Concatenate ``(Ci, H, W)`` maps along the channel axis, preserving order."""
    tensors = [_as_tensor(t) for t in inputs]
    if not tensors:
        raise ShapeError("concat_channels needs at least one input", axis="channel")
    for tensor in tensors:
        _require_rank(tensor, 3, "concat_channels", "input")
    spatial = tensors[0].shape[1:]
    for index, tensor in enumerate(tensors[1:], start=1):
        if tensor.shape[1] != spatial[0]:
            raise ShapeError(
                f"concat_channels: input {index} height {tensor.shape[1]} != {spatial[0]}",
                axis="height",
            )
        if tensor.shape[2] != spatial[1]:
            raise ShapeError(
                f"concat_channels: input {index} width {tensor.shape[2]} != {spatial[1]}",
                axis="width",
            )
    sizes = [tensor.shape[0] for tensor in tensors]
    bounds = np.cumsum(sizes)[:-1]
    out = np.concatenate([tensor.data for tensor in tensors], axis=0)

    def backward(grad: np.ndarray):
        return tuple(np.split(grad, bounds, axis=0))

    return _emit("concat_channels", tensors, out, backward)


def channel_slice(input: Tensor | ArrayLike, start: int, stop: int) -> Tensor:
    """Channels ``start:stop`` of a ``(C, H, W)`` map."""
    x = _as_tensor(input)
    _require_rank(x, 3, "channel_slice", "input")
    if not 0 <= start < stop <= x.shape[0]:
        raise ShapeError(f"channel_slice [{start}:{stop}] outside {x.shape[0]} channels", axis="channel")

    def backward(grad: np.ndarray):
        full = np.zeros(x.shape)
        full[start:stop] = grad
        return (full,)

    return _emit("channel_slice", (x,), x.data[start:stop].copy(), backward)


def split_channels(input: Tensor | ArrayLike, sizes: Sequence[int]) -> list[Tensor]:
    """Inverse of :func:`concat_channels` for the given channel counts."""
    x = _as_tensor(input)
    if sum(sizes) != x.shape[0]:
        raise ShapeError(f"split sizes {list(sizes)} do not sum to {x.shape[0]} channels", axis="channel")
    pieces, start = [], 0
    for size in sizes:
        pieces.append(channel_slice(x, start, start + size))
        start += size
    return pieces


def detach(input: Tensor) -> Tensor:
    """Return a constant copy that blocks gradient flow."""
    return Tensor(np.array(input.data, copy=True))
