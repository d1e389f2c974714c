"""Image file IO: binary netpbm (P6 color, P5 gray) by hand, PNG through Pillow.

8-bit samples map to [0, 1] by ``v / 255``; writing inverts with
``round(v * 255)`` after clamping, so a PPM write→read round trip is exact
at 8 bits.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from ucolor.errors import ImageFormatError
from ucolor.io.files import atomic_write_bytes
from ucolor.models import Image

MAXVAL = 255
NETPBM_SUFFIXES = {".ppm", ".pgm", ".pnm"}
PNG_SUFFIXES = {".png"}
SUPPORTED_SUFFIXES = NETPBM_SUFFIXES | PNG_SUFFIXES
_PNG_MODES = {"RGB", "RGBA", "L", "LA", "P"}
_WHITESPACE = b" \t\n\r\x0b\x0c"


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] floats to 8-bit samples."""
    return np.round(np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0) * MAXVAL).astype(np.uint8)


def from_uint8(values: np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=np.float64) / MAXVAL


# --------------------------------------------------------------------------- netpbm


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Return ``count`` header tokens and the offset of the payload."""
    tokens: list[bytes] = []
    pos = 0
    size = len(data)
    while len(tokens) < count:
        while pos < size and data[pos] in _WHITESPACE:
            pos += 1
        if pos < size and data[pos : pos + 1] == b"#":
            while pos < size and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < size and data[pos] not in _WHITESPACE and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError(
                f"malformed netpbm header: expected {count} fields, found {len(tokens)}"
            )
        tokens.append(data[start:pos])
    if pos >= size or data[pos] not in _WHITESPACE:
        raise ImageFormatError("malformed netpbm header: missing whitespace before the payload")
    return tokens, pos + 1


def decode_netpbm(data: bytes) -> Image:
    """Decode a binary P6 (RGB) or P5 (gray, replicated to RGB) image."""
    magic = data[:2]
    if magic not in (b"P6", b"P5"):
        raise ImageFormatError(f"malformed netpbm header: unsupported magic {magic!r}")
    tokens, offset = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"malformed netpbm header: non-integer field in {tokens[1:]}") from exc
    if width < 1 or height < 1:
        raise ImageFormatError(f"malformed netpbm header: invalid size {width}×{height}")
    if maxval != MAXVAL:
        raise ImageFormatError(f"unsupported netpbm maxval {maxval} (only {MAXVAL} is supported)")
    channels = 3 if magic == b"P6" else 1
    expected = width * height * channels
    payload = data[offset : offset + expected]
    if len(payload) < expected:
        raise ImageFormatError(
            f"truncated netpbm payload: expected {expected} bytes, got {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    if channels == 1:
        samples = np.repeat(samples, 3, axis=2)
    return Image(from_uint8(samples))


def encode_ppm(img: Image) -> bytes:
    samples = to_uint8(img.pixels)
    header = f"P6\n{img.width} {img.height}\n{MAXVAL}\n".encode("ascii")
    return header + samples.tobytes()


def encode_pgm(samples: np.ndarray) -> bytes:
    height, width = samples.shape
    return f"P5\n{width} {height}\n{MAXVAL}\n".encode("ascii") + samples.tobytes()


# --------------------------------------------------------------------------- PNG


def decode_png(data: bytes) -> Image:
    try:
        with PILImage.open(io.BytesIO(data)) as handle:
            if handle.mode not in _PNG_MODES:
                raise ImageFormatError(f"unsupported PNG mode {handle.mode!r}; expected 8-bit RGB")
            rgb = np.asarray(handle.convert("RGB"), dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageFormatError("malformed PNG: not a recognizable image") from exc
    except OSError as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise ImageFormatError(f"malformed PNG: {exc}") from exc
    return Image(from_uint8(rgb))


def encode_png(samples: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    PILImage.fromarray(np.ascontiguousarray(samples, dtype=np.uint8)).save(buffer, format="PNG")
    return buffer.getvalue()


# --------------------------------------------------------------------------- public API


def _suffix(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ImageFormatError(
            f"unsupported image extension '{path.suffix}' for {path} "
            f"(supported: {', '.join(sorted(SUPPORTED_SUFFIXES))})"
        )
    return suffix


def image_read(path: str | os.PathLike[str]) -> Image:
    """Read an RGB image from a ``.ppm``/``.pgm``/``.pnm`` or ``.png`` file."""
    path = Path(path)
    suffix = _suffix(path)
    data = path.read_bytes()
    img = decode_png(data) if suffix in PNG_SUFFIXES else decode_netpbm(data)
    img.meta["path"] = str(path)
    return img


def image_write(img: Image, path: str | os.PathLike[str]) -> Path:
    """Write an RGB image atomically; the format follows the file extension."""
    path = Path(path)
    suffix = _suffix(path)
    if suffix in PNG_SUFFIXES:
        data = encode_png(to_uint8(img.pixels))
    elif suffix == ".pgm":
        data = encode_pgm(to_uint8(img.pixels.mean(axis=2)))
    else:
        data = encode_ppm(img)
    return atomic_write_bytes(path, data)


def gray_write(values: np.ndarray, path: str | os.PathLike[str]) -> Path:
    """Write a 2-D [0, 1] map as an 8-bit grayscale image.

    ``.pgm`` gets a P5 file, ``.png`` an 8-bit gray PNG, and ``.ppm`` a P6
    file with three identical channels.
    """
    return gray_write_uint8(to_uint8(values), path)


def gray_write_uint8(samples: np.ndarray, path: str | os.PathLike[str]) -> Path:
    path = Path(path)
    suffix = _suffix(path)
    samples = np.asarray(samples, dtype=np.uint8)
    height, width = samples.shape
    if suffix in PNG_SUFFIXES:
        data = encode_png(samples)
    elif suffix == ".pgm":
        data = encode_pgm(samples)
    else:
        rgb = np.repeat(samples[..., None], 3, axis=2)
        data = f"P6\n{width} {height}\n{MAXVAL}\n".encode("ascii") + rgb.tobytes()
    return atomic_write_bytes(path, data)
