"""Binary weights file.

Layout (all integers little-endian ``u32``)::

    b"UCLR" | version | config length | config JSON (UTF-8) | parameter count
    then per parameter:
    name length | name (UTF-8) | rank | extents... | float32 LE payload

Magic and version are checked before anything else is read.
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from ucolor.errors import ConfigError, WeightsFormatError
from ucolor.io.files import atomic_write_bytes
from ucolor.network.config import ModelConfig
from ucolor.network.weights import ModelWeights, first_mismatch, parameter_shapes

MAGIC = b"UCLR"
VERSION = 1
MAX_NAME = 4096
MAX_RANK = 8

_U32 = struct.Struct("<I")


def encode_weights(weights: ModelWeights) -> bytes:
    config = json.dumps(weights.config.to_dict(), sort_keys=True).encode("utf-8")
    chunks = [MAGIC, _U32.pack(VERSION), _U32.pack(len(config)), config, _U32.pack(len(weights))]
    for name, value in weights.params.items():
        encoded = name.encode("utf-8")
        chunks.append(_U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(_U32.pack(value.ndim))
        chunks.extend(_U32.pack(extent) for extent in value.shape)
        chunks.append(np.ascontiguousarray(value, dtype="<f4").tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.pos + size
        if end > len(self.data):
            raise WeightsFormatError(
                f"truncated weights file reading {what}: need {size} bytes, "
                f"{len(self.data) - self.pos} left"
            )
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]


def decode_weights(data: bytes, expected: Optional[ModelConfig] = None) -> ModelWeights:
    """Parse a weights file body; ``expected`` enforces compatibility with a config."""
    reader = _Reader(data)
    magic = reader.take(4, "magic")
    if magic != MAGIC:
        raise WeightsFormatError(f"bad weights magic {magic!r}; expected {MAGIC!r}")
    version = reader.u32("version")
    if version != VERSION:
        raise WeightsFormatError(f"unsupported weights format version {version} (expected {VERSION})")
    config_bytes = reader.take(reader.u32("config length"), "config")
    try:
        config = ModelConfig.from_mapping(json.loads(config_bytes.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WeightsFormatError(f"weights file carries an unreadable model config: {exc}") from exc
    except ConfigError as exc:
        raise WeightsFormatError(f"weights file carries an invalid model config: {exc}") from exc

    count = reader.u32("parameter count")
    params: dict[str, np.ndarray] = {}
    for index in range(count):
        name_length = reader.u32(f"name length of parameter {index}")
        if name_length > MAX_NAME:
            raise WeightsFormatError(f"parameter {index} name length {name_length} exceeds {MAX_NAME}")
        name = reader.take(name_length, f"name of parameter {index}").decode("utf-8")
        rank = reader.u32(f"rank of '{name}'")
        if rank > MAX_RANK:
            raise WeightsFormatError(f"parameter '{name}' rank {rank} exceeds {MAX_RANK}")
        shape = tuple(reader.u32(f"extent of '{name}'") for _ in range(rank))
        payload = reader.take(4 * int(np.prod(shape, dtype=np.int64)), f"payload of '{name}'")
        if name in params:
            raise WeightsFormatError(f"duplicate parameter '{name}'")
        params[name] = np.frombuffer(payload, dtype="<f4").reshape(shape).astype(np.float64)
    if reader.pos != len(data):
        raise WeightsFormatError(f"{len(data) - reader.pos} trailing bytes after the last parameter")

    target = expected if expected is not None else config
    problem = first_mismatch(parameter_shapes(target), {name: v.shape for name, v in params.items()})
    if problem is not None:
        raise WeightsFormatError(f"weights incompatible with model config: {problem}")
    return ModelWeights(target, params)


def save_weights(weights: ModelWeights, path: str | os.PathLike[str]) -> Path:
    """Write ``weights`` atomically."""
    return atomic_write_bytes(path, encode_weights(weights))


def load_weights(path: str | os.PathLike[str], expected: Optional[ModelConfig] = None) -> ModelWeights:
    """Read a weights file, optionally checking it against ``expected``."""
    path = Path(path)
    with path.open("rb") as handle:
        head = handle.read(8)
        if head[:4] != MAGIC:
            raise WeightsFormatError(f"{path}: bad weights magic {head[:4]!r}; expected {MAGIC!r}")
        if len(head) < 8 or _U32.unpack(head[4:8])[0] != VERSION:
            raise WeightsFormatError(f"{path}: unsupported weights format version")
        data = head + handle.read()
    return decode_weights(data, expected)
