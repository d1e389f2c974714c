"""File formats: images, weights and dataset manifests."""

from .files import atomic_write_bytes, atomic_write_text, dump_json
from .images import gray_write, gray_write_uint8, image_read, image_write, to_uint8
from .manifest import DatasetManifest, ManifestEntry, load_manifest, save_manifest
from .weights_file import decode_weights, encode_weights, load_weights, save_weights

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "atomic_write_bytes",
    "atomic_write_text",
    "decode_weights",
    "dump_json",
    "encode_weights",
    "gray_write",
    "gray_write_uint8",
    "image_read",
    "image_write",
    "load_manifest",
    "load_weights",
    "save_manifest",
    "save_weights",
    "to_uint8",
]
