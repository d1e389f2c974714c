"""Dataset manifests: JSON lists of input images and optional references."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional

from ucolor.errors import ManifestError
from ucolor.io.files import atomic_write_text, dump_json
from ucolor.io.images import image_read
from ucolor.models import Image

_ENTRY_KEYS = {"input", "reference"}
_MANIFEST_KEYS = {"name", "root", "entries"}


@dataclass
class ManifestEntry:
    """One input image and, for paired data, its reference, relative to the root."""

    input_path: str
    reference_path: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"input": self.input_path}
        if self.reference_path is not None:
            payload["reference"] = self.reference_path
        return payload


@dataclass
class DatasetManifest:
    """Ordered dataset description; entry order is the reporting order."""

    entries: list[ManifestEntry]
    root: Path = field(default_factory=lambda: Path("."))
    name: str = "dataset"

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        seen: set[str] = set()
        for entry in self.entries:
            if entry.input_path in seen:
                raise ManifestError(f"manifest '{self.name}' lists '{entry.input_path}' more than once")
            seen.add(entry.input_path)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    @property
    def paired(self) -> bool:
        return all(entry.reference_path is not None for entry in self.entries)

    def resolve(self, relative: str) -> Path:
        return self.root / relative

    def missing_files(self) -> list[Path]:
        missing = []
        for entry in self.entries:
            for relative in (entry.input_path, entry.reference_path):
                if relative is not None and not self.resolve(relative).is_file():
                    missing.append(self.resolve(relative))
        return missing

    def check_files(self) -> None:
        missing = self.missing_files()
        if missing:
            listing = ", ".join(str(path) for path in missing)
            raise ManifestError(f"manifest '{self.name}' references missing files: {listing}")

    def load_pairs(self) -> list[tuple[Image, Image]]:
        """Read every (input, reference) pair; every entry must carry a reference."""
        if not self.paired:
            raise ManifestError(f"manifest '{self.name}' has entries without a reference image")
        self.check_files()
        return [
            (image_read(self.resolve(entry.input_path)), image_read(self.resolve(entry.reference_path)))
            for entry in self.entries
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "root": str(self.root),
            "entries": [entry.to_dict() for entry in self.entries],
        }

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any], base: Path | None = None) -> "DatasetManifest":
        """Build a manifest; a relative ``root`` is taken relative to ``base``."""
        if not isinstance(payload, Mapping):
            raise ManifestError("manifest must be a JSON object")
        unknown = sorted(set(payload) - _MANIFEST_KEYS)
        if unknown:
            raise ManifestError(f"manifest has unknown keys: {', '.join(unknown)}")
        raw_entries = payload.get("entries")
        if not isinstance(raw_entries, list) or not raw_entries:
            raise ManifestError("manifest needs a non-empty 'entries' list")
        entries = []
        for index, raw in enumerate(raw_entries):
            if not isinstance(raw, Mapping) or "input" not in raw:
                raise ManifestError(f"manifest entry {index} needs an 'input' path")
            extra = sorted(set(raw) - _ENTRY_KEYS)
            if extra:
                raise ManifestError(f"manifest entry {index} has unknown keys: {', '.join(extra)}")
            entries.append(ManifestEntry(str(raw["input"]), raw.get("reference")))
        root = Path(payload.get("root", "."))
        if base is not None and not root.is_absolute():
            root = base / root
        return cls(entries, root=root, name=str(payload.get("name", "dataset")))


def load_manifest(path: str | os.PathLike[str], *, check_files: bool = True) -> DatasetManifest:
    """Load a manifest JSON file; referenced files must exist unless ``check_files`` is off."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from exc
    manifest = DatasetManifest.from_mapping(payload, base=path.parent)
    if check_files:
        manifest.check_files()
    return manifest


def save_manifest(manifest: DatasetManifest, path: str | os.PathLike[str]) -> Path:
    return atomic_write_text(path, dump_json(manifest.to_dict()))
