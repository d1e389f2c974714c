"""Manifest-driven evaluation of enhanced results."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ucolor.io.files import dump_json
from ucolor.io.images import image_read
from ucolor.io.manifest import DatasetManifest, ManifestEntry
from ucolor.metrics.colorchecker import ColorCheckerLayout, color_checker_score
from ucolor.metrics.noreference import BLOCK, uciqe, uiqm
from ucolor.metrics.reference import mse, psnr_from_mse

logger = logging.getLogger(__name__)

METRICS = ("psnr_db", "mse_255sq", "uciqe", "uiqm", "ciede2000")


def _json_float(value: Optional[float]) -> Any:
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@dataclass
class ImageRecord:
    """Metrics of one result image; full-reference fields are ``None`` when not computed."""

    path: str
    uciqe: float
    uiqm: float
    psnr_db: Optional[float] = None
    mse_255sq: Optional[float] = None
    ciede2000: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: _json_float(getattr(self, f.name)) if f.name != "path" else self.path
                for f in fields(self)}


@dataclass
class EvalReport:
    """Per-image records in manifest order, aggregate means and the settings used."""

    records: list[ImageRecord] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    settings: Dict[str, Any] = field(default_factory=dict)

    @property
    def aggregates(self) -> Dict[str, Optional[float]]:
        """Per-image-then-average mean of every metric present on all records."""
        means: Dict[str, Optional[float]] = {}
        for name in METRICS:
            values = [getattr(record, name) for record in self.records]
            if not values or any(value is None for value in values):
                means[name] = None
            else:
                means[name] = float(np.mean(values))
        return means

    @property
    def complete(self) -> bool:
        return not self.missing

    def to_dict(self) -> Dict[str, Any]:
        return {
            "records": [record.to_dict() for record in self.records],
            "aggregate": {name: _json_float(value) for name, value in self.aggregates.items()},
            "missing": list(self.missing),
            "settings": dict(self.settings),
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def to_frame(self) -> pd.DataFrame:
        columns = ["path", *METRICS]
        rows = [[record.path, *(getattr(record, name) for name in METRICS)] for record in self.records]
        if rows:
            rows.append(["mean", *(self.aggregates[name] for name in METRICS)])
        frame = pd.DataFrame(rows, columns=columns)
        return frame.dropna(axis=1, how="all")

    def to_table(self) -> str:
        """Aligned plain-text table with a trailing ``mean`` row."""
        frame = self.to_frame()
        if frame.empty:
            return "(no results)\n"
        return frame.to_string(index=False, float_format=lambda v: f"{v:.4f}", na_rep="-") + "\n"


def _evaluate_entry(
    manifest: DatasetManifest,
    entry: ManifestEntry,
    result_path: Path,
    with_reference: bool,
    layout: Optional[ColorCheckerLayout],
) -> ImageRecord:
    result = image_read(result_path)
    record = ImageRecord(entry.input_path, uciqe=uciqe(result), uiqm=uiqm(result))
    if with_reference and entry.reference_path is not None:
        reference = image_read(manifest.resolve(entry.reference_path))
        record.mse_255sq = mse(result, reference)
        record.psnr_db = psnr_from_mse(record.mse_255sq)
    if layout is not None:
        record.ciede2000 = color_checker_score(result, layout)
    return record


def evaluate(
    manifest: DatasetManifest,
    results_dir: str | Path,
    with_reference: bool = True,
    *,
    layout: Optional[ColorCheckerLayout] = None,
    threads: int = 1,
) -> EvalReport:
    """Score every result image named after its manifest input.

    Results are looked up as ``results_dir / entry.input_path``. Missing
    results are logged, listed in :attr:`EvalReport.missing` and skipped.
    Records follow manifest order regardless of ``threads``.
    """
    results_dir = Path(results_dir)
    present: list[tuple[ManifestEntry, Path]] = []
    missing: list[str] = []
    for entry in manifest:
        path = results_dir / entry.input_path
        if path.is_file():
            present.append((entry, path))
        else:
            logger.warning("missing result for %s (expected %s)", entry.input_path, path)
            missing.append(entry.input_path)

    records = Parallel(n_jobs=max(1, threads), prefer="threads")(
        delayed(_evaluate_entry)(manifest, entry, path, with_reference, layout)
        for entry, path in present
    )
    settings = {
        "manifest": manifest.name,
        "with_reference": bool(with_reference),
        "color_checker": layout is not None,
        "block_size": BLOCK,
        "scale": 255,
    }
    return EvalReport(list(records), missing, settings)
