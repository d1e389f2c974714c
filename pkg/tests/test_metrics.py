"""Tests for fidelity, color-difference and no-reference quality metrics."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from conftest import random_image, uniform_image
from ucolor.colorspace import lab_to_rgb, rgb_to_lab
from ucolor.errors import ColorSpaceError, ConfigError, ShapeError
from ucolor.io.images import image_write
from ucolor.io.manifest import DatasetManifest, ManifestEntry
from ucolor.metrics import (
    MACBETH_LAB,
    PSNR_INF,
    ColorCheckerLayout,
    ciede2000,
    color_checker_score,
    evaluate,
    load_layout,
    mse,
    patch_colors,
    psnr,
    uciqe,
    uciqe_components,
    uiqm,
    uiqm_components,
)
from ucolor.models import Image

DATA = Path(__file__).parent / "data"


# --------------------------------------------------------------------------- full reference


def test_mse_examples():
    """Identical, one-level and full-scale differences on the 0–255 scale."""
    gray = uniform_image(0.5, 4, 4)
    assert mse(gray, gray) == 0.0
    shifted = Image(gray.pixels + 1.0 / 255.0)
    assert mse(gray, shifted) == pytest.approx(1.0)
    assert mse(uniform_image(0.0, 4, 4), uniform_image(1.0, 4, 4)) == 65025.0


def test_psnr_examples():
    """0 dB at full-scale error, 48.1308 dB at mse 1, infinity when identical."""
    assert psnr(uniform_image(0.0, 2, 2), uniform_image(1.0, 2, 2)) == pytest.approx(0.0, abs=1e-12)
    gray = uniform_image(0.5, 4, 4)
    assert psnr(gray, Image(gray.pixels + 1.0 / 255.0)) == pytest.approx(48.1308, abs=1e-4)
    assert psnr(gray, gray) == PSNR_INF
    assert math.isinf(PSNR_INF)


def test_reference_metrics_reject_shape_mismatch(rng):
    """Both images must have the same size."""
    with pytest.raises(ShapeError, match="differ in shape"):
        mse(random_image(rng, 4, 4), random_image(rng, 4, 8))


# --------------------------------------------------------------------------- CIEDE2000


def test_ciede2000_conformance_pairs():
    """The published conformance pairs are reproduced to 1e-4."""
    table = pd.read_csv(DATA / "ciede2000_pairs.csv")
    lab1 = table[["L1", "a1", "b1"]].to_numpy()
    lab2 = table[["L2", "a2", "b2"]].to_numpy()
    np.testing.assert_allclose(ciede2000(lab1, lab2), table["delta_e"].to_numpy(), atol=1e-4)


def test_ciede2000_identity_and_symmetry(rng):
    """Identical colors give 0 and swapping the arguments changes nothing."""
    lab1 = np.column_stack([rng.uniform(0, 100, 1000), rng.uniform(-100, 100, (1000, 2))])
    lab2 = np.column_stack([rng.uniform(0, 100, 1000), rng.uniform(-100, 100, (1000, 2))])
    np.testing.assert_allclose(ciede2000(lab1, lab1), 0.0, atol=1e-12)
    np.testing.assert_allclose(ciede2000(lab1, lab2), ciede2000(lab2, lab1), rtol=1e-12)
    assert np.all(ciede2000(lab1, lab2) >= 0.0)


def test_ciede2000_scalar_and_errors():
    """A single pair returns a float; malformed colors are refused."""
    value = ciede2000([50.0, 2.5, 0.0], [50.0, 0.0, -2.5])
    assert isinstance(value, float)
    assert value == pytest.approx(4.3065, abs=1e-4)
    with pytest.raises(ColorSpaceError, match="trailing axis of 3"):
        ciede2000([50.0, 0.0], [50.0, 0.0])
    with pytest.raises(ColorSpaceError, match="non-finite"):
        ciede2000([np.nan, 0.0, 0.0], [50.0, 0.0, 0.0])


# --------------------------------------------------------------------------- color checker


def _painted_chart(height: int = 48, width: int = 72) -> tuple[Image, ColorCheckerLayout]:
    """An image of the 24 chart colors, one flat cell per patch."""
    colors = lab_to_rgb(MACBETH_LAB)
    pixels = np.zeros((height, width, 3))
    cell_h, cell_w = height // 4, width // 6
    for index, color in enumerate(colors):
        row, col = divmod(index, 6)
        pixels[row * cell_h : (row + 1) * cell_h, col * cell_w : (col + 1) * cell_w] = color
    return Image(pixels), ColorCheckerLayout.grid(height, width)


def test_painted_chart_scores_zero():
    """Patches painted with their own reference colors have no difference."""
    img, layout = _painted_chart()
    exact = ColorCheckerLayout(layout.rects, rgb_to_lab(lab_to_rgb(MACBETH_LAB)))
    assert color_checker_score(img, exact) == pytest.approx(0.0, abs=1e-6)


def test_single_shifted_patch_contributes_one_24th():
    """Shifting one reference in L adds its single-pair difference divided by 24."""
    img, layout = _painted_chart()
    reference = rgb_to_lab(lab_to_rgb(MACBETH_LAB))
    shifted = reference.copy()
    shifted[7, 0] += 5.0
    score = color_checker_score(img, ColorCheckerLayout(layout.rects, shifted))
    assert score == pytest.approx(ciede2000(reference[7], shifted[7]) / 24.0, abs=1e-6)


def test_gray_image_scores_positive():
    """A uniform gray result differs from the chart."""
    assert color_checker_score(uniform_image(0.5, 48, 72), ColorCheckerLayout.grid(48, 72)) > 0.0


def test_patch_colors_shape():
    """One Lab triple per patch."""
    img, layout = _painted_chart()
    assert patch_colors(img, layout).shape == (24, 3)


def test_layout_validation(tmp_path):
    """Layouts need 24 non-overlapping patches that fit the image."""
    layout = ColorCheckerLayout.grid(48, 72)
    with pytest.raises(ConfigError, match="24 patches"):
        ColorCheckerLayout(layout.rects[:23], MACBETH_LAB[:23])
    with pytest.raises(ConfigError, match="overlap"):
        ColorCheckerLayout([layout.rects[0]] * 24)
    with pytest.raises(ShapeError, match="outside"):
        color_checker_score(uniform_image(0.5, 24, 24), layout)

    path = tmp_path / "layout.json"
    path.write_text(json.dumps(layout.to_dict()))
    loaded = load_layout(path)
    assert loaded.rects == layout.rects
    np.testing.assert_array_equal(loaded.reference_lab, layout.reference_lab)

    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_layout(path)


# --------------------------------------------------------------------------- UCIQE


def _uciqe_straight_line(rgb: np.ndarray) -> float:
    flat = rgb.reshape(-1, 3)
    chroma, lightness, saturation = [], [], []
    for pixel in flat:
        lab = rgb_to_lab(pixel)
        c = math.sqrt(lab[1] ** 2 + lab[2] ** 2) / 255.0
        l_ = lab[0] / 100.0
        chroma.append(c)
        lightness.append(l_)
        saturation.append(c / math.sqrt(c * c + l_ * l_) if c or l_ else 0.0)
    n = len(flat)
    mean_c = sum(chroma) / n
    sigma_c = math.sqrt(sum((c - mean_c) ** 2 for c in chroma) / n)
    count = max(1, round(0.01 * n))
    ordered = sorted(lightness)
    con_l = sum(ordered[-count:]) / count - sum(ordered[:count]) / count
    mu_s = sum(saturation) / n
    return 0.4680 * sigma_c + 0.2745 * con_l + 0.2576 * mu_s


def test_uciqe_of_gray_is_zero():
    """A uniform gray image has no chroma spread, contrast or saturation."""
    parts = uciqe_components(uniform_image(0.5))
    assert (parts.sigma_chroma, parts.contrast_luminance, parts.mean_saturation) == (0.0, 0.0, 0.0)
    assert parts.score == 0.0


def test_uciqe_contrast_term_grows_with_contrast():
    """Half black, half white raises the luminance contrast over flat gray."""
    split = np.zeros((16, 16, 3))
    split[:, 8:] = 1.0
    flat = uciqe_components(uniform_image(0.5)).contrast_luminance
    assert uciqe_components(Image(split)).contrast_luminance > flat
    assert uciqe_components(Image(split)).contrast_luminance == pytest.approx(1.0, abs=1e-9)


def test_uciqe_matches_straight_line_evaluation(rng):
    """The vectorized score equals a per-pixel loop."""
    img = random_image(rng, 12, 10)
    assert uciqe(img) == pytest.approx(_uciqe_straight_line(img.pixels), rel=1e-9)


# --------------------------------------------------------------------------- UIQM


def _trimmed(values: np.ndarray) -> tuple[float, float]:
    ordered = sorted(values.ravel().tolist())
    trim = int(0.1 * len(ordered))
    kept = ordered[trim : len(ordered) - trim]
    mean = sum(kept) / len(kept)
    return mean, sum((v - mean) ** 2 for v in kept) / len(kept)


def _sobel(channel: np.ndarray) -> np.ndarray:
    padded = np.pad(channel, 1, mode="edge")
    out = np.zeros_like(channel)
    weights = (1.0, 2.0, 1.0)
    for i in range(channel.shape[0]):
        for j in range(channel.shape[1]):
            gx = sum(w * (padded[i + d, j + 2] - padded[i + d, j]) for d, w in enumerate(weights))
            gy = sum(w * (padded[i + 2, j + d] - padded[i, j + d]) for d, w in enumerate(weights))
            out[i, j] = math.hypot(gx, gy)
    return out


def _uiqm_straight_line(rgb: np.ndarray) -> float:
    rgb255 = rgb * 255.0
    mu_rg, var_rg = _trimmed(rgb255[..., 0] - rgb255[..., 1])
    mu_yb, var_yb = _trimmed((rgb255[..., 0] + rgb255[..., 1]) / 2.0 - rgb255[..., 2])
    uicm = -0.0268 * math.sqrt(mu_rg**2 + mu_yb**2) + 0.1586 * math.sqrt(var_rg + var_yb)

    rows, cols = rgb.shape[0] // 8, rgb.shape[1] // 8

    def blocks(channel):
        for i in range(rows):
            for j in range(cols):
                yield channel[8 * i : 8 * i + 8, 8 * j : 8 * j + 8]

    eme = []
    for c in range(3):
        edges = rgb255[..., c] * _sobel(rgb255[..., c])
        total = 0.0
        for block in blocks(edges):
            if block.min() > 0.0:
                total += math.log(block.max() / block.min())
        eme.append(2.0 * total / (rows * cols))
    uism = 0.299 * eme[0] + 0.587 * eme[1] + 0.114 * eme[2]

    gray = 0.299 * rgb255[..., 0] + 0.587 * rgb255[..., 1] + 0.114 * rgb255[..., 2]
    gamma = 1026.0
    total = 0.0
    for block in blocks(gray):
        high, low = float(block.max()), float(block.min())
        ratio = (gamma * (high - low) / (gamma - low)) / (high + low - high * low / gamma)
        if ratio > 0.0:
            total += ratio * math.log(ratio)
    uiconm = gamma - gamma * (1.0 - total / gamma) ** (1.0 / (rows * cols))
    return 0.0282 * uicm + 0.2953 * uism + 3.5753 * uiconm


def test_uiqm_of_gray_is_zero():
    """A flat gray image has no colorfulness, sharpness or contrast."""
    parts = uiqm_components(uniform_image(0.5))
    assert (parts.uicm, parts.uism, parts.uiconm, parts.score) == (0.0, 0.0, 0.0, 0.0)


def test_uicm_reacts_to_red_green_imbalance():
    """Raising the red channel changes the colorfulness term."""
    tinted = uniform_image([0.6, 0.5, 0.5])
    assert uiqm_components(tinted).uicm != uiqm_components(uniform_image(0.5)).uicm


def test_uiqm_matches_straight_line_evaluation(rng):
    """The block statistics equal an explicit per-block loop."""
    img = random_image(rng, 16, 24)
    assert uiqm(img) == pytest.approx(_uiqm_straight_line(img.pixels), rel=1e-9)


def test_uiqm_rejects_tiny_images(rng):
    """At least one 8×8 block is required."""
    with pytest.raises(ShapeError, match="8×8"):
        uiqm(random_image(rng, 4, 16))


# --------------------------------------------------------------------------- evaluation


@pytest.fixture
def paired_set(tmp_path, rng):
    """Two inputs with references under ``data/`` and a results directory."""
    root = tmp_path / "data"
    entries = []
    references = {}
    for name in ("a.ppm", "b.ppm"):
        image_write(random_image(rng), root / name)
        reference = random_image(rng)
        image_write(reference, root / "ref" / name)
        references[name] = reference
        entries.append(ManifestEntry(name, f"ref/{name}"))
    manifest = DatasetManifest(entries, root=root, name="pairs")
    return manifest, tmp_path / "results", references


def test_evaluate_identical_results(paired_set):
    """Results equal to their references give mse 0 and infinite PSNR."""
    manifest, results, references = paired_set
    for name, reference in references.items():
        image_write(reference, results / name)
    report = evaluate(manifest, results)
    assert [record.path for record in report.records] == ["a.ppm", "b.ppm"]
    assert report.aggregates["mse_255sq"] == 0.0
    assert report.aggregates["psnr_db"] == PSNR_INF
    payload = json.loads(report.to_json())
    assert payload["aggregate"]["psnr_db"] == "inf"
    assert payload["settings"]["manifest"] == "pairs"
    assert report.complete


def test_evaluate_single_image_aggregate(tmp_path, rng):
    """With one image the aggregate equals the per-image values."""
    image_write(random_image(rng), tmp_path / "results" / "only.ppm")
    manifest = DatasetManifest([ManifestEntry("only.ppm")], root=tmp_path)
    report = evaluate(manifest, tmp_path / "results", with_reference=False)
    (record,) = report.records
    assert report.aggregates["uciqe"] == record.uciqe
    assert report.aggregates["uiqm"] == record.uiqm
    assert report.aggregates["psnr_db"] is None
    assert "psnr_db" not in report.to_table()
    assert "mean" in report.to_table()


def test_evaluate_is_byte_identical(paired_set, rng):
    """Two runs, serial or threaded, serialize identically."""
    manifest, results, _ = paired_set
    for name in ("a.ppm", "b.ppm"):
        image_write(random_image(rng), results / name)
    first = evaluate(manifest, results).to_json()
    second = evaluate(manifest, results, threads=2).to_json()
    assert first == second


def test_evaluate_reports_missing_results(paired_set, rng, caplog):
    """Absent results are listed, logged and skipped."""
    manifest, results, _ = paired_set
    image_write(random_image(rng), results / "b.ppm")
    report = evaluate(manifest, results)
    assert report.missing == ["a.ppm"]
    assert [record.path for record in report.records] == ["b.ppm"]
    assert not report.complete
    assert "missing result for a.ppm" in caplog.text


def test_evaluate_with_color_checker(tmp_path):
    """A layout adds the chart score to every record."""
    img, layout = _painted_chart()
    image_write(img, tmp_path / "results" / "chart.ppm")
    manifest = DatasetManifest([ManifestEntry("chart.ppm")], root=tmp_path)
    report = evaluate(manifest, tmp_path / "results", with_reference=False, layout=layout)
    assert report.records[0].ciede2000 is not None
    assert report.settings["color_checker"] is True
