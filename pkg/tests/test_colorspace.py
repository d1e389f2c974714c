"""Tests for RGB/HSV/Lab conversions and the network-input renditions."""

from __future__ import annotations

import numpy as np
import pytest
from ucolor.colorspace import (
    from_network_input,
    hsv_to_rgb,
    lab01_to_lab,
    lab_to_lab01,
    lab_to_rgb,
    rgb_to_hsv,
    rgb_to_lab,
    to_network_input,
)
from ucolor.errors import ColorSpaceError
from ucolor.models import ColorSpace, Image


def test_hsv_anchors():
    """Primary and gray anchors map onto their textbook HSV values."""
    np.testing.assert_array_equal(rgb_to_hsv([1.0, 0.0, 0.0]), [0.0, 1.0, 1.0])
    np.testing.assert_array_equal(rgb_to_hsv([0.5, 0.5, 0.5]), [0.0, 0.0, 0.5])
    np.testing.assert_allclose(rgb_to_hsv([0.0, 1.0, 0.0]), [1.0 / 3.0, 1.0, 1.0], atol=1e-15)
    np.testing.assert_array_equal(hsv_to_rgb([0.0, 1.0, 1.0]), [1.0, 0.0, 0.0])


def test_zero_saturation_is_gray_for_any_hue():
    """S = 0 yields (v, v, v) regardless of hue."""
    for hue in (0.0, 0.2, 0.5, 0.99):
        np.testing.assert_allclose(hsv_to_rgb([hue, 0.0, 0.37]), [0.37, 0.37, 0.37])


def test_hsv_round_trip():
    """rgb -> hsv -> rgb is the identity on chromatic colors."""
    rng = np.random.default_rng(0)
    rgb = rng.random((10_000, 3))
    hsv = rgb_to_hsv(rgb)
    keep = hsv[:, 1] > 1e-6
    assert np.max(np.abs(hsv_to_rgb(hsv)[keep] - rgb[keep])) < 1e-10


def test_hue_rotation_under_channel_permutation():
    """Cycling (r, g, b) -> (g, b, r) shifts hue by a third of a turn."""
    rng = np.random.default_rng(1)
    rgb = rng.random((1_000, 3))
    hue = rgb_to_hsv(rgb)[:, 0]
    rotated = rgb_to_hsv(rgb[:, [1, 2, 0]])[:, 0]
    shift = np.mod(rotated - hue + 1.0 / 3.0, 1.0)
    distance = np.minimum(shift, 1.0 - shift)
    assert np.max(distance) < 1e-12


def test_lab_anchors():
    """White and black are the Lab reference points."""
    np.testing.assert_allclose(rgb_to_lab([1.0, 1.0, 1.0]), [100.0, 0.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(rgb_to_lab([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(lab_to_rgb([100.0, 0.0, 0.0]), [1.0, 1.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(lab_to_rgb([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0], atol=1e-12)


def test_mid_gray_lightness_matches_straight_line_pipeline():
    """Mid gray goes through sRGB expansion and the cube-root branch of L*."""
    linear = ((0.5 + 0.055) / 1.055) ** 2.4
    expected_l = 116.0 * linear ** (1.0 / 3.0) - 16.0
    np.testing.assert_allclose(rgb_to_lab([0.5, 0.5, 0.5]), [expected_l, 0.0, 0.0], atol=1e-8)


def test_gray_lightness_is_monotone():
    """L* never decreases along the gray axis."""
    levels = np.linspace(0.0, 1.0, 256)
    lightness = rgb_to_lab(np.repeat(levels[:, None], 3, axis=1))[:, 0]
    assert np.all(np.diff(lightness) >= 0.0)


def test_lab_round_trip():
    """rgb -> lab -> rgb is the identity inside the gamut."""
    rng = np.random.default_rng(2)
    rgb = rng.random((10_000, 3))
    back, out_of_gamut = lab_to_rgb(rgb_to_lab(rgb), return_gamut=True)
    assert not out_of_gamut.any()
    assert np.max(np.abs(back - rgb)) < 1e-8


def test_lab_to_rgb_flags_out_of_gamut():
    """Unreachable Lab colors are clamped and flagged."""
    rgb, flags = lab_to_rgb(np.array([[50.0, 120.0, -120.0], [50.0, 0.0, 0.0]]), return_gamut=True)
    assert flags.tolist() == [True, False]
    assert rgb.min() >= 0.0 and rgb.max() <= 1.0


def test_out_of_range_components_raise():
    """Conversions reject components outside [0, 1]."""
    with pytest.raises(ColorSpaceError, match=r"\[0, 1\]"):
        rgb_to_hsv([1.2, 0.0, 0.0])
    with pytest.raises(ColorSpaceError, match=r"\[0, 1\]"):
        rgb_to_lab([-0.1, 0.0, 0.0])
    with pytest.raises(ColorSpaceError, match="trailing axis"):
        rgb_to_lab([0.1, 0.2])


def test_lab01_normalization_round_trip():
    """The affine Lab normalization is undone exactly inside its range."""
    lab = np.array([[53.0, -20.0, 40.0], [10.0, 60.0, -90.0]])
    np.testing.assert_allclose(lab01_to_lab(lab_to_lab01(lab)), lab, atol=1e-12)
    np.testing.assert_array_equal(lab_to_lab01([[120.0, 200.0, -200.0]]), [[1.0, 1.0, 0.0]])


def test_network_input_anchors():
    """White and black produce the documented renditions."""
    white = Image(np.ones((2, 2, 3)))
    rgb, hsv, lab = to_network_input(white)
    np.testing.assert_array_equal(rgb.pixels, white.pixels)
    np.testing.assert_allclose(hsv.pixels[0, 0], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(lab.pixels[0, 0], [1.0, 128 / 255, 128 / 255], atol=1e-10)
    assert (rgb.space, hsv.space, lab.space) == (ColorSpace.RGB, ColorSpace.HSV01, ColorSpace.LAB01)

    _, hsv, lab = to_network_input(Image(np.zeros((2, 2, 3))))
    np.testing.assert_array_equal(hsv.pixels[0, 0], [0.0, 0.0, 0.0])
    np.testing.assert_allclose(lab.pixels[0, 0], [0.0, 128 / 255, 128 / 255], atol=1e-12)


def test_network_inputs_stay_in_unit_range():
    """Every rendition of random images lies in [0, 1]."""
    rng = np.random.default_rng(3)
    for _ in range(1_000):
        renditions = to_network_input(Image(rng.random((2, 2, 3))))
        for rendition in renditions:
            assert rendition.pixels.min() >= 0.0 and rendition.pixels.max() <= 1.0


def test_from_network_input_inverts_renditions():
    """HSV01 and LAB01 renditions convert back to the source RGB."""
    rng = np.random.default_rng(4)
    img = Image(rng.random((4, 4, 3)))
    rgb, hsv, lab = to_network_input(img)
    np.testing.assert_allclose(from_network_input(hsv).pixels, img.pixels, atol=1e-10)
    np.testing.assert_allclose(from_network_input(lab).pixels, img.pixels, atol=1e-8)
    assert from_network_input(rgb).pixels is not rgb.pixels
