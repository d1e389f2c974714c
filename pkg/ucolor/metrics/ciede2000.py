"""CIEDE2000 color difference between CIELab colors.

Follows the published formula including the hue-rotation term and the
lightness, chroma and hue compensations, with ``kL = kC = kH = 1``.
Inputs broadcast over leading axes; the last axis holds ``(L, a, b)``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from ucolor.errors import ColorSpaceError

POW25_7 = 25.0**7


def _split(lab: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    array = np.asarray(lab, dtype=np.float64)
    if array.shape[-1:] != (3,):
        raise ColorSpaceError(f"Lab colors need a trailing axis of 3; got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ColorSpaceError("Lab colors contain non-finite components")
    return array[..., 0], array[..., 1], array[..., 2]


def ciede2000(lab1: ArrayLike, lab2: ArrayLike) -> np.ndarray | float:
    """Return ΔE00 between ``lab1`` and ``lab2`` (a float for single triples)."""
    l1, a1, b1 = _split(lab1)
    l2, a2, b2 = _split(lab2)

    c1 = np.hypot(a1, b1)
    c2 = np.hypot(a2, b2)
    c_bar7 = ((c1 + c2) / 2.0) ** 7
    g = 0.5 * (1.0 - np.sqrt(c_bar7 / (c_bar7 + POW25_7)))

    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.where((a1p == 0) & (b1 == 0), 0.0, np.mod(np.arctan2(b1, a1p), 2 * np.pi))
    h2p = np.where((a2p == 0) & (b2 == 0), 0.0, np.mod(np.arctan2(b2, a2p), 2 * np.pi))

    chroma_product = c1p * c2p
    achromatic = chroma_product == 0

    delta_l = l2 - l1
    delta_c = c2p - c1p
    dh = h2p - h1p
    dh = np.where(dh > np.pi, dh - 2 * np.pi, np.where(dh < -np.pi, dh + 2 * np.pi, dh))
    dh = np.where(achromatic, 0.0, dh)
    delta_h = 2.0 * np.sqrt(chroma_product) * np.sin(dh / 2.0)

    l_bar = (l1 + l2) / 2.0
    c_bar = (c1p + c2p) / 2.0
    h_sum = h1p + h2p
    h_gap = np.abs(h1p - h2p)
    h_bar = np.where(
        achromatic,
        h_sum,
        np.where(
            h_gap <= np.pi,
            h_sum / 2.0,
            np.where(h_sum < 2 * np.pi, h_sum / 2.0 + np.pi, h_sum / 2.0 - np.pi),
        ),
    )

    t = (
        1.0
        - 0.17 * np.cos(h_bar - np.deg2rad(30.0))
        + 0.24 * np.cos(2.0 * h_bar)
        + 0.32 * np.cos(3.0 * h_bar + np.deg2rad(6.0))
        - 0.20 * np.cos(4.0 * h_bar - np.deg2rad(63.0))
    )
    delta_theta = np.deg2rad(30.0) * np.exp(-(((np.rad2deg(h_bar) - 275.0) / 25.0) ** 2))
    c_bar7p = c_bar**7
    r_c = 2.0 * np.sqrt(c_bar7p / (c_bar7p + POW25_7))
    s_l = 1.0 + 0.015 * (l_bar - 50.0) ** 2 / np.sqrt(20.0 + (l_bar - 50.0) ** 2)
    s_c = 1.0 + 0.045 * c_bar
    s_h = 1.0 + 0.015 * c_bar * t
    r_t = -np.sin(2.0 * delta_theta) * r_c

    term_l = delta_l / s_l
    term_c = delta_c / s_c
    term_h = delta_h / s_h
    result = np.sqrt(term_l**2 + term_c**2 + term_h**2 + r_t * term_c * term_h)
    if np.ndim(result) == 0:
        return float(result)
    return result
