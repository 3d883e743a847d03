"""RGB -> HSV conversion and chromatic/achromatic pixel classification."""

from __future__ import annotations

import numpy as np

from .types import FeatureBin, HsvPixel, PipelineConfig


def rgb_to_hsv(p: tuple[float, float, float]) -> HsvPixel:
    """Convert one RGB pixel (channels 0..255) to HSV.

    value = max(r, g, b); saturation = (max - min) / max (0 when max == 0);
    hue by the hexcone formula with the r, g, b branches tried in that order,
    so an achromatic pixel always gets hue 0.
    """
    r, g, b = (float(c) for c in p)
    mx = max(r, g, b)
    mn = min(r, g, b)
    delta = mx - mn
    value = mx
    saturation = 0.0 if mx == 0 else delta / mx
    if delta == 0:
        hue = 0.0
    elif mx == r:
        hue = (60.0 * (g - b) / delta) % 360.0
    elif mx == g:
        hue = 60.0 * (b - r) / delta + 120.0
    else:
        hue = 60.0 * (r - g) / delta + 240.0
    return HsvPixel(hue=hue, saturation=saturation, value=value)


def saturation_threshold(value: float, cfg: PipelineConfig) -> float:
    """Chromatic/achromatic split point for a given value channel."""
    return cfg.sat_threshold_max - cfg.sat_threshold_slope * value / 255.0


def classify_pixel(h: HsvPixel, cfg: PipelineConfig) -> FeatureBin:
    """Assign a pixel its feature bin.

    Chromatic iff saturation >= the value-dependent threshold; chromatic
    pixels bin by hue, achromatic ones by gray level.
    """
    if h.saturation >= saturation_threshold(h.value, cfg):
        return FeatureBin(chromatic=True, index=int(h.hue // (360.0 / cfg.hue_bins)))
    gray = min(int(h.value // (256.0 / cfg.gray_bins)), cfg.gray_bins - 1)
    return FeatureBin(chromatic=False, index=gray)


def hsv_planes(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized rgb_to_hsv over an (h, w, 3) uint8 array.

    Returns (hue, saturation, value) float64 planes with the same semantics
    as the scalar conversion.
    """
    rgb = pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn
    sat = np.divide(delta, mx, out=np.zeros_like(mx), where=mx > 0)
    safe = np.where(delta > 0, delta, 1.0)
    hue = np.select(
        [delta == 0, mx == r, mx == g],
        [0.0, (60.0 * (g - b) / safe) % 360.0, 60.0 * (b - r) / safe + 120.0],
        default=60.0 * (r - g) / safe + 240.0,
    )
    return hue, sat, mx


def feature_bin_codes(pixels: np.ndarray, cfg: PipelineConfig) -> np.ndarray:
    """Combined bin code per pixel: hue bins 0..hue_bins-1, then gray bins
    hue_bins..hue_bins+gray_bins-1. Matches classify_pixel exactly."""
    hue, sat, val = hsv_planes(pixels)
    chromatic = sat >= (cfg.sat_threshold_max - cfg.sat_threshold_slope * val / 255.0)
    hue_idx = (hue // (360.0 / cfg.hue_bins)).astype(np.int32)
    gray_idx = np.minimum(
        (val // (256.0 / cfg.gray_bins)).astype(np.int32), cfg.gray_bins - 1
    )
    return np.where(chromatic, hue_idx, cfg.hue_bins + gray_idx).astype(np.int32)
