"""Silhouette selection: drop near-white background, keep the largest contour."""

from __future__ import annotations

import numpy as np

from .segmentation import label_components
from .types import BinaryMask, LabelMap, NoForegroundError, PipelineConfig


def _mean_value_saturation(mean_color: tuple[float, float, float]) -> tuple[float, float]:
    mx = max(mean_color)
    mn = min(mean_color)
    sat = 0.0 if mx == 0 else (mx - mn) / mx
    return mx, sat


def is_background_region(mean_color: tuple[float, float, float], cfg: PipelineConfig) -> bool:
    """Near-white test on a region's mean color (the exam room is draped white)."""
    value, sat = _mean_value_saturation(mean_color)
    return value >= cfg.background_value_min and sat <= cfg.background_saturation_max


def extract_silhouette(lm: LabelMap, cfg: PipelineConfig | None = None) -> BinaryMask:
    """Pick the non-background region with the largest perimeter.

    Ties go to the larger area, then the lower id. With fill_holes set,
    enclosed pockets of the complement (not 4-connected to the image border)
    are folded into the mask.

    Raises NoForegroundError when every region passes the near-white test.
    """
    cfg = cfg or PipelineConfig()
    candidates = [
        i for i, r in enumerate(lm.regions) if not is_background_region(r.mean_color, cfg)
    ]
    if not candidates:
        raise NoForegroundError("every region was classified as background")
    best = min(
        candidates,
        key=lambda i: (-lm.regions[i].perimeter, -lm.regions[i].area, i),
    )
    bits = lm.labels == best
    if cfg.fill_holes:
        comp, n = label_components(~bits, connectivity=4)
        border_ids = np.unique(
            np.concatenate([comp[0, :], comp[-1, :], comp[:, 0], comp[:, -1]])
        )
        open_to_border = np.zeros(n + 1, dtype=bool)
        open_to_border[border_ids] = True
        bits = bits | ((comp > 0) & ~open_to_border[comp])
    return BinaryMask(width=lm.width, height=lm.height, bits=bits)
