"""Feature-bin segmentation into 4-connected regions with per-region stats."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .color import feature_bin_codes
from .types import LabelMap, PipelineConfig, RasterImage, RegionStats

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)
_STRUCT_8 = np.ones((3, 3), dtype=int)


def label_components(bits: np.ndarray, connectivity: int = 4) -> tuple[np.ndarray, int]:
    """Connected components of a boolean array; labels 1..n, background 0."""
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    labels, n = ndimage.label(bits, structure=structure)
    return labels.astype(np.int32), int(n)


def compact_raster_order(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Renumber labels to 0..K-1 in order of first raster appearance.

    Returns the renumbered array and the old id carried by each new id.
    """
    flat = labels.ravel()
    _, first_idx = np.unique(flat, return_index=True)
    old_ids = flat[np.sort(first_idx)]
    remap = np.empty(int(flat.max()) + 1, dtype=np.int32)
    remap[old_ids] = np.arange(len(old_ids), dtype=np.int32)
    return remap[labels], old_ids


def region_perimeters(labels: np.ndarray, n_regions: int) -> np.ndarray:
    """Per-region boundary-pixel counts.

    A pixel is on the boundary of its region when one of its 8 neighbours
    (or the image border) carries a different label.
    """
    h, w = labels.shape
    boundary = np.zeros((h, w), dtype=bool)
    boundary[0, :] = boundary[-1, :] = True
    boundary[:, 0] = boundary[:, -1] = True
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        a = labels[max(0, dy) : h + min(0, dy), max(0, dx) : w + min(0, dx)]
        b = labels[max(0, -dy) : h + min(0, -dy), max(0, -dx) : w + min(0, -dx)]
        diff = a != b
        boundary[max(0, -dy) : h + min(0, -dy), max(0, -dx) : w + min(0, -dx)] |= diff
        boundary[max(0, dy) : h + min(0, dy), max(0, dx) : w + min(0, dx)] |= diff
    return np.bincount(labels[boundary].ravel(), minlength=n_regions).astype(np.int64)


def compute_region_stats(labels: np.ndarray, pixels: np.ndarray) -> list[RegionStats]:
    """Area, mean color, perimeter and border contact for each label id."""
    n = int(labels.max()) + 1 if labels.size else 0
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=n)
    sums = np.zeros((n, 3), dtype=np.float64)
    for c in range(3):
        sums[:, c] = np.bincount(flat, weights=pixels[..., c].ravel(), minlength=n)
    perims = region_perimeters(labels, n)
    border_ids = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    touches = np.zeros(n, dtype=bool)
    touches[border_ids] = True
    return [
        RegionStats(
            area=int(areas[i]),
            mean_color=tuple(float(c) for c in sums[i] / areas[i]),
            perimeter=int(perims[i]),
            touches_border=bool(touches[i]),
        )
        for i in range(n)
    ]


def segment(img: RasterImage, cfg: PipelineConfig | None = None) -> LabelMap:
    """Partition the image into 4-connected components of equal feature bin."""
    cfg = cfg or PipelineConfig()
    codes = feature_bin_codes(img.pixels, cfg)
    combined = np.zeros(codes.shape, dtype=np.int32)
    offset = 0
    for value in np.unique(codes):
        lab, n = label_components(codes == value, connectivity=4)
        combined[lab > 0] = lab[lab > 0] + offset
        offset += n
    labels, _ = compact_raster_order(combined)
    return LabelMap(
        width=img.width,
        height=img.height,
        labels=labels,
        regions=compute_region_stats(labels, img.pixels),
    )
