"""Absorption of small regions into their dominant neighbours."""

from __future__ import annotations

import numpy as np

from .segmentation import compact_raster_order, region_perimeters
from .types import LabelMap, PipelineConfig, RegionStats

_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))


def _neighbor_boundary_counts(labels: np.ndarray, region_id: int) -> dict[int, int]:
    """Length of the shared 4-boundary between region_id and each neighbour,
    counted as adjacent pixel pairs."""
    h, w = labels.shape
    ys, xs = np.nonzero(labels == region_id)
    counts: dict[int, int] = {}
    for dy, dx in _DIRS:
        ny, nx = ys + dy, xs + dx
        ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
        neigh = labels[ny[ok], nx[ok]]
        neigh = neigh[neigh != region_id]
        for lid, cnt in zip(*np.unique(neigh, return_counts=True)):
            counts[int(lid)] = counts.get(int(lid), 0) + int(cnt)
    return counts


def merge_small_regions(lm: LabelMap, cfg: PipelineConfig | None = None) -> LabelMap:
    """Repeatedly absorb the smallest under-threshold region into the
    neighbour sharing the longest common boundary.

    Ties on the absorbing neighbour go to the larger area, then the lower id;
    ties on the candidate go to the lower id. Runs to fixpoint, then labels
    are re-compacted to 0..K'-1 in raster order of first appearance.
    """
    cfg = cfg or PipelineConfig()
    threshold = cfg.min_region_fraction * lm.width * lm.height
    labels = lm.labels.copy()
    n0 = len(lm.regions)
    areas = np.array([r.area for r in lm.regions], dtype=np.int64)
    color_sums = np.array(
        [np.asarray(r.mean_color) * r.area for r in lm.regions], dtype=np.float64
    )
    alive = np.ones(n0, dtype=bool)

    while alive.sum() > 1:
        below = [i for i in range(n0) if alive[i] and areas[i] < threshold]
        if not below:
            break
        cid = min(below, key=lambda i: (areas[i], i))
        counts = _neighbor_boundary_counts(labels, cid)
        nid = min(counts, key=lambda i: (-counts[i], -areas[i], i))
        labels[labels == cid] = nid
        areas[nid] += areas[cid]
        color_sums[nid] += color_sums[cid]
        alive[cid] = False

    compact, old_of_new = compact_raster_order(labels)
    k = len(old_of_new)
    perims = region_perimeters(compact, k)
    border_ids = np.unique(
        np.concatenate([compact[0, :], compact[-1, :], compact[:, 0], compact[:, -1]])
    )
    touches = np.zeros(k, dtype=bool)
    touches[border_ids] = True
    regions = []
    for new_id in range(k):
        old = old_of_new[new_id]
        regions.append(
            RegionStats(
                area=int(areas[old]),
                mean_color=tuple(float(c) for c in color_sums[old] / areas[old]),
                perimeter=int(perims[new_id]),
                touches_border=bool(touches[new_id]),
            )
        )
    return LabelMap(width=lm.width, height=lm.height, labels=compact, regions=regions)
