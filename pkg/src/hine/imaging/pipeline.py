"""Composition of the four pipeline stages and the staged-file writer."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import pnm
from .merging import merge_small_regions
from .segmentation import segment
from .silhouette import extract_silhouette
from .thinning import thin
from .types import LabelMap, PipelineConfig, PipelineResult, RasterImage

STAGE_SUFFIXES = (".seg.ppm", ".merged.ppm", ".mask.pgm", ".skel.pgm")


def run_pipeline(img: RasterImage, cfg: PipelineConfig | None = None) -> PipelineResult:
    """segment -> merge_small_regions -> extract_silhouette -> thin.

    Raises NoForegroundError when the silhouette stage finds only background.
    """
    cfg = cfg or PipelineConfig()
    initial = segment(img, cfg)
    merged = merge_small_regions(initial, cfg)
    silhouette = extract_silhouette(merged, cfg)
    skeleton = thin(
        silhouette,
        max_passes=cfg.max_thinning_passes,
        prune_isolated=cfg.prune_isolated_pixels,
    )
    return PipelineResult(
        initial_segments=initial,
        merged_segments=merged,
        silhouette=silhouette,
        skeleton=skeleton,
    )


def label_map_image(lm: LabelMap) -> RasterImage:
    """Render a label map with each region painted its mean color."""
    palette = np.array(
        [[round(c) for c in r.mean_color] for r in lm.regions], dtype=np.uint8
    )
    return RasterImage.from_array(palette[lm.labels])


def write_stage_files(result: PipelineResult, out_dir: str | Path, stem: str) -> list[Path]:
    """Write the four staged artifacts as <stem>.seg.ppm, .merged.ppm,
    .mask.pgm and .skel.pgm under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / (stem + suffix) for suffix in STAGE_SUFFIXES]
    paths[0].write_bytes(pnm.write_ppm(label_map_image(result.initial_segments)))
    paths[1].write_bytes(pnm.write_ppm(label_map_image(result.merged_segments)))
    paths[2].write_bytes(pnm.write_mask(result.silhouette))
    paths[3].write_bytes(pnm.write_mask(result.skeleton))
    return paths
