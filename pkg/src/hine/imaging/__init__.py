"""Semi-automatic skeleton extraction: HSV segmentation, region merging,
silhouette selection and safe-point thinning."""

from .color import classify_pixel, rgb_to_hsv, saturation_threshold
from .merging import merge_small_regions
from .pipeline import label_map_image, run_pipeline, write_stage_files
from .segmentation import label_components, segment
from .silhouette import extract_silhouette
from .thinning import has_2x2_block, thin
from .types import (
    BinaryMask,
    FeatureBin,
    HsvPixel,
    LabelMap,
    NoForegroundError,
    PipelineConfig,
    PipelineResult,
    RasterImage,
    RegionStats,
    Skeleton,
)

__all__ = [
    "BinaryMask",
    "FeatureBin",
    "HsvPixel",
    "LabelMap",
    "NoForegroundError",
    "PipelineConfig",
    "PipelineResult",
    "RasterImage",
    "RegionStats",
    "Skeleton",
    "classify_pixel",
    "extract_silhouette",
    "has_2x2_block",
    "label_components",
    "label_map_image",
    "merge_small_regions",
    "rgb_to_hsv",
    "run_pipeline",
    "saturation_threshold",
    "segment",
    "thin",
    "write_stage_files",
]
