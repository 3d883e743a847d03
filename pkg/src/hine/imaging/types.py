"""Pixel-grid types flowing through the skeleton extraction pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import DomainError


class NoForegroundError(DomainError):
    """Every region of the image was classified as background."""

    code = "NO_FOREGROUND"


class HsvPixel(NamedTuple):
    """Hue in degrees [0, 360), saturation in [0, 1], value 0..255."""

    hue: float
    saturation: float
    value: float


class FeatureBin(NamedTuple):
    """Classification of a pixel: chromatic hue bin or achromatic gray bin."""

    chromatic: bool
    index: int


@dataclass
class RasterImage:
    """RGB image as a (height, width, 3) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "RasterImage":
        pixels = np.asarray(pixels, dtype=np.uint8)
        h, w = pixels.shape[:2]
        return cls(width=w, height=h, pixels=pixels)


@dataclass
class BinaryMask:
    """Foreground flags as a (height, width) bool array."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.shape != (self.height, self.width):
            raise ValueError(
                f"mask shape {self.bits.shape} does not match {self.height}x{self.width}"
            )

    @classmethod
    def from_array(cls, bits: np.ndarray) -> "BinaryMask":
        bits = np.asarray(bits, dtype=bool)
        h, w = bits.shape
        return cls(width=w, height=h, bits=bits)


@dataclass
class Skeleton(BinaryMask):
    """A BinaryMask thinned to unit width (no 2x2 all-foreground block)."""


@dataclass
class RegionStats:
    """Per-region statistics of a LabelMap."""

    area: int
    mean_color: tuple[float, float, float]
    perimeter: int
    touches_border: bool


@dataclass
class LabelMap:
    """Region labeling: contiguous ids 0..K-1, each region 4-connected."""

    width: int
    height: int
    labels: np.ndarray
    regions: list[RegionStats]

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int32)
        if self.labels.shape != (self.height, self.width):
            raise ValueError(
                f"label buffer shape {self.labels.shape} does not match "
                f"{self.height}x{self.width}"
            )

    @property
    def region_count(self) -> int:
        return len(self.regions)


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable parameters of the skeleton extraction pipeline.

    The saturation threshold separating chromatic from achromatic pixels is
    a linear ramp of the value channel: s_th(v) = sat_threshold_max -
    sat_threshold_slope * v / 255. Pixels at or above the ramp are binned by
    hue, the rest by gray level.

    max_thinning_passes and prune_isolated_pixels are tuning hooks on top of
    the safe-point thinning; pruning isolated pixels trades exact component
    preservation for cleaner output and is off by default.
    """

    sat_threshold_max: float = 1.0
    sat_threshold_slope: float = 0.8
    hue_bins: int = 16
    gray_bins: int = 8
    min_region_fraction: float = 0.001
    background_value_min: float = 200.0
    background_saturation_max: float = 0.2
    fill_holes: bool = True
    max_thinning_passes: int | None = None
    prune_isolated_pixels: bool = False

    def __post_init__(self):
        if self.hue_bins < 1:
            raise ValueError("hue_bins must be >= 1")
        if self.gray_bins < 1:
            raise ValueError("gray_bins must be >= 1")
        if not 0.0 < self.min_region_fraction < 1.0:
            raise ValueError("min_region_fraction must be in (0, 1)")


@dataclass
class PipelineResult:
    """The four staged artifacts of one pipeline run."""

    initial_segments: LabelMap
    merged_segments: LabelMap
    silhouette: BinaryMask
    skeleton: Skeleton
