"""Synthetic scenes and naive reference oracles.

Everything here is deliberately independent of the imaging module's
implementation: components are counted by plain flood fill, the reference
merger recomputes every step from scratch, and scene ground truth comes from
the generator's own geometry. A bug shared with the production code cannot
validate itself through these.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .imaging.silhouette import is_background_region
from .imaging.types import (
    BinaryMask,
    LabelMap,
    PipelineConfig,
    RasterImage,
    RegionStats,
)


class InvalidSpecError(ValidationError):
    """Stick figure spec violates its constraints."""


@dataclass(frozen=True)
class Stroke:
    """A thick line segment: endpoints in pixel coordinates, stroke width >= 3."""

    start: tuple[float, float]
    end: tuple[float, float]
    width: float


@dataclass
class StickFigureSpec:
    """Synthetic scene: a torso stroke plus limb strokes on a near-white canvas."""

    torso: Stroke
    limbs: list[Stroke]
    fill_color: tuple[int, int, int] = (40, 40, 150)
    canvas_width: int = 352
    canvas_height: int = 288
    background: tuple[int, int, int] = (250, 250, 250)
    noise: int = 0

    @property
    def strokes(self) -> list[Stroke]:
        return [self.torso, *self.limbs]

    def validate(self) -> None:
        if not 0 <= self.noise <= 20:
            raise InvalidSpecError("noise amplitude must be within 0..20")
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise InvalidSpecError("canvas must be non-empty")
        for s in self.strokes:
            if s.width < 3:
                raise InvalidSpecError("stroke width must be >= 3")
            for x, y in (s.start, s.end):
                if not (0 <= x < self.canvas_width and 0 <= y < self.canvas_height):
                    raise InvalidSpecError("stroke endpoints must lie within the canvas")
        if is_background_region(tuple(float(c) for c in self.fill_color), PipelineConfig()):
            raise InvalidSpecError("fill color must fail the near-white background test")
        if not is_background_region(
            tuple(float(c) for c in self.background), PipelineConfig()
        ):
            raise InvalidSpecError("background color must pass the near-white test")


def bresenham(p0: tuple[float, float], p1: tuple[float, float]) -> list[tuple[int, int]]:
    """Unit-width rasterization of a segment between rounded endpoints."""
    x0, y0 = round(p0[0]), round(p0[1])
    x1, y1 = round(p1[0]), round(p1[1])
    points = []
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        points.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return points
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _paint_capsule(mask: np.ndarray, stroke: Stroke) -> None:
    """Mark pixels whose centers lie within width/2 of the stroke segment."""
    h, w = mask.shape
    (x0, y0), (x1, y1) = stroke.start, stroke.end
    r = stroke.width / 2.0
    lo_x = max(0, int(math.floor(min(x0, x1) - r - 1)))
    hi_x = min(w, int(math.ceil(max(x0, x1) + r + 2)))
    lo_y = max(0, int(math.floor(min(y0, y1) - r - 1)))
    hi_y = min(h, int(math.ceil(max(y0, y1) + r + 2)))
    yy, xx = np.mgrid[lo_y:hi_y, lo_x:hi_x]
    dx, dy = x1 - x0, y1 - y0
    length2 = max(dx * dx + dy * dy, 1e-12)
    t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / length2, 0.0, 1.0)
    px, py = x0 + t * dx, y0 + t * dy
    mask[lo_y:hi_y, lo_x:hi_x] |= (xx - px) ** 2 + (yy - py) ** 2 <= r * r


def gen_scene(spec: StickFigureSpec, seed: int) -> tuple[RasterImage, set[tuple[int, int]]]:
    """Render the spec deterministically; returns the image and the medial
    ground truth (union of the stroke centerlines at unit width)."""
    spec.validate()
    h, w = spec.canvas_height, spec.canvas_width
    figure = np.zeros((h, w), dtype=bool)
    truth: set[tuple[int, int]] = set()
    for stroke in spec.strokes:
        _paint_capsule(figure, stroke)
        truth.update(bresenham(stroke.start, stroke.end))
    pixels = np.empty((h, w, 3), dtype=np.float64)
    pixels[:] = spec.background
    pixels[figure] = spec.fill_color
    if spec.noise > 0:
        rng = np.random.default_rng(seed)
        pixels += rng.integers(-spec.noise, spec.noise + 1, size=(h, w, 3))
    img = RasterImage.from_array(np.clip(pixels, 0, 255).astype(np.uint8))
    return img, truth


def random_figure_spec(
    rng: np.random.Generator,
    *,
    stroke_width: float = 7.0,
    canvas: tuple[int, int] = (352, 288),
) -> StickFigureSpec:
    """Random infant-like stick figure: one torso with arms attached at an
    interior shoulder point and legs at the hip, junction angles kept wide
    enough that the medial axis tracks the stroke centerlines."""
    W, H = canvas
    while True:
        ang = math.pi / 2 + rng.uniform(-0.25, 0.25)
        cx = rng.uniform(W * 0.40, W * 0.60)
        cy = rng.uniform(H * 0.22, H * 0.34)
        tl = rng.uniform(105, 145)
        hx, hy = cx + tl * math.cos(ang), cy + tl * math.sin(ang)
        st = rng.uniform(0.22, 0.32)
        sx, sy = cx + st * tl * math.cos(ang), cy + st * tl * math.sin(ang)
        strokes = [Stroke((cx, cy), (hx, hy), stroke_width)]
        for side in (-1, 1):
            a = ang + side * rng.uniform(math.radians(80), math.radians(100))
            arm = rng.uniform(55, 85)
            strokes.append(
                Stroke((sx, sy), (sx + arm * math.cos(a), sy + arm * math.sin(a)), stroke_width)
            )
        for side in (-1, 1):
            a = ang + side * rng.uniform(math.radians(35), math.radians(50))
            leg = rng.uniform(60, 95)
            strokes.append(
                Stroke((hx, hy), (hx + leg * math.cos(a), hy + leg * math.sin(a)), stroke_width)
            )
        margin = stroke_width / 2 + 3
        if all(
            margin <= x < W - margin and margin <= y < H - margin
            for s in strokes
            for x, y in (s.start, s.end)
        ):
            return StickFigureSpec(
                torso=strokes[0],
                limbs=strokes[1:],
                canvas_width=W,
                canvas_height=H,
            )


def oracle_components(mask: BinaryMask, connectivity: int) -> int:
    """Exhaustive flood-fill component count; shares nothing with imaging."""
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    bits = mask.bits
    h, w = bits.shape
    if connectivity == 4:
        offsets = ((1, 0), (-1, 0), (0, 1), (0, -1))
    else:
        offsets = (
            (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1),
        )
    seen = np.zeros((h, w), dtype=bool)
    count = 0
    for y in range(h):
        for x in range(w):
            if bits[y, x] and not seen[y, x]:
                count += 1
                queue = deque([(y, x)])
                seen[y, x] = True
                while queue:
                    cy, cx = queue.popleft()
                    for dy, dx in offsets:
                        ny, nx = cy + dy, cx + dx
                        if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            queue.append((ny, nx))
    return count


def _background_components(mask: BinaryMask) -> int:
    """4-components of the complement, with the unbounded outside counted as
    background (one-pixel padding ring)."""
    padded = np.pad(~mask.bits, 1, constant_values=True)
    return oracle_components(BinaryMask.from_array(padded), 4)


def _endpoints(bits: np.ndarray) -> list[tuple[int, int]]:
    h, w = bits.shape
    out = []
    for y in range(h):
        for x in range(w):
            if not bits[y, x]:
                continue
            n = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and bits[ny, nx]:
                        n += 1
            if n == 1:
                out.append((y, x))
    return out


def _contains_2x2(bits: np.ndarray) -> bool:
    h, w = bits.shape
    for y in range(h - 1):
        for x in range(w - 1):
            if bits[y, x] and bits[y + 1, x] and bits[y, x + 1] and bits[y + 1, x + 1]:
                return True
    return False


def check_thinning_invariants(inp: BinaryMask, out: BinaryMask) -> list[str]:
    """Certify a thinning run; returns the violated invariant names
    (empty list = pass).

    Checks: output is a subset of the input, contains no 2x2 all-foreground
    block, preserves the 8-connected foreground and 4-connected background
    component counts, and, when the input is already unit width, keeps every
    arc endpoint.
    """
    if inp.bits.shape != out.bits.shape:
        raise ValueError("input and output dimensions differ")
    violations = []
    if bool((out.bits & ~inp.bits).any()):
        violations.append("subset")
    if _contains_2x2(out.bits):
        violations.append("thinness")
    if oracle_components(inp, 8) != oracle_components(out, 8):
        violations.append("foreground-components")
    if _background_components(inp) != _background_components(out):
        violations.append("background-components")
    if not _contains_2x2(inp.bits):
        for y, x in _endpoints(inp.bits):
            if not out.bits[y, x]:
                violations.append("endpoint-preservation")
                break
    return violations


def reference_merge(lm: LabelMap, cfg: PipelineConfig | None = None) -> LabelMap:
    """Brute-force reference for merge_small_regions: every step rescans the
    whole map with plain loops. Same rule, independent machinery."""
    cfg = cfg or PipelineConfig()
    h, w = lm.height, lm.width
    threshold = cfg.min_region_fraction * w * h
    grid = [[int(lm.labels[y, x]) for x in range(w)] for y in range(h)]
    areas = {i: r.area for i, r in enumerate(lm.regions)}
    sums = {
        i: [c * r.area for c in r.mean_color] for i, r in enumerate(lm.regions)
    }

    while len(areas) > 1:
        below = sorted(
            (a, i) for i, a in areas.items() if a < threshold
        )
        if not below:
            break
        _, cid = below[0]
        counts: dict[int, int] = {}
        for y in range(h):
            for x in range(w):
                if grid[y][x] != cid:
                    continue
                for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and grid[ny][nx] != cid:
                        counts[grid[ny][nx]] = counts.get(grid[ny][nx], 0) + 1
        nid = sorted(counts, key=lambda i: (-counts[i], -areas[i], i))[0]
        for y in range(h):
            for x in range(w):
                if grid[y][x] == cid:
                    grid[y][x] = nid
        areas[nid] += areas.pop(cid)
        sums[nid] = [a + b for a, b in zip(sums[nid], sums.pop(cid))]

    order: list[int] = []
    remap: dict[int, int] = {}
    for y in range(h):
        for x in range(w):
            lid = grid[y][x]
            if lid not in remap:
                remap[lid] = len(order)
                order.append(lid)
    labels = np.array(
        [[remap[grid[y][x]] for x in range(w)] for y in range(h)], dtype=np.int32
    )
    regions = []
    for new_id, old in enumerate(order):
        perimeter = 0
        touches = False
        for y in range(h):
            for x in range(w):
                if labels[y, x] != new_id:
                    continue
                if y in (0, h - 1) or x in (0, w - 1):
                    touches = True
                    boundary = True
                else:
                    boundary = False
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            if dy == 0 and dx == 0:
                                continue
                            if labels[y + dy, x + dx] != new_id:
                                boundary = True
                if boundary:
                    perimeter += 1
        regions.append(
            RegionStats(
                area=areas[old],
                mean_color=tuple(c / areas[old] for c in sums[old]),
                perimeter=perimeter,
                touches_border=touches,
            )
        )
    return LabelMap(width=w, height=h, labels=labels, regions=regions)


def symmetric_hausdorff(
    a: set[tuple[int, int]] | list[tuple[int, int]],
    b: set[tuple[int, int]] | list[tuple[int, int]],
) -> float:
    """max(directed Hausdorff a->b, b->a) over Euclidean pixel distance."""
    pa = np.array(sorted(a), dtype=np.float64)
    pb = np.array(sorted(b), dtype=np.float64)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("point sets must be non-empty")
    d2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=-1)
    return float(max(np.sqrt(d2.min(axis=1).max()), np.sqrt(d2.min(axis=0).max())))


def random_blob_mask(rng: np.random.Generator, max_size: int = 64) -> BinaryMask:
    """Random silhouette-like mask: unions of disks, boxes, capsule strokes,
    an occasional ring, or sparse speckle."""
    h = int(rng.integers(4, max_size + 1))
    w = int(rng.integers(4, max_size + 1))
    bits = np.zeros((h, w), dtype=bool)
    yy, xx = np.mgrid[0:h, 0:w]
    kind = int(rng.integers(0, 5))
    if kind == 0:
        for _ in range(int(rng.integers(1, 5))):
            cy, cx = int(rng.integers(0, h)), int(rng.integers(0, w))
            r = int(rng.integers(2, 13))
            bits |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    elif kind == 1:
        for _ in range(int(rng.integers(1, 5))):
            y0, x0 = int(rng.integers(0, h)), int(rng.integers(0, w))
            y1 = min(h, y0 + int(rng.integers(2, 20)))
            x1 = min(w, x0 + int(rng.integers(2, 20)))
            bits[y0:y1, x0:x1] = True
    elif kind == 2:
        mask2 = np.zeros((h, w), dtype=bool)
        for _ in range(int(rng.integers(1, 5))):
            p0 = (float(rng.uniform(0, w)), float(rng.uniform(0, h)))
            p1 = (float(rng.uniform(0, w)), float(rng.uniform(0, h)))
            _paint_capsule(mask2, Stroke(p0, p1, float(rng.integers(3, 11))))
        bits = mask2
    elif kind == 3:
        cy, cx = h // 2, w // 2
        r = int(rng.integers(3, max(4, min(h, w) // 2 + 1)))
        r2 = max(1, r - int(rng.integers(2, max(3, r))))
        bits |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        bits &= (yy - cy) ** 2 + (xx - cx) ** 2 > r2 * r2
    else:
        bits = rng.random((h, w)) < float(rng.uniform(0.02, 0.15))
    return BinaryMask.from_array(bits)
