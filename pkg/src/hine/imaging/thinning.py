"""Safe-point border peeling that reduces a silhouette to a unit-width skeleton.

Each pass visits the four edge-point classes (left, right, top, bottom) in a
fixed order and deletes, simultaneously within a class, every edge point whose
8-neighbourhood fails the safe-point test. Safe points are those whose removal
would locally break connectivity or shorten a unit-width arc, expressed as
boolean conditions over the neighbours

    n3 n2 n1
    n4  p n0
    n5 n6 n7

A left edge point (n4 background) is deleted iff
    n0 & (n1|n2|n6|n7) & (n2|~n3) & (n6|~n5)
and the other three classes follow by rotation. Peeling stops when a full
pass deletes nothing.

Peeling alone can leave a 2x2 block pinned into place by diagonal neighbours
whose only connection runs through the block. Those blocks are broken
afterwards by single topology-safe deletions: first a block pixel whose
Yokoi connectivity number is 1, then an arc endpoint next to the block, then
the endpoint nearest to the block within its component. Deleting an endpoint
(exactly one dark neighbour) can never change a component count, so the
resolution phase preserves the same topology guarantees as the peeling. A
block whose pins all lead into cycles is left in place: connectivity wins
over unit width there.
"""

from __future__ import annotations

import numpy as np

from .segmentation import label_components
from .types import BinaryMask, Skeleton

PASS_ORDER = ("left", "right", "top", "bottom")


def _shifted(a: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """out[y, x] = a[y + dy, x + dx], False outside the array."""
    h, w = a.shape
    out = np.zeros_like(a)
    ys = slice(max(0, dy), h + min(0, dy))
    xs = slice(max(0, dx), w + min(0, dx))
    out[slice(max(0, -dy), h + min(0, -dy)), slice(max(0, -dx), w + min(0, -dx))] = a[ys, xs]
    return out


def _neighbours(a: np.ndarray):
    return (
        _shifted(a, 1, 0),    # n0 E
        _shifted(a, 1, -1),   # n1 NE
        _shifted(a, 0, -1),   # n2 N
        _shifted(a, -1, -1),  # n3 NW
        _shifted(a, -1, 0),   # n4 W
        _shifted(a, -1, 1),   # n5 SW
        _shifted(a, 0, 1),    # n6 S
        _shifted(a, 1, 1),    # n7 SE
    )


def _peel_pass(a: np.ndarray, order: tuple[str, ...]) -> bool:
    deleted = False
    for direction in order:
        n0, n1, n2, n3, n4, n5, n6, n7 = _neighbours(a)
        if direction == "left":
            edge = a & ~n4
            cond = n0 & (n1 | n2 | n6 | n7) & (n2 | ~n3) & (n6 | ~n5)
        elif direction == "right":
            edge = a & ~n0
            cond = n4 & (n5 | n6 | n2 | n3) & (n6 | ~n7) & (n2 | ~n1)
        elif direction == "top":
            edge = a & ~n2
            cond = n6 & (n7 | n0 | n4 | n5) & (n0 | ~n1) & (n4 | ~n3)
        elif direction == "bottom":
            edge = a & ~n6
            cond = n2 & (n3 | n4 | n0 | n1) & (n4 | ~n5) & (n0 | ~n7)
        else:
            raise ValueError(f"unknown pass direction {direction!r}")
        kill = edge & cond
        if kill.any():
            a &= ~kill
            deleted = True
    return deleted


def _ring(a: np.ndarray, y: int, x: int) -> tuple[bool, ...]:
    h, w = a.shape

    def at(yy, xx):
        return bool(a[yy, xx]) if 0 <= yy < h and 0 <= xx < w else False

    return (
        at(y, x + 1), at(y - 1, x + 1), at(y - 1, x), at(y - 1, x - 1),
        at(y, x - 1), at(y + 1, x - 1), at(y + 1, x), at(y + 1, x + 1),
    )


def _is_simple(a: np.ndarray, y: int, x: int) -> bool:
    """Yokoi connectivity number == 1 under 8-foreground / 4-background."""
    n = _ring(a, y, x)
    c = 0
    for k in (0, 2, 4, 6):
        white_k = not n[k]
        c += white_k - (white_k and not n[(k + 1) % 8] and not n[(k + 2) % 8])
    return c == 1


def _neighbour_count(a: np.ndarray, y: int, x: int) -> int:
    return sum(_ring(a, y, x))


def _block_pixels(a: np.ndarray) -> list[tuple[int, int]]:
    blk = a[:-1, :-1] & a[1:, :-1] & a[:-1, 1:] & a[1:, 1:]
    ys, xs = np.nonzero(blk)
    pix = set()
    for y, x in zip(ys.tolist(), xs.tolist()):
        pix.update(((y, x), (y + 1, x), (y, x + 1), (y + 1, x + 1)))
    return sorted(pix)


def _resolve_block_pixel(a: np.ndarray) -> bool:
    """Delete one pixel, topology-safely, to break up a remaining 2x2 block."""
    pix = _block_pixels(a)
    if not pix:
        return False
    for y, x in pix:
        if _is_simple(a, y, x):
            a[y, x] = False
            return True
    blockset = set(pix)
    adjacent_endpoints = []
    for y, x in pix:
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                yy, xx = y + dy, x + dx
                if (yy, xx) in blockset:
                    continue
                if 0 <= yy < a.shape[0] and 0 <= xx < a.shape[1] and a[yy, xx]:
                    if _neighbour_count(a, yy, xx) == 1:
                        adjacent_endpoints.append((yy, xx))
    if adjacent_endpoints:
        y, x = min(adjacent_endpoints)
        a[y, x] = False
        return True
    labels, _ = label_components(a, connectivity=8)
    block_labels = {int(labels[y, x]) for y, x in pix}
    best = None
    ys, xs = np.nonzero(a)
    for y, x in zip(ys.tolist(), xs.tolist()):
        if int(labels[y, x]) in block_labels and _neighbour_count(a, y, x) == 1:
            d = min(max(abs(y - by), abs(x - bx)) for by, bx in pix)
            key = (d, y, x)
            if best is None or key < best:
                best = key
    if best is not None:
        a[best[1], best[2]] = False
        return True
    return False


def has_2x2_block(bits: np.ndarray) -> bool:
    if bits.shape[0] < 2 or bits.shape[1] < 2:
        return False
    return bool((bits[:-1, :-1] & bits[1:, :-1] & bits[:-1, 1:] & bits[1:, 1:]).any())


def thin(
    mask: BinaryMask,
    *,
    max_passes: int | None = None,
    prune_isolated: bool = False,
    pass_order: tuple[str, ...] = PASS_ORDER,
) -> Skeleton:
    """Thin a mask to a unit-width skeleton preserving its topology.

    max_passes caps the number of peeling passes (None = run to fixpoint);
    prune_isolated removes single isolated pixels from the result, which
    intentionally drops their components.
    """
    a = mask.bits.copy()
    passes = 0
    while True:
        while _peel_pass(a, pass_order):
            passes += 1
            if max_passes is not None and passes >= max_passes:
                break
        if max_passes is not None and passes >= max_passes:
            break
        if not has_2x2_block(a):
            break
        if not _resolve_block_pixel(a):
            break
    if prune_isolated and a.any():
        n = _neighbours(a)
        isolated = a & ~(n[0] | n[1] | n[2] | n[3] | n[4] | n[5] | n[6] | n[7])
        a &= ~isolated
    return Skeleton(width=mask.width, height=mask.height, bits=a)
