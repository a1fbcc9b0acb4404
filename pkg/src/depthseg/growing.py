"""Adaptive region growing inside a depth interval's pixel mask.

Objects that share one depth band are pulled apart spatially. A seed
lands where the mask's row and column densities peak, the growth
threshold is read off the band's histogram as the larger gap between
the seed's bin and its two neighbors, and a breadth-first flood fill
then accepts any neighbor pixel whose depth differs from the frontier
pixel it was reached from by at most that threshold. The acceptance
test is local to the frontier, so a grown region can drift across many
small depth steps but never jumps a gap wider than the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import DepthFrame, PixelMask, Rect
from .histogram import DepthHistogram

# neighbor scan order: N, E, S, W, then diagonals NE, SE, SW, NW
_OFFSETS_4 = ((-1, 0), (0, 1), (1, 0), (0, -1))
_OFFSETS_8 = _OFFSETS_4 + ((-1, 1), (1, 1), (1, -1), (-1, -1))


@dataclass(frozen=True)
class Seed:
    """Starting pixel of one growth pass; depth is the frame value there."""

    x: int
    y: int
    depth: int


@dataclass(frozen=True)
class GrowthParams:
    connectivity: int = 4
    min_region_pixels: int = 200
    max_seeds: int = 8

    def __post_init__(self):
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if self.min_region_pixels < 0:
            raise ValueError("min_region_pixels must be >= 0")
        if self.max_seeds < 1:
            raise ValueError("max_seeds must be >= 1")


@dataclass(frozen=True, eq=False)
class GrownRegion:
    """Connected pixel set produced by one growth pass."""

    mask: PixelMask
    bbox: Rect
    pixel_count: int
    mean_depth: float
    seed: Seed
    threshold_used: int


def find_seed(mask: PixelMask, frame: DepthFrame) -> Seed:
    """Locate the highest-density position of a mask.

    Row and column pixel counts are scanned separately; their argmax
    row r* and column c* (smallest index on ties) intersect at the
    candidate position. When (c*, r*) itself is outside the mask, the
    mask pixel nearest to it by L1 distance is returned instead,
    breaking ties toward the smallest (y, x).
    """
    if mask.is_empty:
        raise ValueError("cannot seed an empty mask")
    bits = mask.bits
    r_star = int(np.argmax(bits.sum(axis=1)))
    c_star = int(np.argmax(bits.sum(axis=0)))
    if bits[r_star, c_star]:
        return Seed(c_star, r_star, int(frame.data[r_star, c_star]))
    ys, xs = np.nonzero(bits)  # row-major order makes argmin ties (y, x)-lexicographic
    nearest = int(np.argmin(np.abs(ys - r_star) + np.abs(xs - c_star)))
    x, y = int(xs[nearest]), int(ys[nearest])
    return Seed(x, y, int(frame.data[y, x]))


def adaptive_threshold(hist: DepthHistogram, seed_depth: int) -> int:
    """Growth threshold at a seed: the larger adjacent bin gap, in mm.

    One-sided when the seed sits on the first or last bin; floored at
    1 mm so a seed inside a densely populated band can still grow.
    """
    i = hist.index_of(seed_depth)
    gaps = []
    if i + 1 < len(hist):
        gaps.append(int(hist.values[i + 1] - hist.values[i]))
    if i > 0:
        gaps.append(int(hist.values[i] - hist.values[i - 1]))
    return max(1, max(gaps)) if gaps else 1


def similarity(a: int, b: int) -> int:
    """Depth similarity between two pixels: absolute difference in mm."""
    return abs(a - b)


def grow_region(
    frame: DepthFrame,
    roi: PixelMask,
    seed: Seed,
    threshold: int,
    params: GrowthParams | None = None,
) -> GrownRegion:
    """Flood-fill from the seed, bounded by the ROI and the threshold.

    Breadth-first over the configured connectivity; a neighbor is
    accepted when its depth differs from the frontier pixel by at most
    ``threshold`` mm. Each pixel is expanded once; the result is the
    full reachable set and does not depend on scan order. Zero-depth
    pixels never grow.
    """
    params = params or GrowthParams()
    h, w = frame.data.shape
    if roi.bits.shape != (h, w):
        raise ValueError("ROI dimensions do not match the frame")
    if not (0 <= seed.x < w and 0 <= seed.y < h) or not roi.bits[seed.y, seed.x]:
        raise ValueError(f"seed ({seed.x}, {seed.y}) lies outside the ROI")
    depth = frame.data.reshape(-1).astype(np.int32)
    growable = roi.bits.reshape(-1) & (depth > 0)
    start = seed.y * w + seed.x
    if not growable[start]:
        raise ValueError("seed pixel has no valid depth measurement")

    offsets = _OFFSETS_4 if params.connectivity == 4 else _OFFSETS_8
    accepted = np.zeros(h * w, dtype=bool)
    accepted[start] = True
    frontier = np.array([start], dtype=np.intp)
    while frontier.size:
        xs = frontier % w
        ys = frontier // w
        level = []
        for dy, dx in offsets:
            ok = np.ones(frontier.shape, dtype=bool)
            if dx == 1:
                ok &= xs < w - 1
            elif dx == -1:
                ok &= xs > 0
            if dy == 1:
                ok &= ys < h - 1
            elif dy == -1:
                ok &= ys > 0
            p = frontier[ok]
            q = p + dy * w + dx
            take = growable[q] & ~accepted[q]
            take &= np.abs(depth[q] - depth[p]) <= threshold
            q = q[take]
            accepted[q] = True
            level.append(q)
        frontier = np.concatenate(level)

    bits = accepted.reshape(h, w)
    mask = PixelMask(bits)
    return GrownRegion(
        mask=mask,
        bbox=mask.bbox(),
        pixel_count=mask.count,
        mean_depth=float(frame.data[bits].mean()),
        seed=seed,
        threshold_used=int(threshold),
    )


def segment_objects(
    frame: DepthFrame,
    roi: PixelMask,
    hist: DepthHistogram,
    params: GrowthParams | None = None,
) -> list[GrownRegion]:
    """Extract objects from one ROI by seeding, growing, and subtracting.

    Repeats find_seed / adaptive_threshold / grow_region on the
    residual mask, removing each grown region, until the residual falls
    below ``min_region_pixels`` or ``max_seeds`` passes ran. Regions
    smaller than ``min_region_pixels`` are discarded but still removed
    from the residual. ``hist`` should be the histogram of the ROI's
    own depth band so the threshold reflects local bin gaps.
    """
    params = params or GrowthParams()
    if roi.is_empty:
        raise ValueError("ROI is empty")
    residual = roi.bits.copy()
    regions: list[GrownRegion] = []
    for _ in range(params.max_seeds):
        remaining = int(residual.sum())
        if remaining == 0 or remaining < params.min_region_pixels:
            break
        seed = find_seed(PixelMask(residual), frame)
        threshold = adaptive_threshold(hist, seed.depth)
        region = grow_region(frame, PixelMask(residual), seed, threshold, params)
        residual &= ~region.mask.bits
        if region.pixel_count >= params.min_region_pixels:
            regions.append(region)
    return regions
