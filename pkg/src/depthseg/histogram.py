"""Histogram-of-depth segmentation.

The nonzero depth values of a frame form a sparse histogram: ascending
distinct millimeter values paired with their pixel counts. Bins whose
count strictly exceeds both neighbors are peaks. Whenever two
consecutive peaks sit further apart than a configured body span, the
histogram is cut inside the widest depth gap between them and the
procedure recurses on each side; a side stops splitting once it holds
fewer than two peaks or its peak span drops below the body span. Each
resulting index range is widened by half a body span per side, snapped
back to the shallowest bin inside the widened margin, and materialized
as a pixel mask (region of interest).

Bins are the raw distinct values, never re-binned: the adaptive growth
threshold downstream consumes the exact gaps between neighboring bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistogramError
from .frames import DepthFrame, PixelMask

IndexRange = tuple[int, int]


@dataclass(frozen=True)
class SegmentationParams:
    """Tuning knobs for histogram splitting.

    ``body_span_mm`` is the expected near-to-far extent of one human
    body (default 400 mm); ``min_region_pixels`` is the smallest ROI
    worth segmenting further.
    """

    body_span_mm: int = 400
    min_region_pixels: int = 200

    def __post_init__(self):
        if self.body_span_mm <= 0:
            raise ValueError("body_span_mm must be positive")
        if self.min_region_pixels < 0:
            raise ValueError("min_region_pixels must be >= 0")


@dataclass(frozen=True, eq=False)
class DepthHistogram:
    """Sparse histogram: strictly ascending depth values with counts."""

    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values).astype(np.int64, copy=True)
        counts = np.asarray(self.counts).astype(np.int64, copy=True)
        if values.ndim != 1 or counts.ndim != 1 or len(values) != len(counts):
            raise ValueError("values and counts must be 1-D arrays of equal length")
        if len(values) == 0:
            raise ValueError("histogram must have at least one bin")
        if np.any(np.diff(values) <= 0):
            raise ValueError("values must be strictly ascending")
        if np.any(counts < 1):
            raise ValueError("every count must be >= 1")
        values.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index_of(self, depth: int) -> int:
        """Bin index of an exact depth value; raises if absent."""
        i = int(np.searchsorted(self.values, depth))
        if i >= len(self.values) or self.values[i] != depth:
            raise ValueError(f"depth {depth} mm is not a bin of this histogram")
        return i

    def slice_to(self, interval: DepthInterval) -> DepthHistogram:
        """Restrict to the bins whose value lies inside the interval."""
        lo = int(np.searchsorted(self.values, interval.lo, side="left"))
        hi = int(np.searchsorted(self.values, interval.hi, side="right"))
        if lo >= hi:
            raise ValueError(f"interval {interval} contains no histogram bins")
        return DepthHistogram(self.values[lo:hi], self.counts[lo:hi])


@dataclass(frozen=True, eq=False)
class PeakSet:
    """Ascending bin indices whose count beats both neighbors strictly."""

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices).astype(np.int64, copy=True)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(int(i) for i in self.indices)


@dataclass(frozen=True)
class DepthInterval:
    """Inclusive [lo, hi] depth band in millimeters."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lo {self.lo} exceeds hi {self.hi}")

    def contains(self, depth: int) -> bool:
        return self.lo <= depth <= self.hi


def build_histogram(frame: DepthFrame) -> DepthHistogram:
    """Histogram the frame's nonzero depth values.

    Raises EmptyHistogramError when the frame carries no valid pixel.
    """
    values, counts = np.unique(frame.data[frame.data > 0], return_counts=True)
    if len(values) == 0:
        raise EmptyHistogramError("empty histogram: frame has no valid depth pixels")
    return DepthHistogram(values.astype(np.int64), counts)


def detect_peaks(hist: DepthHistogram, lo_idx: int = 0, hi_idx: int | None = None) -> PeakSet:
    """Peaks inside [lo_idx, hi_idx]; range endpoints are never peaks."""
    n = len(hist)
    if hi_idx is None:
        hi_idx = n - 1
    if not (0 <= lo_idx <= hi_idx < n):
        raise ValueError(f"bad index range [{lo_idx}, {hi_idx}] for {n} bins")
    if hi_idx - lo_idx < 2:
        return PeakSet(np.empty(0, dtype=np.int64))
    y = hist.counts[lo_idx : hi_idx + 1]
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    return PeakSet(lo_idx + 1 + np.nonzero(interior)[0])


def _first_cut(hist: DepthHistogram, lo: int, hi: int, span_mm: int) -> int | None:
    """Index at which [lo, hi] splits, or None when it is final.

    A range is final when it holds fewer than two peaks, when its
    peak-to-peak span is below ``span_mm``, or when no consecutive peak
    pair is further apart than ``span_mm``. Otherwise the cut opens at
    the widest value gap between consecutive bins of the first
    over-distant peak pair (leftmost gap on ties): depth stretches with
    no pixels at all are the natural valleys of a sparse histogram.
    The bin on the gap's far side starts the right part.
    """
    peaks = detect_peaks(hist, lo, hi).indices
    if len(peaks) < 2:
        return None
    if hist.values[peaks[-1]] - hist.values[peaks[0]] < span_mm:
        return None
    for a, b in zip(peaks[:-1], peaks[1:]):
        if hist.values[b] - hist.values[a] > span_mm:
            gaps = np.diff(hist.values[a : b + 1])
            return int(a + 1 + np.argmax(gaps))
    return None


def split_regions(hist: DepthHistogram, params: SegmentationParams) -> list[IndexRange]:
    """Recursively split the histogram into ordered depth regions.

    Returns disjoint (lo, hi) index ranges covering the whole
    histogram in order. Every returned range holds at least one peak,
    except when the whole histogram collapses into a single peakless
    range; peakless remainders produced by the recursion are merged
    into the neighboring region whose nearest peak is closest in depth
    (ties merge left).
    """
    ranges: list[IndexRange] = []
    stack: list[IndexRange] = [(0, len(hist) - 1)]
    while stack:
        lo, hi = stack.pop()
        cut = _first_cut(hist, lo, hi, params.body_span_mm)
        if cut is None:
            ranges.append((lo, hi))
        else:
            stack.append((cut, hi))
            stack.append((lo, cut - 1))
    ranges.sort()
    return _merge_peakless(hist, ranges)


def _merge_peakless(hist: DepthHistogram, ranges: list[IndexRange]) -> list[IndexRange]:
    if len(ranges) <= 1:
        return ranges
    peaks = [detect_peaks(hist, lo, hi).indices for lo, hi in ranges]
    anchored = [i for i, p in enumerate(peaks) if len(p) > 0]
    if not anchored:
        return [(ranges[0][0], ranges[-1][1])]
    # Pick a side for each peakless range: compare the depth distance
    # from its boundaries to the nearest peak of the closest peaked
    # region on either side.
    target = list(range(len(ranges)))
    for i, p in enumerate(peaks):
        if len(p) > 0:
            continue
        left = max((j for j in anchored if j < i), default=None)
        right = min((j for j in anchored if j > i), default=None)
        if left is None:
            target[i] = right
        elif right is None:
            target[i] = left
        else:
            lo, hi = ranges[i]
            d_left = hist.values[lo] - hist.values[peaks[left][-1]]
            d_right = hist.values[peaks[right][0]] - hist.values[hi]
            target[i] = left if d_left <= d_right else right
    merged: dict[int, IndexRange] = {}
    for i, rng in enumerate(ranges):
        k = target[i]
        if k in merged:
            lo, hi = merged[k]
            merged[k] = (min(lo, rng[0]), max(hi, rng[1]))
        else:
            merged[k] = rng
    return [merged[k] for k in sorted(merged)]


def widen_and_snap(
    hist: DepthHistogram, region: IndexRange, params: SegmentationParams
) -> DepthInterval:
    """Widen a region by half a body span per side, then snap to valleys.

    Each boundary moves outward by ``body_span_mm / 2`` (clamped to the
    histogram extent) and is then pulled back to the lowest-count bin
    inside that widened margin, breaking count ties toward the original
    boundary. The result is an inclusive depth interval in mm.
    """
    lo_i, hi_i = region
    half = params.body_span_mm / 2
    values, counts = hist.values, hist.counts

    lo_start = int(np.searchsorted(values, values[lo_i] - half, side="left"))
    lo_margin = counts[lo_start : lo_i + 1]
    # scan outward from the boundary so argmin's first hit is the nearest tie
    k = int(np.argmin(lo_margin[::-1]))
    snapped_lo = int(values[lo_i - k])

    hi_end = int(np.searchsorted(values, values[hi_i] + half, side="right")) - 1
    hi_margin = counts[hi_i : hi_end + 1]
    k = int(np.argmin(hi_margin))
    snapped_hi = int(values[hi_i + k])

    return DepthInterval(snapped_lo, snapped_hi)


def extract_roi(frame: DepthFrame, interval: DepthInterval) -> PixelMask:
    """Mask of pixels whose depth falls inside the interval; zeros stay out."""
    data = frame.data
    bits = (data >= interval.lo) & (data <= interval.hi) & (data > 0)
    return PixelMask(bits)
