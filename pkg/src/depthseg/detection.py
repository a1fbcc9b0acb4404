"""Human-body classification by bounding-box geometry, and driver lookup.

A grown region is a body candidate when its bounding-box aspect ratio
(height over width) and its pixel share of the frame both fall inside
configured bounds. The driver of an in-car frame is the accepted
candidate with the most pixels; its bounding box becomes the window
for motion tracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoDriverFoundError
from .frames import DepthFrame
from .growing import GrownRegion, GrowthParams, segment_objects
from .histogram import (
    DepthHistogram,
    DepthInterval,
    SegmentationParams,
    build_histogram,
    extract_roi,
    split_regions,
    widen_and_snap,
)


@dataclass(frozen=True)
class DetectorConfig:
    min_aspect: float = 1.0
    max_aspect: float = 4.0
    min_area_frac: float = 0.05
    max_area_frac: float = 0.60

    def __post_init__(self):
        if not (0 < self.min_aspect <= self.max_aspect):
            raise ValueError("need 0 < min_aspect <= max_aspect")
        if not (0 < self.min_area_frac <= self.max_area_frac <= 1):
            raise ValueError("need 0 < min_area_frac <= max_area_frac <= 1")


@dataclass(frozen=True, eq=False)
class BodyCandidate:
    region: GrownRegion
    aspect: float
    area_frac: float
    is_human: bool


@dataclass(frozen=True, eq=False)
class FrameSegmentation:
    """Everything the depth pipeline produced for one frame."""

    histogram: DepthHistogram
    intervals: list[DepthInterval]
    regions: list[GrownRegion]
    region_interval: list[int] = field(default_factory=list)  # parallel to regions


def classify_regions(
    regions: list[GrownRegion],
    config: DetectorConfig,
    frame_width: int,
    frame_height: int,
) -> list[BodyCandidate]:
    """Score every region; order is preserved and nothing is dropped."""
    frame_pixels = frame_width * frame_height
    out = []
    for region in regions:
        aspect = region.bbox.h / region.bbox.w
        area_frac = region.pixel_count / frame_pixels
        is_human = (
            config.min_aspect <= aspect <= config.max_aspect
            and config.min_area_frac <= area_frac <= config.max_area_frac
        )
        out.append(BodyCandidate(region, aspect, area_frac, is_human))
    return out


def segment_frame(
    frame: DepthFrame,
    seg_params: SegmentationParams | None = None,
    growth_params: GrowthParams | None = None,
) -> FrameSegmentation:
    """Run histogram -> split -> snap -> ROI -> region growing on a frame.

    ROIs whose mask holds fewer than ``seg_params.min_region_pixels``
    pixels are skipped. Each ROI is grown against the histogram slice
    of its own interval, so growth thresholds reflect the band's local
    bin gaps.
    """
    seg_params = seg_params or SegmentationParams()
    growth_params = growth_params or GrowthParams()
    hist = build_histogram(frame)
    intervals = [
        widen_and_snap(hist, rng, seg_params)
        for rng in split_regions(hist, seg_params)
    ]
    regions: list[GrownRegion] = []
    region_interval: list[int] = []
    for i, interval in enumerate(intervals):
        roi = extract_roi(frame, interval)
        if roi.count < max(seg_params.min_region_pixels, 1):
            continue
        band_hist = hist.slice_to(interval)
        for region in segment_objects(frame, roi, band_hist, growth_params):
            regions.append(region)
            region_interval.append(i)
    return FrameSegmentation(hist, intervals, regions, region_interval)


def select_driver(candidates: list[BodyCandidate]) -> BodyCandidate:
    """Accepted candidate with the most pixels; raises when none passed."""
    accepted = [c for c in candidates if c.is_human]
    if not accepted:
        raise NoDriverFoundError("no driver found: no region passed classification")
    return max(accepted, key=lambda c: c.region.pixel_count)


def locate_driver(
    frame: DepthFrame,
    seg_params: SegmentationParams | None = None,
    growth_params: GrowthParams | None = None,
    detector: DetectorConfig | None = None,
) -> BodyCandidate:
    """Segment the frame and return the driver candidate.

    Raises NoDriverFoundError when no grown region passes the
    classifier.
    """
    detector = detector or DetectorConfig()
    seg = segment_frame(frame, seg_params, growth_params)
    candidates = classify_regions(seg.regions, detector, frame.width, frame.height)
    return select_driver(candidates)
