"""Motion tracking against a reference frame.

Frame 0 of a monitoring session shows the driver in the safe pose; its
bounding box is the tracking window. Every later frame is subtracted
from the reference inside that window, the difference magnitudes are
max-pooled onto a coarse grid to localize change, connected groups of
changed cells become changed areas, and two metrics are computed per
area: its pixel count relative to the driver's reference pixel count
(a percentage) and the mean current depth over its changed pixels. An
alert fires once the total changed percentage stays above a threshold
for a run of consecutive frames.

A pixel only counts as changed when both frames carry a valid
measurement there and the absolute difference exceeds a noise floor;
what finally suppresses isolated speckle is the minimum full-resolution
area required of a connected component (one full grid cell).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .detection import BodyCandidate
from .frames import DepthFrame, PixelMask, Rect, crop, crop_mask


@dataclass(frozen=True)
class TrackerConfig:
    """Differencing, pooling, and alerting knobs (depths in mm)."""

    diff_epsilon: int = 50
    grid_cell: int = 10
    area_alert_pct: float = 10.0
    persistence: int = 5
    gray_clamp: int = 1000

    def __post_init__(self):
        if min(self.diff_epsilon, self.grid_cell, self.persistence) < 1:
            raise ValueError("diff_epsilon, grid_cell, persistence must be >= 1")
        if self.area_alert_pct <= 0:
            raise ValueError("area_alert_pct must be positive")
        if self.gray_clamp <= self.diff_epsilon:
            raise ValueError("gray_clamp must exceed diff_epsilon")


@dataclass(frozen=True, eq=False)
class ReferenceFrame:
    """Safe-pose snapshot: driver window, cropped depth, cropped mask."""

    window: Rect
    depth: DepthFrame
    driver_mask: PixelMask
    a_r: int


@dataclass(frozen=True, eq=False)
class DiffImage:
    """Per-pixel signed depth change (current minus reference), in mm.

    ``valid`` marks pixels measured in both frames; everything else is
    noise and never counts as changed.
    """

    delta: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        delta = np.asarray(self.delta).astype(np.int32, copy=True)
        valid = np.asarray(self.valid).astype(bool, copy=True)
        if delta.shape != valid.shape or delta.ndim != 2:
            raise ValueError("delta and valid must be matching 2-D arrays")
        delta.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "valid", valid)

    @property
    def width(self) -> int:
        return self.delta.shape[1]

    @property
    def height(self) -> int:
        return self.delta.shape[0]

    def changed(self, epsilon: int) -> np.ndarray:
        return self.valid & (np.abs(self.delta) > epsilon)


@dataclass(frozen=True, eq=False)
class ChangedArea:
    """One connected group of changed grid cells.

    ``mask`` lives at grid-cell resolution; ``a_c`` counts the changed
    full-resolution pixels inside those cells; ``bbox`` is their tight
    pixel bounding box inside the window. ``delta_mean`` (signed mean
    depth change) accompanies ``d_changed`` (mean current depth) for
    comparison and is never thresholded.
    """

    mask: PixelMask
    a_c: int
    d_changed: float
    bbox: Rect
    delta_mean: float = 0.0


@dataclass(frozen=True, eq=False)
class MotionReport:
    """Per-frame change summary inside the tracking window."""

    frame_index: int
    areas: list[ChangedArea]
    a_changed_total: float
    d_changed_mean: float
    alert: bool


@dataclass(frozen=True, eq=False)
class AlertEvent:
    """Rising edge of a sustained-change run."""

    onset_frame: int
    frame_index: int
    a_changed_total: float
    areas: list[ChangedArea]


def set_reference(frame: DepthFrame, driver: BodyCandidate) -> ReferenceFrame:
    """Freeze the driver's bbox, depth window, and pixel total as reference."""
    if not driver.is_human:
        raise ValueError("reference requires a candidate accepted as human")
    bbox = driver.region.bbox
    if not bbox.fits_in(frame.width, frame.height):
        raise ValueError("driver bbox exceeds the frame")
    mask = crop_mask(driver.region.mask, bbox)
    a_r = mask.count
    if a_r < 1:
        raise ValueError("driver mask is empty inside its bbox")
    return ReferenceFrame(bbox, crop(frame, bbox), mask, a_r)


def subtract(current: DepthFrame, ref: ReferenceFrame, config: TrackerConfig) -> DiffImage:
    """Difference the current frame against the reference window."""
    if not ref.window.fits_in(current.width, current.height):
        raise ValueError("reference window exceeds the current frame")
    cur = crop(current, ref.window).data.astype(np.int32)
    base = ref.depth.data.astype(np.int32)
    delta = cur - base
    valid = (cur > 0) & (base > 0)
    return DiffImage(delta, valid)


def _pool(values: np.ndarray, cell: int, how) -> np.ndarray:
    """Pool a 2-D array onto a cell grid, padding ragged edges with 0."""
    h, w = values.shape
    gh, gw = -(-h // cell), -(-w // cell)
    padded = np.zeros((gh * cell, gw * cell), dtype=values.dtype)
    padded[:h, :w] = values
    blocks = padded.reshape(gh, cell, gw, cell)
    return how(how(blocks, axis=3), axis=1)


def downsample_max(diff: DiffImage, config: TrackerConfig) -> np.ndarray:
    """Grid of per-cell maxima of |delta| over valid pixels (0 if none)."""
    mag = np.abs(diff.delta)
    mag = np.where(diff.valid, mag, 0)
    return _pool(mag, config.grid_cell, np.max)


def connected_components(
    cell_changed: np.ndarray,
    diff: DiffImage,
    config: TrackerConfig,
    connectivity: int = 8,
) -> list[ChangedArea]:
    """Group changed cells into areas; drop areas smaller than one cell.

    ``cell_changed`` is the boolean grid map (cell value above the
    noise floor). For each connected group the changed full-resolution
    pixels inside its cells are counted; groups with fewer than
    ``grid_cell ** 2`` such pixels are discarded as speckle. Depth
    metrics are filled in later by :func:`changed_metrics`.
    """
    if not cell_changed.any():
        return []
    structure = np.ones((3, 3)) if connectivity == 8 else None
    labels, n = ndimage.label(cell_changed, structure=structure)
    g = config.grid_cell
    changed_px = diff.changed(config.diff_epsilon)
    cell_counts = _pool(changed_px.astype(np.int64), g, np.sum)
    areas = []
    for k in range(1, n + 1):
        cells = labels == k
        a_c = int(cell_counts[cells].sum())
        if a_c < g * g:
            continue
        pixel_sel = np.kron(cells, np.ones((g, g), dtype=bool))
        pixel_sel = pixel_sel[: diff.height, : diff.width] & changed_px
        mask = PixelMask(cells)
        areas.append(ChangedArea(mask, a_c, 0.0, PixelMask(pixel_sel).bbox()))
    return areas


def changed_metrics(
    areas: list[ChangedArea],
    ref: ReferenceFrame,
    diff: DiffImage,
    config: TrackerConfig,
    frame_index: int = 0,
) -> MotionReport:
    """Fill per-area depth metrics and aggregate them into a report.

    Per area: the changed percentage is 100 * a_c / a_r and the mean
    depth is taken over the current frame's values at the area's
    changed pixels. The report totals use the sum of all a_c and the
    count-weighted mean depth; both are 0 when no area survived.
    """
    if ref.a_r < 1:
        raise ValueError("reference pixel count must be >= 1")
    g = config.grid_cell
    changed_px = diff.changed(config.diff_epsilon)
    current = ref.depth.data.astype(np.int64) + diff.delta
    finished = []
    for area in areas:
        pixel_sel = np.kron(area.mask.bits, np.ones((g, g), dtype=bool))
        pixel_sel = pixel_sel[: diff.height, : diff.width] & changed_px
        d_changed = float(current[pixel_sel].mean())
        delta_mean = float(diff.delta[pixel_sel].mean())
        finished.append(replace(area, d_changed=d_changed, delta_mean=delta_mean))
    total_ac = sum(a.a_c for a in finished)
    a_changed_total = 100.0 * total_ac / ref.a_r
    d_changed_mean = (
        sum(a.a_c * a.d_changed for a in finished) / total_ac if total_ac else 0.0
    )
    return MotionReport(frame_index, finished, a_changed_total, d_changed_mean, False)


def recalibrate_gray(diff: DiffImage, config: TrackerConfig) -> np.ndarray:
    """Render the difference as an 8-bit image with a dead band.

    Unchanged pixels ramp linearly over [0, 100] with |delta| (invalid
    pixels map to 0); changed pixels ramp over [150, 255], saturating
    at ``gray_clamp``. No output value ever falls strictly between 100
    and 150.
    """
    eps = config.diff_epsilon
    clamp = config.gray_clamp
    mag = np.abs(diff.delta).astype(np.float64)
    quiet = np.rint(100.0 * np.minimum(mag, eps) / eps)
    loud = 150.0 + np.rint(105.0 * np.minimum(mag - eps, clamp - eps) / (clamp - eps))
    out = np.where(diff.changed(eps), loud, quiet)
    out[~diff.valid] = 0
    return out.astype(np.uint8)


def evaluate_distraction(
    history: list[MotionReport], config: TrackerConfig
) -> AlertEvent | None:
    """Alert decision over the trailing run of over-threshold reports.

    Returns an event when the last ``persistence`` reports (at least)
    all exceed ``area_alert_pct``; the event carries the first frame of
    that run and the latest report's areas as evidence.
    """
    run = 0
    for report in reversed(history):
        if report.a_changed_total > config.area_alert_pct:
            run += 1
        else:
            break
    if run < config.persistence:
        return None
    last = history[-1]
    onset = history[len(history) - run].frame_index
    return AlertEvent(onset, last.frame_index, last.a_changed_total, last.areas)


class MonitorSession:
    """Sequential per-session tracker: feed frames, collect reports.

    One session is driven by one logical thread; distinct sessions are
    independent. ``step`` returns the frame's report plus an AlertEvent
    exactly once per sustained run (on its rising edge).
    """

    def __init__(self, reference: ReferenceFrame, config: TrackerConfig | None = None):
        self.reference = reference
        self.config = config or TrackerConfig()
        self.history: list[MotionReport] = []
        self._run = 0

    def step(self, frame: DepthFrame, frame_index: int | None = None):
        cfg = self.config
        if frame_index is None:
            frame_index = len(self.history)
        diff = subtract(frame, self.reference, cfg)
        grid = downsample_max(diff, cfg)
        areas = connected_components(grid > cfg.diff_epsilon, diff, cfg)
        report = changed_metrics(areas, self.reference, diff, cfg, frame_index)
        self._run = self._run + 1 if report.a_changed_total > cfg.area_alert_pct else 0
        report = replace(report, alert=self._run >= cfg.persistence)
        self.history.append(report)
        event = None
        if self._run == cfg.persistence:
            event = evaluate_distraction(self.history, cfg)
        return report, event
