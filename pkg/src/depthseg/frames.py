"""Depth-frame data model and pixel-mask primitives.

Depth values are millimeters stored as uint16; the value 0 marks an
invalid measurement and is excluded from every statistic downstream.
Coordinates are (x = column, y = row) with the origin at the top-left
corner. All types are immutable after construction and safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: top-left corner plus extents, in pixels."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"rect extents must be >= 1, got {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise ValueError(f"rect origin must be >= 0, got ({self.x}, {self.y})")

    @property
    def slices(self) -> tuple[slice, slice]:
        """(row, column) slices selecting this rect from a 2-D array."""
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits_in(self, width: int, height: int) -> bool:
        return self.x + self.w <= width and self.y + self.h <= height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.x, self.y, self.w, self.h


def _frozen_2d(arr: np.ndarray, dtype) -> np.ndarray:
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D grid, got shape {arr.shape}")
    out = arr.astype(dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DepthFrame:
    """Rectangular grid of depth measurements in millimeters.

    ``data`` is a read-only uint16 array of shape (height, width).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype != np.uint16:
            if arr.size and (arr.min() < 0 or arr.max() > 65535):
                raise ValueError("depth values must lie in [0, 65535]")
        object.__setattr__(self, "data", _frozen_2d(arr, np.uint16))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DepthFrame):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True, eq=False)
class PixelMask:
    """Boolean pixel set annotating a frame of matching dimensions."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_2d(np.asarray(self.bits), bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        """Number of pixels inside the mask."""
        return int(self.bits.sum())

    @property
    def is_empty(self) -> bool:
        return not self.bits.any()

    def bbox(self) -> Rect:
        """Tight bounding box of the set pixels; raises on an empty mask."""
        ys, xs = np.nonzero(self.bits)
        if ys.size == 0:
            raise ValueError("empty mask has no bounding box")
        x0, x1 = int(xs.min()), int(xs.max())
        y0, y1 = int(ys.min()), int(ys.max())
        return Rect(x0, y0, x1 - x0 + 1, y1 - y0 + 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )


def crop(frame: DepthFrame, rect: Rect) -> DepthFrame:
    """Copy the windowed values into a new rect.w x rect.h frame."""
    if not rect.fits_in(frame.width, frame.height):
        raise ValueError(
            f"rect {rect.as_tuple()} exceeds frame bounds "
            f"{frame.width}x{frame.height}"
        )
    return DepthFrame(frame.data[rect.slices])


def crop_mask(mask: PixelMask, rect: Rect) -> PixelMask:
    """Window a mask the same way :func:`crop` windows a frame."""
    if not rect.fits_in(mask.width, mask.height):
        raise ValueError(
            f"rect {rect.as_tuple()} exceeds mask bounds {mask.width}x{mask.height}"
        )
    return PixelMask(mask.bits[rect.slices])


def valid_pixel_count(frame: DepthFrame) -> int:
    """Number of pixels carrying a real measurement (value > 0)."""
    return int(np.count_nonzero(frame.data))
