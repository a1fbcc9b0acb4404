"""Shared scene builders and scoring helpers for the test suite."""

from __future__ import annotations

import numpy as np

import depthseg as ds


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    inter = int((a & b).sum())
    union = int((a | b).sum())
    return inter / union if union else 0.0


def bbox_iou(a: ds.Rect, b: ds.Rect) -> float:
    iw = max(0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    ih = max(0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = iw * ih
    return inter / (a.area + b.area - inter) if inter else 0.0


def two_body_scene(seed: int = 3) -> ds.SceneSpec:
    """Two disjoint same-depth bodies on a zero background."""
    return ds.SceneSpec(
        width=240,
        height=180,
        background=None,
        blobs=(
            ds.BlobSpec("rectangle", ds.Rect(20, 30, 60, 110), 1500, 5),
            ds.BlobSpec("ellipse", ds.Rect(140, 25, 64, 120), 1500, 5),
        ),
        rng_seed=seed,
    )


def cabin_scene(width: int = 320, height: int = 240, seed: int = 5) -> ds.SceneSpec:
    """Textured cabin wall, driver, and an arm resting at body depth.

    Blob geometry scales with the frame so the driver keeps a human-like
    share of the image at any resolution. The arm is painted after the
    driver so it can later move toward the camera; at rest it is
    depth-indistinguishable from the body.
    """

    def rect(fx, fy, fw, fh):
        return ds.Rect(
            int(fx * width), int(fy * height), int(fw * width), int(fh * height)
        )

    return ds.SceneSpec(
        width=width,
        height=height,
        background=None,
        blobs=(
            ds.BlobSpec("rectangle", ds.Rect(0, 0, width, height), 2600, 5),
            ds.BlobSpec("ellipse", rect(0.1875, 1 / 6, 0.3125, 17 / 24), 1200, 5),
            ds.BlobSpec("rectangle", rect(0.25, 0.5, 0.21875, 1 / 3), 1200, 5),
        ),
        rng_seed=seed,
    )


def reach_sequence(frame_count: int = 91, onset: int = 31, duration: int = 30) -> ds.SequenceSpec:
    """Cabin sequence where the arm reaches toward the camera.

    The arm's depth drops 30 mm per frame from ``onset``; with the
    default 50 mm noise floor its pixels first count as changed on
    frame ``onset + 1``.
    """
    return ds.SequenceSpec(
        base=cabin_scene(),
        motions=(ds.MotionSpec(blob=2, onset=onset, duration=duration, depth_delta=-30),),
        frame_count=frame_count,
    )


def static_sequence(frame_count: int = 40) -> ds.SequenceSpec:
    return ds.SequenceSpec(base=cabin_scene(), motions=(), frame_count=frame_count)
