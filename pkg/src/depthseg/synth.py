"""Deterministic synthetic depth scenes and sequences with ground truth.

Scenes are composed from an optional base layer (a uniform plane or a
row-wise depth ramp, the floor case) plus rectangle and ellipse blobs
painted in declaration order, later blobs occluding earlier ones. The
generator returns the rendered frame together with an oracle: the
post-occlusion visibility mask and exact pixel count of every blob plus
the visible base-layer count.

Per-pixel depth noise is drawn from the three levels {-amplitude, 0,
+amplitude} with probabilities (1/4, 1/2, 1/4). Real depth sensors
quantize distance into discrete steps and flicker between adjacent
steps, which is what gives the segmentation's histogram its meaningful
bin gaps; uniform 1 mm-grained noise would instead collapse every bin
gap to 1 mm and starve the adaptive growth threshold. Center-weighting
makes a surface's middle level a reliable histogram peak. All
randomness comes from one seeded generator consumed in declaration
order, so identical specs render bit-identical frames and a blob's
noise texture travels with its bounding box when a sequence moves it.

Sequences replay a base scene with per-blob motions: from its onset
frame a motion shifts the blob's bounding box and/or depth by a fixed
step per frame for a given duration, after which the displacement
stays frozen. The per-frame oracle records the exact set of pixels
that differ from frame 0 and each blob's share of it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SceneSpecError
from .frames import DepthFrame, PixelMask, Rect

_NOISE_LEVELS = (-1, 0, 1)
_NOISE_WEIGHTS = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class BlobSpec:
    """One painted object: a rectangle or an ellipse inscribed in bbox."""

    shape: str
    bbox: Rect
    depth: int
    depth_jitter: int = 0

    def __post_init__(self):
        if self.shape not in ("rectangle", "ellipse"):
            raise SceneSpecError(f"unknown blob shape {self.shape!r}")
        if not (0 < self.depth <= 65535):
            raise SceneSpecError(f"blob depth {self.depth} outside (0, 65535]")
        if self.depth_jitter < 0:
            raise SceneSpecError("depth_jitter must be >= 0")


@dataclass(frozen=True)
class RampSpec:
    """Row-wise base gradient: depth(y) = start_depth + mm_per_row * y."""

    start_depth: int
    mm_per_row: int


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    background: int | None = None
    blobs: tuple[BlobSpec, ...] = ()
    ramp: RampSpec | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SceneSpecError(f"bad scene dims {self.width}x{self.height}")
        if self.background is not None and not (0 < self.background <= 65535):
            raise SceneSpecError("background depth outside (0, 65535]")
        object.__setattr__(self, "blobs", tuple(self.blobs))
        for blob in self.blobs:
            if not blob.bbox.fits_in(self.width, self.height):
                raise SceneSpecError(
                    f"blob bbox {blob.bbox.as_tuple()} exceeds scene dims"
                )
        if self.ramp is not None:
            last = self.ramp.start_depth + self.ramp.mm_per_row * (self.height - 1)
            for d in (self.ramp.start_depth, last):
                if not (0 < d <= 65535):
                    raise SceneSpecError("ramp depth leaves (0, 65535]")


@dataclass(frozen=True, eq=False)
class SceneOracle:
    """Ground truth for one rendered frame."""

    blob_masks: list[PixelMask]
    blob_counts: list[int]
    background_count: int


@dataclass(frozen=True)
class MotionSpec:
    """Per-frame translation and/or depth step applied to one blob.

    Active from ``onset`` for ``duration`` frames; afterwards the
    accumulated displacement stays in place.
    """

    blob: int
    onset: int
    duration: int
    translate: tuple[int, int] = (0, 0)
    depth_delta: int = 0

    def __post_init__(self):
        if self.onset < 0 or self.duration < 1:
            raise SceneSpecError("motion needs onset >= 0 and duration >= 1")


@dataclass(frozen=True)
class SequenceSpec:
    base: SceneSpec
    motions: tuple[MotionSpec, ...] = ()
    frame_count: int = 1

    def __post_init__(self):
        if self.frame_count < 1:
            raise SceneSpecError("frame_count must be >= 1")
        object.__setattr__(self, "motions", tuple(self.motions))
        for m in self.motions:
            if not (0 <= m.blob < len(self.base.blobs)):
                raise SceneSpecError(f"motion references unknown blob {m.blob}")
        # every frame must keep every moved bbox inside the scene
        try:
            for t in range(self.frame_count):
                scene_at(self, t)
        except ValueError as exc:
            raise SceneSpecError(f"motion leaves the scene: {exc}") from exc


@dataclass(frozen=True, eq=False)
class FrameOracle:
    """Ground truth for one sequence frame, relative to frame 0."""

    changed: PixelMask
    changed_count: int
    blob_changed_counts: list[int]
    scene: SceneOracle


def _blob_stencil(blob: BlobSpec) -> np.ndarray:
    b = blob.bbox
    if blob.shape == "rectangle":
        return np.ones((b.h, b.w), dtype=bool)
    ys, xs = np.mgrid[0 : b.h, 0 : b.w]
    cx, cy = (b.w - 1) / 2.0, (b.h - 1) / 2.0
    rx, ry = max(b.w / 2.0, 0.5), max(b.h / 2.0, 0.5)
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0


def _noise(rng: np.random.Generator, amplitude: int, shape) -> np.ndarray:
    levels = rng.choice(_NOISE_LEVELS, size=shape, p=_NOISE_WEIGHTS)
    return levels.astype(np.int64) * amplitude


def gen_scene(spec: SceneSpec) -> tuple[DepthFrame, SceneOracle]:
    """Render a scene and its oracle; deterministic for a given seed."""
    rng = np.random.default_rng(spec.rng_seed)
    canvas = np.zeros((spec.height, spec.width), dtype=np.int64)
    if spec.ramp is not None:
        rows = spec.ramp.start_depth + spec.ramp.mm_per_row * np.arange(
            spec.height, dtype=np.int64
        )
        canvas[:, :] = rows[:, None]
    elif spec.background is not None:
        canvas[:, :] = spec.background

    owner = np.full((spec.height, spec.width), -1, dtype=np.int64)
    for i, blob in enumerate(spec.blobs):
        stencil = _blob_stencil(blob)
        values = np.full(stencil.shape, blob.depth, dtype=np.int64)
        if blob.depth_jitter > 0:
            values += _noise(rng, blob.depth_jitter, stencil.shape)
        values = np.clip(values, 1, 65535)
        sl = blob.bbox.slices
        canvas[sl] = np.where(stencil, values, canvas[sl])
        owner[sl] = np.where(stencil, i, owner[sl])

    masks, counts = [], []
    for i in range(len(spec.blobs)):
        bits = owner == i
        masks.append(PixelMask(bits) if bits.any() else PixelMask(np.zeros_like(bits)))
        counts.append(int(bits.sum()))
    base_visible = (owner == -1) & (canvas > 0)
    frame = DepthFrame(canvas.astype(np.uint16))
    return frame, SceneOracle(masks, counts, int(base_visible.sum()))


def scene_at(seq: SequenceSpec, t: int) -> SceneSpec:
    """Scene spec of frame ``t``: the base with all motions applied."""
    blobs = list(seq.base.blobs)
    for m in seq.motions:
        steps = min(max(t - m.onset + 1, 0), m.duration)
        if steps == 0:
            continue
        blob = blobs[m.blob]
        dx, dy = m.translate
        bbox = Rect(
            blob.bbox.x + dx * steps,
            blob.bbox.y + dy * steps,
            blob.bbox.w,
            blob.bbox.h,
        )
        blobs[m.blob] = replace(
            blob, bbox=bbox, depth=blob.depth + m.depth_delta * steps
        )
    return replace(seq.base, blobs=tuple(blobs))


def gen_sequence(seq: SequenceSpec) -> tuple[list[DepthFrame], list[FrameOracle]]:
    """Render every frame of a sequence plus per-frame ground truth.

    The changed set of frame t is exact: pixels whose rendered value
    differs from frame 0. Per blob, the changed pixels falling inside
    the union of its frame-0 and frame-t visibility masks are counted.
    """
    frames: list[DepthFrame] = []
    oracles: list[FrameOracle] = []
    base_frame: DepthFrame | None = None
    base_oracle: SceneOracle | None = None
    for t in range(seq.frame_count):
        frame, oracle = gen_scene(scene_at(seq, t))
        if t == 0:
            base_frame, base_oracle = frame, oracle
        changed_bits = frame.data != base_frame.data
        per_blob = []
        for i in range(len(seq.base.blobs)):
            union = base_oracle.blob_masks[i].bits | oracle.blob_masks[i].bits
            per_blob.append(int((changed_bits & union).sum()))
        oracles.append(
            FrameOracle(
                PixelMask(changed_bits),
                int(changed_bits.sum()),
                per_blob,
                oracle,
            )
        )
        frames.append(frame)
    return frames, oracles


# ---------------------------------------------------------------------------
# JSON (de)serialization of specs
# ---------------------------------------------------------------------------


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise SceneSpecError(f"{context}: missing required key {key!r}")
    return mapping[key]


def scene_spec_from_dict(doc: dict) -> SceneSpec:
    try:
        dims = _require(doc, "dims", "scene")
        width, height = int(dims[0]), int(dims[1])
        blobs = []
        for i, b in enumerate(doc.get("blobs", [])):
            bbox = _require(b, "bbox", f"blob {i}")
            blobs.append(
                BlobSpec(
                    shape=b.get("shape", "rectangle"),
                    bbox=Rect(int(bbox[0]), int(bbox[1]), int(bbox[2]), int(bbox[3])),
                    depth=int(_require(b, "depth", f"blob {i}")),
                    depth_jitter=int(b.get("depth_jitter", 0)),
                )
            )
        ramp = None
        if doc.get("ramp") is not None:
            r = doc["ramp"]
            ramp = RampSpec(
                int(_require(r, "start_depth", "ramp")),
                int(_require(r, "mm_per_row", "ramp")),
            )
        background = doc.get("background")
        return SceneSpec(
            width=width,
            height=height,
            background=None if background is None else int(background),
            blobs=tuple(blobs),
            ramp=ramp,
            rng_seed=int(doc.get("rng_seed", 0)),
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise SceneSpecError(f"invalid scene spec: {exc}") from exc


def sequence_spec_from_dict(doc: dict) -> SequenceSpec:
    try:
        base = scene_spec_from_dict(_require(doc, "base", "sequence"))
        motions = []
        for i, m in enumerate(doc.get("motions", [])):
            translate = m.get("translate") or (0, 0)
            motions.append(
                MotionSpec(
                    blob=int(_require(m, "blob", f"motion {i}")),
                    onset=int(_require(m, "onset", f"motion {i}")),
                    duration=int(_require(m, "duration", f"motion {i}")),
                    translate=(int(translate[0]), int(translate[1])),
                    depth_delta=int(m.get("depth_delta", 0)),
                )
            )
        return SequenceSpec(
            base=base,
            motions=tuple(motions),
            frame_count=int(_require(doc, "frame_count", "sequence")),
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise SceneSpecError(f"invalid sequence spec: {exc}") from exc


def load_spec(path) -> SceneSpec | SequenceSpec:
    """Load a scene or sequence spec from JSON (sequences carry "base")."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SceneSpecError(f"spec file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneSpecError("spec file must hold a JSON object")
    if "base" in doc:
        return sequence_spec_from_dict(doc)
    return scene_spec_from_dict(doc)


def scene_spec_to_dict(spec: SceneSpec) -> dict:
    doc: dict = {
        "dims": [spec.width, spec.height],
        "background": spec.background,
        "blobs": [
            {
                "shape": b.shape,
                "bbox": list(b.bbox.as_tuple()),
                "depth": b.depth,
                "depth_jitter": b.depth_jitter,
            }
            for b in spec.blobs
        ],
        "rng_seed": spec.rng_seed,
    }
    if spec.ramp is not None:
        doc["ramp"] = {
            "start_depth": spec.ramp.start_depth,
            "mm_per_row": spec.ramp.mm_per_row,
        }
    return doc


def sequence_spec_to_dict(spec: SequenceSpec) -> dict:
    return {
        "base": scene_spec_to_dict(spec.base),
        "motions": [
            {
                "blob": m.blob,
                "onset": m.onset,
                "duration": m.duration,
                "translate": list(m.translate),
                "depth_delta": m.depth_delta,
            }
            for m in spec.motions
        ],
        "frame_count": spec.frame_count,
    }
