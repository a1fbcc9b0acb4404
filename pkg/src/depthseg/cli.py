"""Command-line front end: segment, locate-driver, monitor, synth.

Configuration is a flat JSON document; every key can also be set on the
command line, and command-line values win. Reports are JSON with sorted
keys so identical runs produce byte-identical files; wall-clock timings
live in their own top-level field and are the only nondeterministic
part.

Exit codes: 0 success, 2 input error (unreadable or malformed files,
empty frames, invalid specs), 3 no driver found, 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .detection import (
    BodyCandidate,
    DetectorConfig,
    classify_regions,
    locate_driver,
    segment_frame,
    select_driver,
)
from .errors import (
    DepthsegError,
    EmptyHistogramError,
    NoDriverFoundError,
    PgmError,
    SceneSpecError,
)
from .frames import DepthFrame
from .growing import GrownRegion, GrowthParams
from .histogram import SegmentationParams
from .pgm import load_depth_frame, save_depth_frame, save_mask
from .synth import SceneSpec, SequenceSpec, gen_scene, gen_sequence, load_spec
from .tracking import (
    AlertEvent,
    MonitorSession,
    MotionReport,
    TrackerConfig,
    recalibrate_gray,
    set_reference,
    subtract,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_NO_DRIVER = 3


@dataclass(frozen=True)
class PipelineConfig:
    """All stage parameters plus output options, as one unit."""

    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    growth: GrowthParams = field(default_factory=GrowthParams)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    out_dir: str = "depthseg-out"
    dump_masks: bool = False
    dump_gray: bool = False
    dump_histogram: bool = False

    def snapshot(self) -> dict:
        """Flat dict mirroring the config file format."""
        return {
            "body_span_mm": self.segmentation.body_span_mm,
            "seg_min_region_pixels": self.segmentation.min_region_pixels,
            "connectivity": self.growth.connectivity,
            "min_region_pixels": self.growth.min_region_pixels,
            "max_seeds": self.growth.max_seeds,
            "min_aspect": self.detector.min_aspect,
            "max_aspect": self.detector.max_aspect,
            "min_area_frac": self.detector.min_area_frac,
            "max_area_frac": self.detector.max_area_frac,
            "diff_epsilon": self.tracker.diff_epsilon,
            "grid_cell": self.tracker.grid_cell,
            "area_alert_pct": self.tracker.area_alert_pct,
            "persistence": self.tracker.persistence,
            "gray_clamp": self.tracker.gray_clamp,
        }


def config_from_dict(doc: dict) -> PipelineConfig:
    def pick(cls, mapping):
        return cls(**{k: doc[v] for k, v in mapping.items() if v in doc})

    return PipelineConfig(
        segmentation=pick(
            SegmentationParams,
            {"body_span_mm": "body_span_mm", "min_region_pixels": "seg_min_region_pixels"},
        ),
        growth=pick(
            GrowthParams,
            {
                "connectivity": "connectivity",
                "min_region_pixels": "min_region_pixels",
                "max_seeds": "max_seeds",
            },
        ),
        detector=pick(
            DetectorConfig,
            {
                "min_aspect": "min_aspect",
                "max_aspect": "max_aspect",
                "min_area_frac": "min_area_frac",
                "max_area_frac": "max_area_frac",
            },
        ),
        tracker=pick(
            TrackerConfig,
            {
                "diff_epsilon": "diff_epsilon",
                "grid_cell": "grid_cell",
                "area_alert_pct": "area_alert_pct",
                "persistence": "persistence",
                "gray_clamp": "gray_clamp",
            },
        ),
    )


def _load_config(args) -> PipelineConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise DepthsegError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise DepthsegError(f"config file is not valid JSON: {exc}")
        cfg = config_from_dict(doc)
    else:
        cfg = PipelineConfig()
    if args.t_mm is not None:
        cfg = replace(cfg, segmentation=replace(cfg.segmentation, body_span_mm=args.t_mm))
    tracker = cfg.tracker
    if args.epsilon_mm is not None:
        tracker = replace(tracker, diff_epsilon=args.epsilon_mm)
    if args.grid_cell is not None:
        tracker = replace(tracker, grid_cell=args.grid_cell)
    if args.alert_pct is not None:
        tracker = replace(tracker, area_alert_pct=args.alert_pct)
    if args.persistence is not None:
        tracker = replace(tracker, persistence=args.persistence)
    cfg = replace(
        cfg,
        tracker=tracker,
        out_dir=args.out,
        dump_masks=getattr(args, "dump_masks", False),
        dump_gray=getattr(args, "dump_gray", False),
        dump_histogram=getattr(args, "dump_histogram", False),
    )
    return cfg


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


def _region_doc(region: GrownRegion) -> dict:
    return {
        "bbox": list(region.bbox.as_tuple()),
        "pixel_count": region.pixel_count,
        "mean_depth": region.mean_depth,
        "seed": [region.seed.x, region.seed.y, region.seed.depth],
        "threshold_used": region.threshold_used,
    }


def _candidate_doc(candidate: BodyCandidate) -> dict:
    doc = _region_doc(candidate.region)
    doc.update(
        {
            "aspect": candidate.aspect,
            "area_frac": candidate.area_frac,
            "is_human": candidate.is_human,
        }
    )
    return doc


def _report_doc(command: str, inputs, config: PipelineConfig) -> dict:
    return {
        "tool": "depthseg",
        "version": __version__,
        "command": command,
        "inputs": [str(p) for p in inputs],
        "config": config.snapshot(),
        "timings": {},
    }


def _motion_doc(report: MotionReport) -> dict:
    return {
        "frame_index": report.frame_index,
        "a_changed_total": report.a_changed_total,
        "d_changed_mean": report.d_changed_mean,
        "alert": report.alert,
        "areas": [
            {
                "bbox": list(a.bbox.as_tuple()),
                "a_c": a.a_c,
                "d_changed": a.d_changed,
                "delta_mean": a.delta_mean,
            }
            for a in report.areas
        ],
    }


def _alert_doc(event: AlertEvent) -> dict:
    return {
        "onset_frame": event.onset_frame,
        "frame_index": event.frame_index,
        "a_changed_total": event.a_changed_total,
        "areas": [
            {"bbox": list(a.bbox.as_tuple()), "d_changed": a.d_changed}
            for a in event.areas
        ],
    }


def _write_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _out_dir(config: PipelineConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_segment(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    frame = load_depth_frame(args.frame)
    t0 = time.perf_counter()
    seg = segment_frame(frame, config.segmentation, config.growth)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    doc = _report_doc("segment", [args.frame], config)
    doc["histogram"] = {
        "bins": len(seg.histogram),
        "total_pixels": seg.histogram.total,
        "depth_min": int(seg.histogram.values[0]),
        "depth_max": int(seg.histogram.values[-1]),
    }
    doc["intervals"] = [[iv.lo, iv.hi] for iv in seg.intervals]
    doc["regions"] = [
        dict(_region_doc(r), interval=seg.region_interval[i])
        for i, r in enumerate(seg.regions)
    ]
    doc["timings"] = {"segment_ms": elapsed_ms}
    for i, region in enumerate(seg.regions):
        save_mask(region.mask, out / f"region_{i:02d}.pgm")
    if config.dump_histogram:
        lines = ["depth_mm,count"]
        lines += [
            f"{int(v)},{int(c)}"
            for v, c in zip(seg.histogram.values, seg.histogram.counts)
        ]
        (out / "histogram.csv").write_text("\n".join(lines) + "\n")
    _write_json(doc, out / "report.json")
    print(f"segment: {len(seg.intervals)} interval(s), {len(seg.regions)} region(s)")
    return EXIT_OK


def cmd_locate_driver(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    frame = load_depth_frame(args.frame)
    doc = _report_doc("locate-driver", [args.frame], config)
    t0 = time.perf_counter()
    seg = segment_frame(frame, config.segmentation, config.growth)
    candidates = classify_regions(seg.regions, config.detector, frame.width, frame.height)
    doc["candidates"] = [_candidate_doc(c) for c in candidates]
    try:
        driver = select_driver(candidates)
    except NoDriverFoundError as exc:
        doc["driver"] = None
        doc["error"] = str(exc)
        doc["timings"] = {"locate_ms": (time.perf_counter() - t0) * 1000.0}
        _write_json(doc, out / "report.json")
        print(str(exc), file=sys.stderr)
        return EXIT_NO_DRIVER
    doc["driver"] = _candidate_doc(driver)
    doc["timings"] = {"locate_ms": (time.perf_counter() - t0) * 1000.0}
    if config.dump_masks:
        save_mask(driver.region.mask, out / "driver_mask.pgm")
    _write_json(doc, out / "report.json")
    print(f"driver at bbox {driver.region.bbox.as_tuple()}")
    return EXIT_OK


def _frame_paths(inputs: list[str]) -> list[Path]:
    if len(inputs) == 1 and Path(inputs[0]).is_dir():
        paths = sorted(Path(inputs[0]).glob("*.pgm"))
    else:
        paths = [Path(p) for p in inputs]
    if not paths:
        raise DepthsegError("no input frames found")
    return paths


def cmd_monitor(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    paths = _frame_paths(args.frames)
    doc = _report_doc("monitor", paths, config)
    first = load_depth_frame(paths[0])
    try:
        driver = locate_driver(first, config.segmentation, config.growth, config.detector)
    except NoDriverFoundError as exc:
        print(f"aborting: {exc} on reference frame", file=sys.stderr)
        return EXIT_NO_DRIVER
    reference = set_reference(first, driver)
    session = MonitorSession(reference, config.tracker)
    alerts = []
    timings_ms = []
    ndjson_lines = []
    for index, path in enumerate(paths):
        frame = load_depth_frame(path)
        t0 = time.perf_counter()
        report, event = session.step(frame, index)
        timings_ms.append((time.perf_counter() - t0) * 1000.0)
        if config.dump_gray:
            diff = subtract(frame, reference, config.tracker)
            gray = recalibrate_gray(diff, config.tracker)
            _save_gray(gray, out / f"gray_{index:04d}.pgm")
        line = json.dumps(_motion_doc(report), sort_keys=True)
        ndjson_lines.append(line)
        print(line)
        if event is not None:
            alerts.append(event)
            print(json.dumps({"alert": _alert_doc(event)}, sort_keys=True))
    (out / "motion.ndjson").write_text("\n".join(ndjson_lines) + "\n")
    doc["driver"] = _candidate_doc(driver)
    doc["alerts"] = [_alert_doc(a) for a in alerts]
    doc["frames"] = len(paths)
    timings_sorted = sorted(timings_ms)
    doc["timings"] = {
        "per_frame_ms": timings_ms,
        "median_ms": timings_sorted[len(timings_sorted) // 2],
    }
    _write_json(doc, out / "report.json")
    return EXIT_OK


def _save_gray(gray, path: Path) -> None:
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(gray.tobytes())


def cmd_synth(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    spec = load_spec(args.spec)
    doc = _report_doc("synth", [args.spec], config)
    if isinstance(spec, SequenceSpec):
        frames, oracles = gen_sequence(spec)
        for t, frame in enumerate(frames):
            save_depth_frame(frame, out / f"frame_{t:04d}.pgm")
            save_mask(oracles[t].changed, out / f"changed_{t:04d}.pgm")
        doc["oracle"] = {
            "frame_count": spec.frame_count,
            "changed_counts": [o.changed_count for o in oracles],
            "blob_changed_counts": [o.blob_changed_counts for o in oracles],
        }
    else:
        frame, oracle = gen_scene(spec)
        save_depth_frame(frame, out / "frame_0000.pgm")
        for i, mask in enumerate(oracle.blob_masks):
            save_mask(mask, out / f"blob_{i:02d}.pgm")
        doc["oracle"] = {
            "blob_counts": oracle.blob_counts,
            "background_count": oracle.background_count,
        }
    _write_json(doc, out / "report.json")
    print(f"synth: wrote {args.spec} scene to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat JSON config file")
    parser.add_argument("--out", default="depthseg-out", help="output directory")
    parser.add_argument("--t-mm", type=int, default=None, help="body span T in mm")
    parser.add_argument("--epsilon-mm", type=int, default=None, help="change noise floor in mm")
    parser.add_argument("--grid-cell", type=int, default=None, help="noise-pooling cell size in px")
    parser.add_argument("--alert-pct", type=float, default=None, help="alert threshold in percent")
    parser.add_argument("--persistence", type=int, default=None, help="frames a change must persist")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depthseg",
        description="Depth-image segmentation and driver-motion tracking",
    )
    parser.add_argument("--version", action="version", version=f"depthseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment one depth frame into regions")
    p.add_argument("frame", help="16-bit PGM depth frame")
    p.add_argument("--dump-histogram", action="store_true", help="write histogram CSV")
    p.add_argument(
        "--dump-masks",
        action="store_true",
        help="accepted for symmetry; segment always writes region masks",
    )
    _add_common(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("locate-driver", help="find the driver in one frame")
    p.add_argument("frame", help="16-bit PGM depth frame")
    p.add_argument("--dump-masks", action="store_true", help="write the driver mask PGM")
    _add_common(p)
    p.set_defaults(func=cmd_locate_driver)

    p = sub.add_parser("monitor", help="track driver motion over a frame sequence")
    p.add_argument("frames", nargs="+", help="frame directory or ordered PGM files")
    p.add_argument("--dump-gray", action="store_true", help="write recalibrated gray PGMs")
    _add_common(p)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("synth", help="generate synthetic frames plus ground truth")
    p.add_argument("spec", help="scene or sequence spec JSON")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoDriverFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DRIVER
    except (PgmError, EmptyHistogramError, SceneSpecError, FileNotFoundError, DepthsegError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
