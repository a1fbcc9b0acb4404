import json

import numpy as np
import pytest

import depthseg as ds
from depthseg.cli import EXIT_INPUT, EXIT_NO_DRIVER, EXIT_OK, main
from depthseg.synth import scene_spec_to_dict, sequence_spec_to_dict
from helpers import cabin_scene, reach_sequence, static_sequence


def write_frame(path, spec):
    frame, _ = ds.gen_scene(spec)
    ds.save_depth_frame(frame, path)
    return frame


def write_sequence(dirpath, seq):
    dirpath.mkdir(parents=True, exist_ok=True)
    frames, _ = ds.gen_sequence(seq)
    for i, frame in enumerate(frames):
        ds.save_depth_frame(frame, dirpath / f"frame_{i:04d}.pgm")
    return frames


def read_report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


def small_reach(frame_count=26, onset=8, duration=10):
    return ds.SequenceSpec(
        base=cabin_scene(),
        motions=(ds.MotionSpec(blob=2, onset=onset, duration=duration, depth_delta=-30),),
        frame_count=frame_count,
    )


# ---------------------------------------------------------------------------
# segment
# ---------------------------------------------------------------------------


def test_segment_writes_report_and_masks(tmp_path):
    frame_path = tmp_path / "scene.pgm"
    spec = ds.SceneSpec(
        width=200,
        height=150,
        background=None,
        blobs=(
            ds.BlobSpec("ellipse", ds.Rect(20, 20, 50, 100), 1200, 5),
            ds.BlobSpec("ellipse", ds.Rect(100, 15, 45, 100), 2600, 5),
            ds.BlobSpec("ellipse", ds.Rect(150, 25, 40, 95), 2600, 5),
        ),
        rng_seed=4,
    )
    write_frame(frame_path, spec)
    out = tmp_path / "out"
    code = main(["segment", str(frame_path), "--out", str(out), "--dump-histogram"])
    assert code == EXIT_OK
    report = read_report(out)
    assert report["command"] == "segment"
    assert len(report["intervals"]) >= 2
    assert report["histogram"]["total_pixels"] > 0
    assert (out / "histogram.csv").read_text().startswith("depth_mm,count")
    for i in range(len(report["regions"])):
        assert (out / f"region_{i:02d}.pgm").exists()
        assert report["regions"][i]["threshold_used"] >= 1


def test_segment_four_person_scene_matches_oracles(tmp_path):
    # one person near, three far: two depth intervals, all four bodies
    # recovered by some region with high mask overlap
    spec = ds.SceneSpec(
        width=320,
        height=200,
        background=None,
        blobs=(
            ds.BlobSpec("ellipse", ds.Rect(10, 30, 60, 140), 1200, 5),
            ds.BlobSpec("ellipse", ds.Rect(100, 20, 55, 120), 2600, 5),
            ds.BlobSpec("ellipse", ds.Rect(170, 25, 55, 120), 2600, 5),
            ds.BlobSpec("ellipse", ds.Rect(240, 30, 55, 115), 2600, 5),
        ),
        rng_seed=12,
    )
    frame, oracle = ds.gen_scene(spec)
    seg = ds.segment_frame(frame)
    assert len(seg.intervals) >= 2
    for body_bits, body_count in zip(
        (m.bits for m in oracle.blob_masks), oracle.blob_counts
    ):
        best = 0.0
        for region in seg.regions:
            inter = int((region.mask.bits & body_bits).sum())
            union = int((region.mask.bits | body_bits).sum())
            best = max(best, inter / union)
        assert best >= 0.8


def test_segment_all_zero_frame_is_input_error(tmp_path, capsys):
    frame_path = tmp_path / "zero.pgm"
    ds.save_depth_frame(ds.DepthFrame(np.zeros((20, 20), dtype=np.uint16)), frame_path)
    code = main(["segment", str(frame_path), "--out", str(tmp_path / "o")])
    assert code == EXIT_INPUT
    assert "empty histogram" in capsys.readouterr().err


def test_segment_missing_file_is_input_error(tmp_path):
    code = main(["segment", str(tmp_path / "nope.pgm"), "--out", str(tmp_path / "o")])
    assert code == EXIT_INPUT


# ---------------------------------------------------------------------------
# locate-driver
# ---------------------------------------------------------------------------


def test_locate_driver_reports_bbox(tmp_path):
    frame_path = tmp_path / "cabin.pgm"
    write_frame(frame_path, cabin_scene())
    out = tmp_path / "out"
    code = main(["locate-driver", str(frame_path), "--out", str(out), "--dump-masks"])
    assert code == EXIT_OK
    report = read_report(out)
    assert report["driver"]["is_human"] is True
    assert (out / "driver_mask.pgm").exists()
    # every grown region appears with its verdict, accepted or not
    assert len(report["candidates"]) >= 2
    assert any(not c["is_human"] for c in report["candidates"])
    assert report["driver"]["bbox"] in [c["bbox"] for c in report["candidates"]]


def test_locate_driver_empty_cabin_exit_code(tmp_path):
    frame_path = tmp_path / "empty.pgm"
    spec = ds.SceneSpec(
        width=160,
        height=120,
        background=None,
        blobs=(ds.BlobSpec("rectangle", ds.Rect(0, 0, 160, 120), 2600, 5),),
        rng_seed=2,
    )
    write_frame(frame_path, spec)
    out = tmp_path / "out"
    code = main(["locate-driver", str(frame_path), "--out", str(out)])
    assert code == EXIT_NO_DRIVER
    assert read_report(out)["driver"] is None


def test_locate_driver_impossible_config(tmp_path):
    frame_path = tmp_path / "cabin.pgm"
    write_frame(frame_path, cabin_scene())
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"min_aspect": 50.0, "max_aspect": 60.0}))
    code = main(
        ["locate-driver", str(frame_path), "--config", str(cfg), "--out", str(tmp_path / "o")]
    )
    assert code == EXIT_NO_DRIVER


# ---------------------------------------------------------------------------
# monitor
# ---------------------------------------------------------------------------


def test_monitor_static_sequence_has_no_alerts(tmp_path, capsys):
    frames_dir = tmp_path / "frames"
    write_sequence(frames_dir, static_sequence(frame_count=12))
    out = tmp_path / "out"
    code = main(["monitor", str(frames_dir), "--out", str(out)])
    assert code == EXIT_OK
    report = read_report(out)
    assert report["alerts"] == []
    lines = (out / "motion.ndjson").read_text().strip().splitlines()
    assert len(lines) == 12
    for line in lines:
        assert json.loads(line)["a_changed_total"] == 0.0
    assert len(report["timings"]["per_frame_ms"]) == 12


def test_monitor_reach_sequence_alerts_once(tmp_path):
    frames_dir = tmp_path / "frames"
    write_sequence(frames_dir, small_reach())
    out = tmp_path / "out"
    code = main(["monitor", str(frames_dir), "--out", str(out), "--dump-gray"])
    assert code == EXIT_OK
    report = read_report(out)
    assert len(report["alerts"]) == 1
    assert 8 <= report["alerts"][0]["onset_frame"] <= 13
    grays = sorted(frames_dir.parent.glob("out/gray_*.pgm"))
    assert len(grays) == 26
    # gray dead band holds on disk too
    body = grays[-1].read_bytes().split(b"255\n", 1)[1]
    assert not any(100 < b < 150 for b in body)


def test_monitor_driverless_reference_aborts(tmp_path, capsys):
    frames_dir = tmp_path / "frames"
    frames_dir.mkdir()
    spec = ds.SceneSpec(
        width=160,
        height=120,
        background=None,
        blobs=(ds.BlobSpec("rectangle", ds.Rect(0, 0, 160, 120), 2600, 5),),
        rng_seed=2,
    )
    frame, _ = ds.gen_scene(spec)
    ds.save_depth_frame(frame, frames_dir / "frame_0000.pgm")
    code = main(["monitor", str(frames_dir), "--out", str(tmp_path / "o")])
    assert code == EXIT_NO_DRIVER


def test_monitor_accepts_explicit_file_list(tmp_path):
    frames_dir = tmp_path / "frames"
    frames = write_sequence(frames_dir, static_sequence(frame_count=3))
    paths = sorted(str(p) for p in frames_dir.glob("*.pgm"))
    code = main(["monitor", *paths, "--out", str(tmp_path / "o")])
    assert code == EXIT_OK


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def test_synth_scene_writes_frames_and_oracle(tmp_path):
    spec_path = tmp_path / "scene.json"
    spec_path.write_text(json.dumps(scene_spec_to_dict(cabin_scene())))
    out = tmp_path / "out"
    code = main(["synth", str(spec_path), "--out", str(out)])
    assert code == EXIT_OK
    report = read_report(out)
    assert (out / "frame_0000.pgm").exists()
    assert len(report["oracle"]["blob_counts"]) == 3
    for i in range(3):
        assert (out / f"blob_{i:02d}.pgm").exists()


def test_synth_sequence_writes_changed_masks(tmp_path):
    spec_path = tmp_path / "seq.json"
    spec_path.write_text(json.dumps(sequence_spec_to_dict(small_reach(frame_count=6, onset=2, duration=3))))
    out = tmp_path / "out"
    code = main(["synth", str(spec_path), "--out", str(out)])
    assert code == EXIT_OK
    report = read_report(out)
    assert len(report["oracle"]["changed_counts"]) == 6
    assert (out / "frame_0005.pgm").exists()
    assert (out / "changed_0005.pgm").exists()


def test_synth_regenerates_bit_identical(tmp_path):
    spec_path = tmp_path / "scene.json"
    spec_path.write_text(json.dumps(scene_spec_to_dict(cabin_scene())))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["synth", str(spec_path), "--out", str(out_a)]) == EXIT_OK
    assert main(["synth", str(spec_path), "--out", str(out_b)]) == EXIT_OK
    assert (out_a / "frame_0000.pgm").read_bytes() == (out_b / "frame_0000.pgm").read_bytes()


def test_synth_different_seed_same_geometry(tmp_path):
    doc = scene_spec_to_dict(cabin_scene())
    a_path, b_path = tmp_path / "a.json", tmp_path / "b.json"
    a_path.write_text(json.dumps(doc))
    doc["rng_seed"] = doc["rng_seed"] + 1
    b_path.write_text(json.dumps(doc))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(["synth", str(a_path), "--out", str(out_a)])
    main(["synth", str(b_path), "--out", str(out_b)])
    assert (out_a / "frame_0000.pgm").read_bytes() != (out_b / "frame_0000.pgm").read_bytes()
    for i in range(3):
        assert (out_a / f"blob_{i:02d}.pgm").read_bytes() == (out_b / f"blob_{i:02d}.pgm").read_bytes()


def test_synth_invalid_spec_is_input_error(tmp_path):
    spec_path = tmp_path / "bad.json"
    spec_path.write_text('{"dims": [0, 10]}')
    assert main(["synth", str(spec_path), "--out", str(tmp_path / "o")]) == EXIT_INPUT


@pytest.mark.parametrize(
    "name",
    ["four_people.json", "same_depth_pair.json", "ramp_floor.json", "cabin_reach.json"],
)
def test_bundled_specs_generate(tmp_path, name):
    from pathlib import Path

    spec_path = Path(__file__).resolve().parent.parent / "demos" / "specs" / name
    out = tmp_path / "out"
    assert main(["synth", str(spec_path), "--out", str(out)]) == EXIT_OK
    assert (out / "frame_0000.pgm").exists()


# ---------------------------------------------------------------------------
# config handling and determinism
# ---------------------------------------------------------------------------


def strip_timings(path):
    doc = json.loads(path.read_text())
    doc.pop("timings")
    return json.dumps(doc, sort_keys=True)


def test_cli_flags_override_config_file(tmp_path):
    frames_dir = tmp_path / "frames"
    write_sequence(frames_dir, small_reach())
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"area_alert_pct": 5.0, "persistence": 3}))
    out = tmp_path / "out"
    code = main(
        [
            "monitor", str(frames_dir),
            "--config", str(cfg),
            "--out", str(out),
            "--alert-pct", "99.0",
        ]
    )
    assert code == EXIT_OK
    report = read_report(out)
    assert report["config"]["area_alert_pct"] == 99.0  # flag wins
    assert report["config"]["persistence"] == 3  # file survives
    assert report["alerts"] == []  # 99% is never reached


def test_reports_are_deterministic_modulo_timings(tmp_path):
    frame_path = tmp_path / "cabin.pgm"
    write_frame(frame_path, cabin_scene())
    frames_dir = tmp_path / "frames"
    write_sequence(frames_dir, small_reach(frame_count=8))

    for command, extra in (
        (["segment", str(frame_path)], []),
        (["locate-driver", str(frame_path)], []),
        (["monitor", str(frames_dir)], []),
    ):
        out_a, out_b = tmp_path / "ra", tmp_path / "rb"
        assert main([*command, "--out", str(out_a), *extra]) == EXIT_OK
        assert main([*command, "--out", str(out_b), *extra]) == EXIT_OK
        assert strip_timings(out_a / "report.json") == strip_timings(out_b / "report.json")
        ndjson = out_a / "motion.ndjson"
        if ndjson.exists():
            assert ndjson.read_bytes() == (out_b / "motion.ndjson").read_bytes()
