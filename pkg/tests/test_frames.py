import numpy as np
import pytest

import depthseg as ds


def test_rect_validation():
    with pytest.raises(ValueError):
        ds.Rect(0, 0, 0, 5)
    with pytest.raises(ValueError):
        ds.Rect(-1, 0, 5, 5)
    r = ds.Rect(2, 3, 4, 5)
    assert r.slices == (slice(3, 8), slice(2, 6))
    assert r.area == 20


def test_depth_frame_invariants():
    with pytest.raises(ValueError):
        ds.DepthFrame(np.zeros((0, 4), dtype=np.uint16))
    with pytest.raises(ValueError):
        ds.DepthFrame(np.array([[70000]]))
    with pytest.raises(ValueError):
        ds.DepthFrame(np.array([[-1]]))
    frame = ds.DepthFrame(np.array([[0, 500], [500, 700]]))
    assert frame.width == 2 and frame.height == 2
    with pytest.raises(ValueError):
        frame.data[0, 0] = 1  # frozen backing array


def test_crop_full_frame_is_identity():
    frame = ds.DepthFrame(np.arange(12, dtype=np.uint16).reshape(3, 4))
    assert ds.crop(frame, ds.Rect(0, 0, 4, 3)) == frame


def test_crop_interior_values():
    ramp = ds.DepthFrame(np.arange(16, dtype=np.uint16).reshape(4, 4))
    inner = ds.crop(ramp, ds.Rect(1, 1, 2, 2))
    assert inner.data.tolist() == [[5, 6], [9, 10]]


def test_crop_matches_driver_window_dims():
    # 480x640 full image down to the tracked 370x460 window
    frame = ds.DepthFrame(np.full((480, 640), 1200, dtype=np.uint16))
    window = ds.crop(frame, ds.Rect(90, 55, 460, 370))
    assert (window.width, window.height) == (460, 370)


def test_crop_out_of_bounds():
    frame = ds.DepthFrame(np.zeros((4, 4), dtype=np.uint16))
    with pytest.raises(ValueError):
        ds.crop(frame, ds.Rect(2, 2, 3, 3))


def test_crop_never_alters_values():
    rng = np.random.default_rng(0)
    data = rng.integers(0, 3000, size=(20, 30)).astype(np.uint16)
    frame = ds.DepthFrame(data)
    rect = ds.Rect(5, 7, 11, 9)
    assert np.array_equal(ds.crop(frame, rect).data, data[7:16, 5:16])


def test_valid_pixel_count():
    assert ds.valid_pixel_count(ds.DepthFrame(np.array([[0, 500], [500, 700]]))) == 3
    assert ds.valid_pixel_count(ds.DepthFrame(np.zeros((3, 3), dtype=np.uint16))) == 0


def test_valid_pixel_count_matches_oracle_blob_area():
    blob = ds.BlobSpec("rectangle", ds.Rect(4, 5, 10, 12), 900, 0)
    frame, oracle = ds.gen_scene(
        ds.SceneSpec(width=32, height=32, background=None, blobs=(blob,))
    )
    assert ds.valid_pixel_count(frame) == oracle.blob_counts[0] == 120


def test_valid_plus_zero_is_total():
    rng = np.random.default_rng(1)
    for _ in range(20):
        data = rng.integers(0, 4, size=(9, 13)).astype(np.uint16) * 700
        frame = ds.DepthFrame(data)
        zeros = int((data == 0).sum())
        assert ds.valid_pixel_count(frame) + zeros == 9 * 13


def test_mask_bbox_and_count():
    bits = np.zeros((6, 8), dtype=bool)
    bits[2:5, 3:6] = True
    mask = ds.PixelMask(bits)
    assert mask.count == 9
    assert mask.bbox() == ds.Rect(3, 2, 3, 3)
    with pytest.raises(ValueError):
        ds.PixelMask(np.zeros((2, 2), dtype=bool)).bbox()


def test_crop_mask_windows_bits():
    bits = np.zeros((5, 5), dtype=bool)
    bits[1, 1] = True
    cropped = ds.crop_mask(ds.PixelMask(bits), ds.Rect(1, 1, 2, 2))
    assert cropped.bits.tolist() == [[True, False], [False, False]]
