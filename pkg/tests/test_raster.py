import numpy as np
import pytest

from screenscale.raster import (
    BlockGrid,
    MalformedHeaderError,
    Raster,
    TruncatedPayloadError,
    UnsupportedMaxValueError,
    load_image,
    round_to_raster,
    save_image,
    scaled_size,
    to_luma,
)


def test_load_p6_bytes_pass_through(tmp_path):
    p = tmp_path / "a.ppm"
    p.write_bytes(b"P6\n2 1\n255\n" + bytes([0, 0, 0, 255, 255, 255]))
    r = load_image(p)
    assert (r.width, r.height, r.channels) == (2, 1, 3)
    np.testing.assert_array_equal(r.samples[0], [[0, 0, 0], [255, 255, 255]])


def test_load_p5_single_pixel(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5 1 1 255\n" + bytes([128]))
    r = load_image(p)
    assert (r.width, r.height, r.channels) == (1, 1, 1)
    assert r.samples[0, 0, 0] == 128


def test_header_comments_are_skipped(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# made by hand\n2 # width\n1\n255\n" + bytes([7, 9]))
    np.testing.assert_array_equal(load_image(p).samples[..., 0], [[7, 9]])


def test_payload_bytes_that_look_like_whitespace_are_data(tmp_path):
    p = tmp_path / "w.pgm"
    p.write_bytes(b"P5\n2 1\n255\n" + bytes([10, 32]))
    np.testing.assert_array_equal(load_image(p).samples[..., 0], [[10, 32]])


@pytest.mark.parametrize(
    "data, error",
    [
        (b"P5\n4 4\n255\n" + bytes(10), TruncatedPayloadError),
        (b"P3\n1 1\n255\n0 0 0", MalformedHeaderError),
        (b"P5\n1\n", MalformedHeaderError),
        (b"P5\nx 1\n255\n" + bytes(1), MalformedHeaderError),
        (b"P5\n0 1\n255\n", MalformedHeaderError),
        (b"P5\n1 1\n65535\n" + bytes(2), UnsupportedMaxValueError),
        (b"P5\n1 1\n15\n" + bytes(1), UnsupportedMaxValueError),
    ],
)
def test_load_errors_are_distinct(tmp_path, data, error):
    p = tmp_path / "bad.pgm"
    p.write_bytes(data)
    with pytest.raises(error):
        load_image(p)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.ppm")


def test_save_load_round_trip(tmp_path, rng):
    for shape in [(5, 7, 3), (3, 4, 1), (1, 1, 3)]:
        r = Raster(rng.integers(0, 256, shape, dtype=np.uint8))
        p = tmp_path / "rt.pnm"
        save_image(r, p)
        assert load_image(p) == r


def test_saved_file_size(tmp_path):
    r = Raster(np.zeros((1152, 1920, 3), dtype=np.uint8))
    p = tmp_path / "big.ppm"
    save_image(r, p)
    header = b"P6\n1920 1152\n255\n"
    assert p.stat().st_size == 1920 * 1152 * 3 + len(header)


def test_save_rejects_empty_path():
    with pytest.raises(ValueError):
        save_image(Raster(np.zeros((1, 1), dtype=np.uint8)), "")


def test_png_round_trip(tmp_path, rng):
    Image = pytest.importorskip("PIL.Image")
    arr = rng.integers(0, 256, (6, 5, 3), dtype=np.uint8)
    Image.fromarray(arr).save(tmp_path / "x.png")
    np.testing.assert_array_equal(load_image(tmp_path / "x.png").samples, arr)


def test_raster_is_immutable():
    r = Raster(np.zeros((2, 2, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        r.samples[0, 0, 0] = 1


@pytest.mark.parametrize("bad", [np.zeros((2, 2, 2), np.uint8), np.zeros((0, 3), np.uint8),
                                 np.zeros((2, 2), np.float64)])
def test_raster_validation(bad):
    with pytest.raises((ValueError, TypeError)):
        Raster(bad)


def test_luma_values():
    r = Raster(np.array([[[255, 0, 0], [7, 7, 7], [0, 0, 255]]], dtype=np.uint8))
    np.testing.assert_allclose(to_luma(r)[0], [0.299 * 255, 7.0, 0.114 * 255], atol=1e-12)
    assert to_luma(r)[0, 0] == pytest.approx(76.245, abs=1e-12)


def test_luma_of_gray_raster_is_copy(rng):
    g = rng.integers(0, 256, (4, 6), dtype=np.uint8)
    np.testing.assert_array_equal(to_luma(Raster(g)), g.astype(float))


@pytest.mark.parametrize("v, q", [(127.5, 128), (-3.2, 0), (260.0, 255), (100.0, 100),
                                  (0.49999, 0), (254.5, 255), (-0.5, 0), (2.5, 3)])
def test_round_to_raster(v, q):
    assert round_to_raster(np.array([[v]])).samples[0, 0, 0] == q


def test_round_to_raster_rejects_nan():
    with pytest.raises(ValueError):
        round_to_raster(np.array([[np.nan]]))


def test_block_grid_counts():
    g = BlockGrid(1280, 768)
    assert (g.blocks_x, g.blocks_y, g.count) == (80, 48, 3840)
    g = BlockGrid(17, 33)
    assert (g.blocks_x, g.blocks_y) == (2, 3)
    assert g.pixel_count(1, 2) == 1
    assert g.block_of(16, 32) == (1, 2)


def test_scaled_size():
    assert scaled_size(1280, 1.5) == 1920
    assert scaled_size(768, 1.5) == 1152
    assert scaled_size(3, 0.5) == 2  # 1.5 rounds up
    assert scaled_size(5, 0.5) == 3
