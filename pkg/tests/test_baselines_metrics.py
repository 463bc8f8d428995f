import math

import numpy as np
import pytest

import oracles
from screenscale.baselines import (
    bicubic_2pass_planes,
    bicubic_planes,
    bilinear_planes,
    keys_weights,
    scale_bicubic,
    scale_bicubic_2pass,
    scale_bilinear,
)
from screenscale.methods import METHODS, scale_by_method
from screenscale.metrics import complexity_bounds, count_ops, psnr
from screenscale.opcount import OpCounter
from screenscale.raster import Raster


def test_bilinear_midpoint():
    out = bilinear_planes(np.array([[0.0, 255.0]]), 1.5)
    # output columns sit at 0, 2/3 and clip to 1
    np.testing.assert_allclose(out[0, :, 0], [0.0, 170.0, 255.0])
    assert oracles.linear_eval([0, 255], 0.5) == 127.5
    assert scale_bilinear(Raster(np.array([[0, 255]], np.uint8)), 2.0).samples[0, 1, 0] == 128


def test_bilinear_matches_reference(rng):
    for factor in (0.7, 1.5, 2.0, 3.3):
        img = rng.integers(0, 256, (13, 17, 3)).astype(float)
        np.testing.assert_allclose(bilinear_planes(img, factor), oracles.bilinear_scale(img, factor), atol=1e-9)


def test_keys_weights_partition_unity(rng):
    t = rng.random(50)
    np.testing.assert_allclose(keys_weights(t).sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(keys_weights(0.0), [0, 1, 0, 0], atol=1e-15)
    for ti in t[:5]:
        expected = [oracles.keys(ti + 1), oracles.keys(ti), oracles.keys(1 - ti), oracles.keys(2 - ti)]
        np.testing.assert_allclose(keys_weights(ti), expected, atol=1e-12)


def test_bicubic_matches_reference(rng):
    img = rng.integers(0, 256, (11, 14)).astype(float)
    factor = 1.7
    out = bicubic_planes(img, factor)[..., 0]
    h_out, w_out = out.shape
    for j in range(h_out):
        for i in range(w_out):
            cols = [oracles.bicubic_eval(list(img[r]), i / factor) for r in range(img.shape[0])]
            assert out[j, i] == pytest.approx(oracles.bicubic_eval(cols, j / factor), abs=1e-9)


def test_bicubic_direct_equals_two_pass(rng):
    img = rng.integers(0, 256, (21, 30, 3)).astype(float)
    for factor in (0.6, 1.5, 2.2):
        np.testing.assert_allclose(bicubic_planes(img, factor), bicubic_2pass_planes(img, factor), atol=1e-9)
    r = Raster(img.astype(np.uint8))
    assert scale_bicubic(r, 1.5) == scale_bicubic_2pass(r, 1.5)


def test_bicubic_reproduces_quadratics_in_interior():
    x = np.arange(20.0)
    f = 0.5 * x**2 - 3 * x + 7
    out = bicubic_planes(f[None, :], 2.0)[0, :, 0]
    xs = np.arange(out.size) / 2.0
    interior = (xs >= 1) & (xs <= 18)
    np.testing.assert_allclose(out[interior], 0.5 * xs[interior] ** 2 - 3 * xs[interior] + 7, atol=1e-9)


@pytest.mark.parametrize("method", METHODS)
def test_constant_preserved(method):
    r = Raster(np.full((20, 20, 3), (4, 100, 250), np.uint8))
    out = scale_by_method(method, r, 1.5)
    assert np.all(out.samples == np.array([4, 100, 250], np.uint8))


def test_unknown_method():
    with pytest.raises(ValueError):
        scale_by_method("lanczos", Raster(np.zeros((4, 4), np.uint8)), 2.0)


def test_psnr_values():
    a = Raster(np.zeros((16, 16), np.uint8))
    b = Raster(np.ones((16, 16), np.uint8))
    assert psnr(a, b).psnr == pytest.approx(48.1308, abs=1e-4)
    c = Raster(np.full((16, 16), 16, np.uint8))
    assert psnr(a, c).psnr == pytest.approx(24.0484, abs=1e-4)
    same = psnr(a, a)
    assert same.identical and math.isinf(same.psnr) and same.psnr_label() == "identical"
    with pytest.raises(ValueError):
        psnr(a, Raster(np.zeros((16, 15), np.uint8)))


def test_psnr_per_channel():
    a = np.zeros((4, 4, 3), np.uint8)
    b = a.copy()
    b[..., 1] = 1
    q = psnr(Raster(a), Raster(b))
    assert q.channel_mse == (0.0, 1.0, 0.0)
    assert q.mse == pytest.approx(1 / 3)


def test_unit_factor_prefilter_count_within_budget(rng):
    r = Raster(rng.integers(0, 256, (32, 32, 3), dtype=np.uint8))
    _, ops = count_ops("adaptive", r, 1.0)
    n = r.samples.size
    pre = ops.phase("prefilter")
    assert pre["additions"] <= 4 * n and pre["multiplications"] <= 4 * n


@pytest.mark.parametrize("factor", [0.5, 1.5, 2.0])
def test_interpolation_count_within_budget(rng, factor):
    r = Raster(rng.integers(0, 256, (32, 48, 3), dtype=np.uint8))
    out, ops = count_ops("adaptive", r, factor)
    n_mid = 32 * out.width * 3
    interp = ops.phase("interpolation")
    assert interp["multiplications"] <= 4 * (n_mid + out.samples.size)
    add_bound, mul_bound = complexity_bounds(48, 32, 3, out.width, out.height)
    assert ops.additions <= add_bound and ops.multiplications <= mul_bound


@pytest.mark.parametrize("method", METHODS)
def test_counting_leaves_output_unchanged(rng, method):
    r = Raster(rng.integers(0, 256, (24, 40, 3), dtype=np.uint8))
    out, ops = count_ops(method, r, 1.5)
    assert out == scale_by_method(method, r, 1.5)
    assert ops.additions > 0 and ops.multiplications > 0


def test_baseline_counts():
    r = Raster(np.zeros((10, 10), np.uint8))
    _, ops = count_ops("bicubic", r, 2.0)
    assert (ops.additions, ops.multiplications) == (16 * 400, 20 * 400)
    _, ops = count_ops("bilinear", r, 2.0)
    assert (ops.additions, ops.multiplications) == (200 + 400, 2 * (200 + 400))


def test_counter_rejects_negative():
    with pytest.raises(ValueError):
        OpCounter().tally("x", adds=-1)


def test_complexity_bounds_example():
    assert complexity_bounds(16, 16, 1, 32, 32) == (9 * 256 + 8 * 1024 + 4, 4 * 256 + 8 * 1024)
