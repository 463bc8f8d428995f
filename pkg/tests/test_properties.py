import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from screenscale.classifier import ClassifierParams, ContentType, base_color_count, classify_block
from screenscale.config import Config
from screenscale.raster import BlockGrid, Raster, load_image, luma_from_planes, save_image
from screenscale.sli import OffsetTable, ScaleJob, interpolate_1d, prefilter_1d, scale_fixed_sli_planes
from screenscale.spectral import SweepSettings, error_kernel, fit_and_minimize, interpolation_error_1d

T, P = ContentType.TEXT, ContentType.PICTORIAL

taus = st.floats(0.0, 0.45)
samples = st.floats(-1000, 1000, allow_nan=False)
u8 = st.integers(0, 255)
common = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])


@common
@given(st.lists(samples, min_size=1, max_size=50), taus)
def test_integer_positions_reproduce_samples(f, tau):
    c = prefilter_1d(f, tau)
    np.testing.assert_allclose(interpolate_1d(c, tau, np.arange(len(f))), f, atol=1e-9)


@common
@given(u8, st.integers(4, 40), st.integers(4, 40), st.floats(0.3, 3.0), taus)
def test_constant_images_stay_constant(v, h, w, factor, tau):
    planes = scale_fixed_sli_planes(Raster(np.full((h, w), v, np.uint8)), factor, tau)
    np.testing.assert_allclose(planes, v, atol=1e-9)


@common
@given(arrays(np.float64, (5, 7, 3), elements=st.floats(0, 255)),
       arrays(np.float64, (5, 7, 3), elements=st.floats(0, 255)),
       st.floats(-4, 4), st.floats(-4, 4))
def test_luma_is_linear(x, y, a, b):
    np.testing.assert_allclose(luma_from_planes(a * x + b * y),
                               a * luma_from_planes(x) + b * luma_from_planes(y), atol=1e-9)


@common
@given(st.integers(1, 100), st.integers(1, 100))
def test_block_grid_covers_each_pixel_once(w, h):
    g = BlockGrid(w, h)
    hits = np.zeros((h, w), int)
    for bx, by in g:
        rows, cols = g.bounds(bx, by)
        hits[rows, cols] += 1
        assert g.pixel_count(bx, by) >= 1
    assert np.all(hits == 1)


@common
@given(arrays(np.uint8, (16, 16, 3), elements=st.sampled_from([0, 1, 2, 5, 128, 200, 255])), st.randoms())
def test_base_color_ignores_pixel_order(block, rnd):
    order = list(range(256))
    rnd.shuffle(order)  # shuffling numpy rows in place would alias them
    shuffled = block.reshape(-1, 3)[order].reshape(16, 16, 3)
    assert base_color_count(shuffled) == base_color_count(block)


@common
@given(arrays(np.uint8, (16, 16, 3), elements=st.sampled_from([0, 3, 60, 250])),
       st.tuples(*[st.sampled_from([T, P, None])] * 3))
def test_pictorial_context_only_makes_text_harder(block, ctx):
    if classify_block(block, neighbor_labels=(P, P, P)) == T:
        assert classify_block(block, neighbor_labels=ctx) == T


@common
@given(taus)
def test_kernel_vanishes_at_dc(tau):
    assert abs(float(error_kernel(tau, 0.0))) <= 1e-12


@common
@given(arrays(np.float64, 16, elements=st.floats(0, 1e4)), st.floats(1e-3, 1e3))
def test_argmin_ignores_density_scale(d, k):
    grid = SweepSettings().grid()
    a = fit_and_minimize(grid, [interpolation_error_1d(d, t) for t in grid])
    b = fit_and_minimize(grid, [interpolation_error_1d(k * d, t) for t in grid])
    assert a.at_boundary == b.at_boundary
    assert abs(a.tau_star - b.tau_star) <= 1e-6


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(1, 20), st.integers(1, 20), st.sampled_from([1, 3]), st.data())
def test_save_load_round_trip(tmp_path, h, w, c, data):
    img = data.draw(arrays(np.uint8, (h, w, c)))
    r = Raster(img)
    p = tmp_path / "r.pnm"
    save_image(r, p)
    assert load_image(p) == r


@common
@given(st.integers(1, 64), st.integers(1, 64), st.integers(101, 200), st.integers(1, 56),
       taus, taus, taus, taus)
def test_config_round_trip(g, l1, l2_low, extra, a, b, c, d):
    cfg = Config(ClassifierParams(g, l1, l2_low, l2_low + extra), OffsetTable(a, b, c, d))
    assert Config.from_dict(cfg.to_dict()) == cfg


@common
@given(st.floats(0.3, 3.0))
def test_job_output_size_positive(factor):
    assert ScaleJob(factor).factor == factor
