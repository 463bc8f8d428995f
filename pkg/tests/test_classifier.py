import json

import numpy as np
import pytest

import oracles
from screenscale import synth
from screenscale.classifier import (
    ClassifierParams,
    ContentMap,
    ContentType,
    base_color_count,
    classify_block,
    classify_image,
    classify_raster,
    count_high_gradient,
    major_type_of,
)
from screenscale.opcount import OpCounter
from screenscale.raster import BlockGrid, Raster, to_luma

T, P = ContentType.TEXT, ContentType.PICTORIAL


def stripes():
    row = np.tile([0, 255], 8).astype(np.uint8)
    return np.tile(row, (16, 1))


def test_high_gradient_examples():
    assert count_high_gradient(np.full((16, 16), 77.0), 32) == 0
    assert count_high_gradient(stripes(), 32) == 240
    ramp = np.tile(np.arange(16.0), (16, 1))
    assert count_high_gradient(ramp, 32) == 0


def test_high_gradient_matches_brute_force(rng):
    for _ in range(30):
        h, w = rng.integers(1, 17, 2)
        block = rng.integers(0, 256, (h, w)).astype(float) * rng.random()
        g = float(rng.uniform(1, 80))
        assert count_high_gradient(block, g) == oracles.count_high_gradient(block.tolist(), g)


def test_base_color_examples():
    assert base_color_count(np.full((16, 16, 3), 10, np.uint8)) == ((10, 10, 10), 256)
    bw = np.zeros((16, 16, 3), np.uint8)
    bw[:8] = 255
    assert base_color_count(bw) == ((0, 0, 0), 128)


def test_base_color_constructed_fixture(rng):
    vals = np.concatenate([rng.choice([9, 11], 100), np.full(100, 10),
                           rng.choice(np.r_[0:7, 14:256], 56)])
    # make 10 the strict mode
    vals[:100] = np.where(np.arange(100) < 50, 9, 11)
    block = rng.permutation(vals).reshape(16, 16).astype(np.uint8)
    base, n = base_color_count(block)
    assert base == (10,)
    assert n == 200


def test_base_color_matches_brute_force(rng):
    for _ in range(40):
        palette = rng.integers(0, 256, (int(rng.integers(1, 6)), 3))
        block = palette[rng.integers(0, len(palette), (16, 16))]
        block = np.clip(block + rng.integers(-3, 4, block.shape) * (rng.random(block.shape) < 0.3), 0, 255)
        block = block.astype(np.uint8)
        expected = oracles.base_color_count([tuple(int(v) for v in p) for p in block.reshape(-1, 3)])
        assert base_color_count(block) == expected


def test_classify_block_examples():
    assert classify_block(np.full((16, 16, 3), 50, np.uint8)) == P
    assert classify_block(stripes()) == T


def test_noise_blocks_are_pictorial():
    rng = np.random.default_rng(99)
    labels = [classify_block(rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)) for _ in range(200)]
    assert labels.count(P) / len(labels) >= 0.99


def test_step1_dominates_color_statistics():
    # two colors only (N_BC high) but few edges: 16 high-gradient pixels < L1
    block = np.zeros((16, 16, 3), np.uint8)
    block[:, 8:] = 255
    assert count_high_gradient(to_luma(Raster(block)), 32) == 16
    assert classify_block(block, neighbor_labels=(T, T, T)) == P


def test_neighbour_context_raises_threshold():
    # 128 + 20 pixels near black, the rest noise: N_BC = 148 lies between L2_low and L2_high
    rng = np.random.default_rng(3)
    block = rng.integers(100, 256, (256, 3))
    block[:148] = rng.integers(0, 3, (148, 3))
    block = rng.permutation(block).reshape(16, 16, 3).astype(np.uint8)
    assert 100 < base_color_count(block)[1] <= 160
    assert classify_block(block, neighbor_labels=(P, P, P)) == P
    for ctx in [(T, P, P), (P, T, P), (P, P, T), (None, P, P), (None, None, None)]:
        assert classify_block(block, neighbor_labels=ctx) == T


def test_polarity_flag_reverses_step2():
    flipped = ClassifierParams(text_if_concentrated=False)
    assert classify_block(stripes(), flipped) == P


@pytest.mark.parametrize("kw", [dict(l1=0), dict(l1=300), dict(l2_low=200, l2_high=100),
                                dict(l2_high=257), dict(gradient_threshold=0)])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        ClassifierParams(**kw)


def test_params_aliases():
    p = ClassifierParams.from_dict({"G": 20, "L1": 10, "L2_low": 90, "L2_high": 150})
    assert p == ClassifierParams(20, 10, 90, 150)


def _reference_labels(img, params=ClassifierParams()):
    h, w = img.shape[:2]
    grid = BlockGrid(w, h)
    lab = np.zeros((grid.blocks_y, grid.blocks_x), int)
    for bx, by in grid:
        rows, cols = grid.bounds(bx, by)
        nb = (lab[by, bx - 1] if bx else None, lab[by - 1, bx] if by else None,
              lab[by - 1, bx - 1] if bx and by else None)
        lab[by, bx] = classify_block(img[rows, cols], params, nb)
    return lab


def test_whole_image_matches_per_block_reference(rng):
    for trial in range(12):
        h, w = rng.integers(1, 80, 2)
        if trial % 3 == 0:
            img = rng.integers(0, 256, (h, w, 3))
        elif trial % 3 == 1:
            img = rng.integers(0, 4, (h, w, 3)) * 85
        else:
            img = synth.screen(max(w, 16), max(h, 16), seed=trial).raster.samples[:h, :w]
        img = np.ascontiguousarray(img, dtype=np.uint8)
        np.testing.assert_array_equal(classify_raster(Raster(img)).block_labels, _reference_labels(img))


def test_gray_images_classify(rng):
    img = (rng.integers(0, 2, (32, 48)) * 255).astype(np.uint8)
    np.testing.assert_array_equal(classify_raster(Raster(img)).block_labels, _reference_labels(img[..., None]))


def test_constant_image():
    cmap = classify_raster(Raster(np.full((40, 40, 3), 9, np.uint8)))
    assert np.all(cmap.block_labels == P)
    assert cmap.major_type == P
    assert np.all(cmap.mask_raster().samples == 0)


def test_single_block_image():
    cmap = classify_raster(Raster(stripes()))
    assert cmap.block_labels.shape == (1, 1)
    assert cmap.major_type == T


def test_text_and_gradient_composite():
    comp = synth.text_and_gradient()
    cmap = classify_raster(comp.raster)
    assert comp.agreement(cmap.block_labels) >= 0.9
    assert np.all(cmap.block_labels[:, :4] == T)
    assert np.all(cmap.block_labels[:, -4:] == P)


def test_classify_image_checks_luma_shape():
    r = Raster(np.zeros((16, 16, 3), np.uint8))
    with pytest.raises(ValueError):
        classify_image(np.zeros((8, 8)), r)


def test_classify_image_uses_given_luma():
    # striped colors, but a flat luma plane: step 1 sees no gradients
    assert classify_image(np.zeros((16, 16)), Raster(stripes())).major_type == P
    assert classify_image(to_luma(Raster(stripes())), Raster(stripes())).major_type == T


def test_major_type_tie_goes_to_text():
    assert major_type_of(np.array([[0, 1]])) == T
    assert major_type_of(np.array([[0, 0, 1]])) == P


def test_pixel_labels_follow_blocks():
    labels = np.array([[1, 0], [0, 1]], np.uint8)
    cmap = ContentMap(20, 17, labels, T)
    px = cmap.pixel_labels()
    assert px.shape == (17, 20)
    assert px[15, 15] == 1 and px[15, 16] == 0 and px[16, 19] == 1
    assert cmap.label_at(19, 16) == T


def test_content_map_shape_checked():
    with pytest.raises(ValueError):
        ContentMap(32, 32, np.zeros((1, 1), np.uint8), P)


def test_summary_is_json():
    cmap = classify_raster(synth.text_and_gradient().raster)
    d = json.loads(json.dumps(cmap.summary(ClassifierParams())))
    assert d["blocks_x"] == 16 and d["blocks_y"] == 8
    assert d["major_type"] in ("text", "pictorial")
    assert d["labels"][0][0] == "text"
    assert d["params"]["l1"] == 20


def test_deterministic():
    r = synth.screen(160, 96, seed=4).raster
    np.testing.assert_array_equal(classify_raster(r).block_labels, classify_raster(r).block_labels)


def test_classification_op_counts():
    r = Raster(np.full((32, 32, 3), 5, np.uint8))
    c = OpCounter()
    classify_raster(r, counter=c)
    ph = c.counts().phase("classification")
    # luma: 2 adds + 3 muls per pixel; step 1: 5 adds per pixel + 1 per block; no step 2
    assert ph == {"additions": 2 * 1024 + 5 * 1024 + 4, "multiplications": 3 * 1024}
