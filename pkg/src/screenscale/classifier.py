"""Two-step 16x16 block classification of screen images into text and pictorial content.

Step 1 marks a block pictorial when it has few high-gradient pixels. Blocks
that survive are judged by how strongly their colors concentrate around the
block's base (modal) color, against a threshold that is raised when the
left, upper and upper-left neighbors are all pictorial.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .opcount import OpCounter, tally
from .raster import BLOCK_SIZE, BlockGrid, Raster, to_luma

# Text when N_BC > L2 (colors concentrated on a base color). Flip to
# reproduce the literal reading where concentration means pictorial.
TEXT_IF_CONCENTRATED = True

BASE_COLOR_TOLERANCE = 2

_BLOCK_PIXELS = BLOCK_SIZE * BLOCK_SIZE


class ContentType(enum.IntEnum):
    PICTORIAL = 0
    TEXT = 1

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, name: str) -> "ContentType":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown content type {name!r}") from None


@dataclass(frozen=True)
class ClassifierParams:
    gradient_threshold: float = 32.0
    l1: float = 20.0
    l2_low: float = 100.0
    l2_high: float = 160.0
    text_if_concentrated: bool = TEXT_IF_CONCENTRATED

    def __post_init__(self):
        if not self.gradient_threshold > 0:
            raise ValueError("gradient_threshold must be > 0")
        if not 0 < self.l1 <= _BLOCK_PIXELS:
            raise ValueError("need 0 < L1 <= 256")
        if not 0 < self.l2_low < self.l2_high <= _BLOCK_PIXELS:
            raise ValueError("need 0 < L2_low < L2_high <= 256")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierParams":
        aliases = {"G": "gradient_threshold", "L1": "l1", "L2_low": "l2_low", "L2_high": "l2_high"}
        kw = {aliases.get(k, k): v for k, v in d.items()}
        return cls(**kw)


@dataclass(frozen=True)
class ContentMap:
    """Block labels of one frame plus its major (most frequent) block type."""

    width: int
    height: int
    block_labels: np.ndarray  # (blocks_y, blocks_x) uint8 of ContentType values
    major_type: ContentType

    def __post_init__(self):
        labels = np.array(self.block_labels, dtype=np.uint8)
        grid = BlockGrid(self.width, self.height)
        if labels.shape != (grid.blocks_y, grid.blocks_x):
            raise ValueError(f"label grid {labels.shape} does not match {grid.blocks_y}x{grid.blocks_x}")
        labels.setflags(write=False)
        object.__setattr__(self, "block_labels", labels)

    @property
    def grid(self) -> BlockGrid:
        return BlockGrid(self.width, self.height)

    def pixel_labels(self) -> np.ndarray:
        """Per-pixel labels, shape ``(height, width)``."""
        full = np.repeat(np.repeat(self.block_labels, BLOCK_SIZE, axis=0), BLOCK_SIZE, axis=1)
        return full[: self.height, : self.width]

    def label_at(self, x: int, y: int) -> ContentType:
        return ContentType(int(self.block_labels[y // BLOCK_SIZE, x // BLOCK_SIZE]))

    @classmethod
    def uniform(cls, width: int, height: int, kind: ContentType) -> "ContentMap":
        grid = BlockGrid(width, height)
        labels = np.full((grid.blocks_y, grid.blocks_x), int(kind), dtype=np.uint8)
        return cls(width, height, labels, ContentType(kind))

    def mask_raster(self) -> Raster:
        """One pixel per block: text = 255, pictorial = 0."""
        return Raster((self.block_labels == ContentType.TEXT).astype(np.uint8) * 255)

    def summary(self, params: Optional[ClassifierParams] = None) -> dict:
        grid = self.grid
        d = {
            "blocks_x": grid.blocks_x,
            "blocks_y": grid.blocks_y,
            "labels": [[ContentType(int(v)).label for v in row] for row in self.block_labels],
            "major_type": self.major_type.label,
        }
        if params is not None:
            d["params"] = params.to_dict()
        return d


def major_type_of(block_labels: np.ndarray) -> ContentType:
    """Modal block label; equal counts resolve to text."""
    n_text = int(np.count_nonzero(block_labels == ContentType.TEXT))
    n_pict = block_labels.size - n_text
    return ContentType.TEXT if n_text >= n_pict else ContentType.PICTORIAL


# -- per-block features --------------------------------------------------------

def _high_gradient_mask(luma: np.ndarray, threshold: float, tile: int) -> np.ndarray:
    """Pixels whose forward-difference magnitude exceeds ``threshold``.

    Differences never cross a tile boundary; where the forward neighbor is
    missing only the other direction counts.
    """
    luma = np.asarray(luma, dtype=np.float64)
    h, w = luma.shape
    dh = np.zeros_like(luma)
    dv = np.zeros_like(luma)
    dh[:, :-1] = np.abs(luma[:, 1:] - luma[:, :-1])
    dv[:-1, :] = np.abs(luma[1:, :] - luma[:-1, :])
    dh[:, tile - 1 :: tile] = 0.0
    dv[tile - 1 :: tile, :] = 0.0
    return np.maximum(dh, dv) > threshold


def count_high_gradient(block: np.ndarray, threshold: float) -> int:
    """N_HG: number of pixels with ``max(|dh|, |dv|) > threshold`` inside one block."""
    block = np.asarray(block, dtype=np.float64)
    if block.size == 0:
        raise ValueError("empty block")
    if block.ndim == 3:
        block = block[:, :, 0] if block.shape[2] == 1 else to_luma(Raster(block.astype(np.uint8)))
    tile = max(block.shape)
    return int(np.count_nonzero(_high_gradient_mask(block, threshold, tile)))


def _color_codes(pixels: np.ndarray) -> np.ndarray:
    """Pack 8-bit colors into integers that sort channel-lexicographically."""
    p = np.asarray(pixels).astype(np.int64)
    if p.ndim == 2 or p.shape[-1] == 1:
        return p.reshape(p.shape[:2])
    return (p[..., 0] << 16) | (p[..., 1] << 8) | p[..., 2]


def _unpack(code: int, channels: int) -> Tuple[int, ...]:
    if channels == 1:
        return (int(code),)
    return ((code >> 16) & 0xFF, (code >> 8) & 0xFF, code & 0xFF)


def base_color_count(block: np.ndarray) -> Tuple[Tuple[int, ...], int]:
    """Return ``(base_color, N_BC)`` for one block of 8-bit pixels.

    The base color is the most frequent exact color (ties go to the smallest
    color); N_BC counts pixels whose every channel lies within +-2 of it.
    """
    block = np.asarray(block)
    if block.size == 0:
        raise ValueError("empty block")
    if block.ndim == 2:
        block = block[:, :, None]
    channels = block.shape[2]
    codes = _color_codes(block).ravel()
    values, counts = np.unique(codes, return_counts=True)
    base_code = int(values[np.argmax(counts)])  # argmax takes the first, i.e. smallest
    base = _unpack(base_code, channels)
    diff = np.abs(block.astype(np.int16) - np.array(base, dtype=np.int16))
    n_bc = int(np.count_nonzero(np.all(diff <= BASE_COLOR_TOLERANCE, axis=2)))
    return base, n_bc


def _scaled(threshold: float, n_pixels: int) -> float:
    return threshold * n_pixels / _BLOCK_PIXELS


def _decide(n_hg, n_bc, n_pixels, params: ClassifierParams, all_pictorial: bool) -> ContentType:
    if n_hg < _scaled(params.l1, n_pixels):
        return ContentType.PICTORIAL
    l2 = params.l2_high if all_pictorial else params.l2_low
    concentrated = n_bc > _scaled(l2, n_pixels)
    if concentrated == params.text_if_concentrated:
        return ContentType.TEXT
    return ContentType.PICTORIAL


def classify_block(
    block: np.ndarray,
    params: ClassifierParams = ClassifierParams(),
    neighbor_labels: Sequence[Optional[ContentType]] = (None, None, None),
    luma: Optional[np.ndarray] = None,
) -> ContentType:
    """Label one block given its left, upper and upper-left neighbor labels.

    ``block`` holds the 8-bit pixels (gray ``(h, w)`` or RGB ``(h, w, 3)``);
    gradients are taken on ``luma``, computed from ``block`` when omitted.
    Absent neighbors are passed as ``None``.
    """
    block = np.asarray(block)
    if block.ndim == 2:
        block = block[:, :, None]
    if luma is None:
        luma = to_luma(Raster(block.astype(np.uint8)))
    n_pixels = block.shape[0] * block.shape[1]
    n_hg = count_high_gradient(luma, params.gradient_threshold)
    if n_hg < _scaled(params.l1, n_pixels):
        return ContentType.PICTORIAL
    _, n_bc = base_color_count(block)
    all_pict = all(n is not None and n == ContentType.PICTORIAL for n in neighbor_labels)
    return _decide(n_hg, n_bc, n_pixels, params, all_pict)


# -- whole image -----------------------------------------------------------------

def _label_blocks(rgb: Raster, luma: np.ndarray, params: ClassifierParams):
    grid = BlockGrid(rgb.width, rgb.height)
    shape = (grid.blocks_y, grid.blocks_x)
    labels = np.zeros(shape, dtype=np.uint8)
    n_hg = np.zeros(shape, dtype=np.int64)
    n_bc = np.zeros(shape, dtype=np.int64)
    _kernels.classify_blocks(
        np.ascontiguousarray(rgb.samples), np.ascontiguousarray(luma, dtype=np.float64),
        float(params.gradient_threshold), float(params.l1), float(params.l2_low),
        float(params.l2_high), bool(params.text_if_concentrated), BLOCK_SIZE,
        labels, n_hg, n_bc,
    )
    return labels, n_hg, n_bc


def classify_image(
    luma: np.ndarray,
    rgb: Raster,
    params: ClassifierParams = ClassifierParams(),
    counter: Optional[OpCounter] = None,
) -> ContentMap:
    """Classify every 16x16 block of a frame in raster-scan order."""
    luma = np.ascontiguousarray(luma, dtype=np.float64)
    if luma.shape != (rgb.height, rgb.width):
        raise ValueError(f"luma shape {luma.shape} does not match raster {rgb.height}x{rgb.width}")
    return _classify(rgb, luma, params, counter)


def _classify(rgb: Raster, luma: np.ndarray, params: ClassifierParams,
              counter: Optional[OpCounter]) -> ContentMap:
    grid = BlockGrid(rgb.width, rgb.height)
    labels, n_hg, n_bc = _label_blocks(rgb, luma, params)
    if counter is not None:
        n_total = rgb.width * rgb.height
        needs_step2 = n_bc >= 0
        n_step2 = int(needs_step2.sum())
        # step 1: two differences, a max, the threshold compare and the count per pixel
        counter.tally("classification", adds=5 * n_total + grid.count)
        # step 2: a histogram increment and run compare per pixel, |p - base| <= 2 per
        # channel, the count; then three neighbor checks and the L2 compare per block
        step2_pixels = sum(grid.pixel_count(bx, by) for by, bx in zip(*np.nonzero(needs_step2)))
        counter.tally("classification",
                      adds=(3 + 2 * rgb.channels) * step2_pixels + 4 * n_step2)
    return ContentMap(rgb.width, rgb.height, labels, major_type_of(labels))


def classify_raster(raster: Raster, params: ClassifierParams = ClassifierParams(),
                    counter: Optional[OpCounter] = None) -> ContentMap:
    """Convenience wrapper: luma conversion followed by :func:`classify_image`."""
    if raster.channels == 3:
        tally(counter, "classification", adds=2 * raster.width * raster.height,
              muls=3 * raster.width * raster.height)
    return _classify(raster, to_luma(raster), params, counter)
