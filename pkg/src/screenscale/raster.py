"""Image containers, luma conversion, block partitioning and PNM file I/O."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import _kernels

BLOCK_SIZE = 16

# BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

PathLike = Union[str, os.PathLike]


class RasterFormatError(ValueError):
    """Base class for unreadable image files."""


class MalformedHeaderError(RasterFormatError):
    pass


class TruncatedPayloadError(RasterFormatError):
    pass


class UnsupportedMaxValueError(RasterFormatError):
    pass


@dataclass(frozen=True)
class Raster:
    """An 8-bit image stored as a read-only ``(height, width, channels)`` array."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim == 2:
            s = s[:, :, None]
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ValueError(f"expected (h, w, 1|3) samples, got shape {s.shape}")
        if s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        if s.dtype != np.uint8:
            raise TypeError(f"raster samples must be uint8, got {s.dtype}")
        s = np.array(s, copy=True)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self):
        return self.samples.shape

    def planes(self) -> np.ndarray:
        """Float64 copy of the samples, shape ``(h, w, c)``."""
        return self.samples.astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, Raster):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class BlockGrid:
    """Partition of a ``width x height`` image into 16x16 tiles.

    Tiles on the right and bottom edges are cropped when the image size is
    not a multiple of the block size.
    """

    width: int
    height: int
    block_size: int = BLOCK_SIZE

    @property
    def blocks_x(self) -> int:
        return math.ceil(self.width / self.block_size)

    @property
    def blocks_y(self) -> int:
        return math.ceil(self.height / self.block_size)

    @property
    def count(self) -> int:
        return self.blocks_x * self.blocks_y

    def bounds(self, bx: int, by: int):
        """Pixel slices ``(rows, cols)`` of block ``(bx, by)``."""
        b = self.block_size
        x0, y0 = bx * b, by * b
        return slice(y0, min(y0 + b, self.height)), slice(x0, min(x0 + b, self.width))

    def pixel_count(self, bx: int, by: int) -> int:
        rows, cols = self.bounds(bx, by)
        return (rows.stop - rows.start) * (cols.stop - cols.start)

    def block_of(self, x: int, y: int):
        return x // self.block_size, y // self.block_size

    def __iter__(self):
        for by in range(self.blocks_y):
            for bx in range(self.blocks_x):
                yield bx, by


def check_plane(values: np.ndarray) -> np.ndarray:
    """Validate a real-valued working plane (or stack of planes)."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim not in (2, 3) or v.shape[0] < 1 or v.shape[1] < 1:
        raise ValueError(f"plane must be 2-D or (h, w, c), got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("plane contains non-finite values")
    return v


def luma_from_planes(planes: np.ndarray) -> np.ndarray:
    """BT.601 luma of real-valued ``(h, w, 1|3)`` planes."""
    p = np.ascontiguousarray(planes)
    if p.ndim != 3 or p.shape[2] not in (1, 3):
        raise ValueError(f"expected (h, w, 1|3) planes, got shape {p.shape}")
    out = np.empty(p.shape[:2])
    _kernels.luma_plane(p, *LUMA_WEIGHTS, out)
    return out


def to_luma(raster: Raster) -> np.ndarray:
    """Real-valued BT.601 luma plane, shape ``(h, w)``. Not rounded."""
    return luma_from_planes(raster.samples)


def round_to_raster(values: np.ndarray) -> Raster:
    """Quantize real-valued plane(s) to 8 bits: round half away from zero, clamp to [0, 255]."""
    v = np.ascontiguousarray(check_plane(values))
    out = np.empty(v.shape, dtype=np.uint8)
    # negative halves differ from half-up rounding but clamp to 0 either way
    _kernels.quantize(v, out)
    return Raster(out)


def scaled_size(n: int, factor: float) -> int:
    """``round(n * factor)`` with halves rounded away from zero."""
    return int(math.floor(n * factor + 0.5))


# -- PNM I/O -----------------------------------------------------------------

_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


def _read_header(data: bytes):
    """Parse ``magic width height maxval`` and return them with the payload offset."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < 4:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MalformedHeaderError("unexpected end of header")
        tokens.append(data[start:pos])
    if pos >= n or not data[pos : pos + 1].isspace():
        raise MalformedHeaderError("missing whitespace after maxval")
    pos += 1

    magic = tokens[0]
    if magic not in _MAGIC_CHANNELS:
        raise MalformedHeaderError(f"unsupported magic number {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeaderError(f"non-integer header field in {tokens[1:]!r}") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxValueError(f"maxval {maxval} not supported (only 255)")
    return _MAGIC_CHANNELS[magic], width, height, pos


def load_image(path: PathLike) -> Raster:
    """Read a binary PGM (P5) or PPM (P6) file; PNG is read through Pillow when installed."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        return _load_png(path)
    data = path.read_bytes()
    channels, width, height, offset = _read_header(data)
    expected = width * height * channels
    payload = data[offset : offset + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"{path}: expected {expected} payload bytes, found {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return Raster(samples)


def _load_png(path: Path) -> Raster:
    try:
        from PIL import Image
    except ImportError:
        raise ImportError("PNG input requires Pillow: pip install Pillow") from None
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return Raster(np.asarray(im, dtype=np.uint8))


def save_image(raster: Raster, path: PathLike) -> None:
    """Write ``raster`` as P5 (1 channel) or P6 (3 channels)."""
    if not str(path):
        raise ValueError("empty output path")
    magic = b"P5" if raster.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, raster.width, raster.height)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(raster.samples).tobytes())
