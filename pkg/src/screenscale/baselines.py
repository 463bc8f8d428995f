"""Reference scalers: separable bilinear and Keys bicubic.

Both use the same origin-aligned coordinate mapping and edge replication as
the SLI scaler so their outputs are directly comparable.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import _kernels
from .opcount import OpCounter, tally
from .raster import Raster, round_to_raster
from .sli import ScaleJob, output_coordinates, output_size

KEYS_A = -0.5


def linear_taps(n: int, positions):
    x = np.clip(np.asarray(positions, dtype=np.float64), 0.0, n - 1)
    i0 = np.floor(x).astype(np.intp)
    i1 = np.minimum(i0 + 1, n - 1)
    return i0, i1, x - i0


def keys_weights(t, a: float = KEYS_A) -> np.ndarray:
    """Cubic-convolution weights for taps at offsets -1, 0, 1, 2 from ``floor(x)``."""
    t = np.asarray(t, dtype=np.float64)

    def near(s):  # |s| <= 1
        return (a + 2) * s**3 - (a + 3) * s**2 + 1

    def far(s):  # 1 < |s| < 2
        return a * s**3 - 5 * a * s**2 + 8 * a * s - 4 * a

    return np.stack([far(1 + t), near(t), near(1 - t), far(2 - t)], axis=-1)


def cubic_taps(n: int, positions):
    x = np.clip(np.asarray(positions, dtype=np.float64), 0.0, n - 1)
    i = np.floor(x).astype(np.intp)
    idx = np.clip(i[:, None] + np.arange(-1, 3), 0, n - 1)
    return np.ascontiguousarray(idx), np.ascontiguousarray(keys_weights(x - i))


def _as_stack(planes) -> np.ndarray:
    planes = np.asarray(planes, dtype=np.float64)
    if planes.ndim == 2:
        planes = planes[:, :, None]
    return np.ascontiguousarray(planes)


def bilinear_planes(planes: np.ndarray, factor: float, counter: Optional[OpCounter] = None) -> np.ndarray:
    f = _as_stack(planes)
    h, w, nc = f.shape
    w_out, h_out = output_size(w, h, factor)
    mid = np.empty((h, w_out, nc))
    _kernels.lerp_rows(f, *linear_taps(w, output_coordinates(w_out, factor)), mid)
    out = np.empty((h_out, w_out, nc))
    _kernels.lerp_cols(mid, *linear_taps(h, output_coordinates(h_out, factor)), out)
    tally(counter, "interpolation", adds=mid.size + out.size, muls=2 * (mid.size + out.size))
    return out


def bicubic_2pass_planes(planes: np.ndarray, factor: float, counter: Optional[OpCounter] = None) -> np.ndarray:
    f = _as_stack(planes)
    h, w, nc = f.shape
    w_out, h_out = output_size(w, h, factor)
    mid = np.empty((h, w_out, nc))
    _kernels.taps4_rows(f, *cubic_taps(w, output_coordinates(w_out, factor)), mid)
    out = np.empty((h_out, w_out, nc))
    _kernels.taps4_cols(mid, *cubic_taps(h, output_coordinates(h_out, factor)), out)
    tally(counter, "interpolation", adds=3 * (mid.size + out.size), muls=4 * (mid.size + out.size))
    return out


def bicubic_planes(planes: np.ndarray, factor: float, counter: Optional[OpCounter] = None) -> np.ndarray:
    """Keys bicubic evaluated directly: each output pixel sums its 4x4 input neighborhood."""
    f = _as_stack(planes)
    h, w, nc = f.shape
    w_out, h_out = output_size(w, h, factor)
    out = np.empty((h_out, w_out, nc))
    ridx, rw = cubic_taps(h, output_coordinates(h_out, factor))
    cidx, cw = cubic_taps(w, output_coordinates(w_out, factor))
    _kernels.taps4x4(f, ridx, rw, cidx, cw, out)
    # per row of taps: 4 mul + 3 add; then 4 mul + 4 add to combine rows
    tally(counter, "interpolation", adds=16 * out.size, muls=20 * out.size)
    return out


def scale_bilinear_planes(raster: Raster, factor: float, counter: Optional[OpCounter] = None) -> np.ndarray:
    ScaleJob(factor)
    return bilinear_planes(raster.planes(), factor, counter)


def scale_bilinear(raster: Raster, factor: float, counter: Optional[OpCounter] = None) -> Raster:
    return round_to_raster(scale_bilinear_planes(raster, factor, counter))


def scale_bicubic_planes(raster: Raster, factor: float, counter: Optional[OpCounter] = None) -> np.ndarray:
    ScaleJob(factor)
    return bicubic_planes(raster.planes(), factor, counter)


def scale_bicubic(raster: Raster, factor: float, counter: Optional[OpCounter] = None) -> Raster:
    """Keys cubic convolution (a = -0.5) with edge replication."""
    return round_to_raster(scale_bicubic_planes(raster, factor, counter))


def scale_bicubic_2pass(raster: Raster, factor: float, counter: Optional[OpCounter] = None) -> Raster:
    """Same kernel as :func:`scale_bicubic`, applied as a row pass then a column pass."""
    ScaleJob(factor)
    return round_to_raster(bicubic_2pass_planes(raster.planes(), factor, counter))
