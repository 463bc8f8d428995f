"""Shift-linear interpolation (SLI) and the content-adaptive separable scaler.

SLI reconstructs a signal as ``sum_n c_n * tri(x - n - tau)`` where ``tri`` is
the linear B-spline and the coefficients come from the causal recursion

    c_n = -tau/(1 - tau) * c_{n-1} + f_n/(1 - tau)

which we evaluate as ``c_n = f_n + k*(f_n - c_{n-1})`` with ``k = tau/(1 - tau)``
(one multiply, two adds per sample). The recursion starts from ``c_{-1} = f_0``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .classifier import ContentMap, ContentType
from . import _kernels
from .opcount import OpCounter, tally
from .raster import BLOCK_SIZE, Raster, round_to_raster, scaled_size

TAU_LIMIT = 0.5
FIXED_TAU = 0.21
MAX_DIMENSION = 1 << 16

HORIZONTAL = "h"
VERTICAL = "v"


def check_tau(tau) -> None:
    t = np.asarray(tau, dtype=np.float64)
    if not np.all((t >= 0.0) & (t < TAU_LIMIT)):
        raise ValueError(f"shift offset must lie in [0, {TAU_LIMIT}), got {tau!r}")


def recursion_gain(tau):
    """``tau / (1 - tau)``, the feedback gain of the pre-filter."""
    tau = np.asarray(tau, dtype=np.float64)
    return tau / (1.0 - tau)


@dataclass(frozen=True)
class OffsetTable:
    """Shift offsets per content type and direction (defaults: trained values for screen content)."""

    text_h: float = 0.110
    text_v: float = 0.124
    pictorial_h: float = 0.112
    pictorial_v: float = 0.114

    def __post_init__(self):
        check_tau([self.text_h, self.text_v, self.pictorial_h, self.pictorial_v])

    def tau(self, kind: ContentType, direction: str) -> float:
        prefix = "text" if ContentType(kind) == ContentType.TEXT else "pictorial"
        if direction not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"direction must be 'h' or 'v', got {direction!r}")
        return getattr(self, f"{prefix}_{direction}")

    def by_label(self, direction: str) -> np.ndarray:
        """Offsets indexed by ``ContentType`` value."""
        return np.array(
            [self.tau(ContentType.PICTORIAL, direction), self.tau(ContentType.TEXT, direction)]
        )

    @classmethod
    def uniform(cls, tau: float) -> "OffsetTable":
        return cls(tau, tau, tau, tau)

    def to_dict(self) -> dict:
        return {
            "text": {"h": self.text_h, "v": self.text_v},
            "pictorial": {"h": self.pictorial_h, "v": self.pictorial_v},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OffsetTable":
        base = cls()
        text = d.get("text", {})
        pict = d.get("pictorial", {})
        return cls(
            text_h=float(text.get("h", base.text_h)),
            text_v=float(text.get("v", base.text_v)),
            pictorial_h=float(pict.get("h", base.pictorial_h)),
            pictorial_v=float(pict.get("v", base.pictorial_v)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def load(cls, path) -> "OffsetTable":
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass(frozen=True)
class ScaleJob:
    factor: float
    offsets: OffsetTable = field(default_factory=OffsetTable)
    convention: str = "origin"
    boundary: str = "replicate"

    def __post_init__(self):
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise ValueError(f"scale factor must be a positive finite number, got {self.factor!r}")
        if self.convention != "origin":
            raise ValueError(f"unsupported coordinate convention {self.convention!r}")
        if self.boundary != "replicate":
            raise ValueError(f"unsupported boundary policy {self.boundary!r}")

    def output_size(self, width: int, height: int):
        return output_size(width, height, self.factor)


def output_size(width: int, height: int, factor: float):
    """Output ``(width, height)``; raises if either rounds to zero or is unreasonably large."""
    w, h = scaled_size(width, factor), scaled_size(height, factor)
    if w < 1 or h < 1:
        raise ValueError(f"factor {factor} shrinks {width}x{height} to nothing")
    if w > MAX_DIMENSION or h > MAX_DIMENSION:
        raise OverflowError(f"output size {w}x{h} exceeds {MAX_DIMENSION} per side")
    return w, h


def map_output_coordinate(index, factor: float):
    """Input-grid coordinate of output sample ``index`` (origin-aligned grids)."""
    if np.ndim(index) == 0:
        return index / factor
    return np.asarray(index, dtype=np.float64) / factor


# -- passes -------------------------------------------------------------------------

def _run_split(kernel, n: int, workers: int, *args) -> None:
    """Call ``kernel(*args, lo, hi)`` over ``[0, n)``, optionally on several threads."""
    if workers <= 1 or n < 2:
        kernel(*args, 0, n)
        return
    edges = np.linspace(0, n, min(workers, n) + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(kernel, *args, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
        for fut in futures:
            fut.result()


_BLOCK_SHIFT = BLOCK_SIZE.bit_length() - 1
_UNIFORM_SHIFT = 62  # any in-range index shifted this far is 0


class TypeMap(NamedTuple):
    """Type plane read by the kernels as ``labels[y >> shift_y, x >> shift_x]``."""

    labels: np.ndarray
    shift_y: int
    shift_x: int

    @classmethod
    def uniform(cls, label: int = 0) -> "TypeMap":
        return cls(np.full((1, 1), label, dtype=np.intp), _UNIFORM_SHIFT, _UNIFORM_SHIFT)

    @classmethod
    def per_sample(cls, labels) -> "TypeMap":
        return cls(np.ascontiguousarray(labels), 0, 0)


def _gain_lookup(gain):
    """Express a scalar or per-sample gain plane as a ``(TypeMap, table)`` pair for the kernels."""
    if np.ndim(gain) == 0:
        return TypeMap.uniform(), np.array([float(gain)])
    g = np.asarray(gain, dtype=np.float64)
    return TypeMap.per_sample(np.arange(g.size).reshape(g.shape)), g.ravel()


def prefilter_pass(f: np.ndarray, gain, axis: int, counter: Optional[OpCounter] = None,
                   workers: int = 1) -> np.ndarray:
    """Pre-filter every row (``axis=1``) or column (``axis=0``) of an ``(h, w, c)`` stack.

    ``gain`` is ``tau/(1 - tau)``: a scalar or an ``(h, w)`` plane.
    """
    f = np.ascontiguousarray(f, dtype=np.float64)
    if np.ndim(gain) and np.shape(gain) != f.shape[:2]:
        raise ValueError(f"gain plane {np.shape(gain)} does not match {f.shape[:2]}")
    types, table = _gain_lookup(gain)
    out = np.empty_like(f)
    if axis == 1:
        _run_split(_kernels.prefilter_rows, f.shape[0], workers, f, types.labels, table,
                   types.shift_y, types.shift_x, out)
    elif axis == 0:
        _run_split(_kernels.prefilter_cols, f.shape[1], workers, f, types.labels, table,
                   types.shift_y, types.shift_x, out)
    else:
        raise ValueError("axis must be 0 or 1")
    tally(counter, "prefilter", adds=2 * f.size, muls=f.size)
    return out


def shifted_positions(n: int, positions, tau: float):
    """Left coefficient index and weight for each position (clamped to ``[0, n-1]``)."""
    x = np.clip(np.asarray(positions, dtype=np.float64), 0.0, n - 1)
    u = np.maximum(x - tau, 0.0)
    idx = np.minimum(np.floor(u).astype(np.intp), n - 1)
    return idx, u - idx


def interpolate_pass(c: np.ndarray, positions, tau: float, axis: int,
                     counter: Optional[OpCounter] = None, workers: int = 1) -> np.ndarray:
    """Evaluate ``sum_n c_n tri(x - n - tau)`` along one axis of an ``(h, w, c)`` stack.

    Coefficients beyond the ends replicate the edge coefficient.
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    idx, frac = shifted_positions(c.shape[axis], positions, tau)
    shape = list(c.shape)
    shape[axis] = idx.size
    out = np.empty(shape)
    if axis == 1:
        _run_split(_kernels.shifted_linear_rows, c.shape[0], workers, c, idx, frac, out)
    elif axis == 0:
        _run_split(_kernels.shifted_linear_cols, c.shape[1], workers, c, idx, frac, out)
    else:
        raise ValueError("axis must be 0 or 1")
    tally(counter, "interpolation", adds=2 * out.size, muls=out.size)
    return out


def prefilter_1d(samples: Sequence[float], taus, initial: Optional[float] = None,
                 counter: Optional[OpCounter] = None) -> np.ndarray:
    """Map samples ``f_n`` to SLI coefficients ``c_n``.

    ``taus`` is a scalar or one shift per sample. ``initial`` is the virtual
    ``c_{-1}``; it defaults to ``f_0`` which keeps constant signals fixed.
    """
    f = np.asarray(samples, dtype=np.float64)
    if f.ndim != 1 or f.size < 1:
        raise ValueError("samples must be a non-empty 1-D sequence")
    taus = np.asarray(taus, dtype=np.float64)
    if taus.ndim and taus.shape != f.shape:
        raise ValueError("need one shift per sample")
    check_tau(taus)
    gain = np.broadcast_to(recursion_gain(taus), f.shape)
    if initial is not None:
        # a leading virtual sample with zero gain pins c_{-1} to ``initial``
        f = np.concatenate([[initial], f])
        gain = np.concatenate([[0.0], gain])
    c = prefilter_pass(f.reshape(1, -1, 1), gain.reshape(1, -1), 1, counter)
    c = c.ravel()
    return c if initial is None else c[1:]


def interpolate_1d(coefficients: Sequence[float], tau: float, positions,
                   counter: Optional[OpCounter] = None) -> np.ndarray:
    """Evaluate the SLI reconstruction of ``coefficients`` at ``positions``."""
    c = np.asarray(coefficients, dtype=np.float64)
    if c.ndim != 1 or c.size < 1:
        raise ValueError("coefficients must be a non-empty 1-D sequence")
    check_tau(tau)
    scalar = np.ndim(positions) == 0
    out = interpolate_pass(c.reshape(1, -1, 1), np.atleast_1d(positions), float(tau), 1, counter).ravel()
    return float(out[0]) if scalar else out


# -- 2-D pipeline -------------------------------------------------------------------

def output_coordinates(n_out: int, factor: float) -> np.ndarray:
    return map_output_coordinate(np.arange(n_out), factor)


def nearest_source_index(n_out: int, n_in: int, factor: float) -> np.ndarray:
    """Nearest input sample for each output position; exact halves go to the smaller index."""
    x = np.clip(output_coordinates(n_out, factor), 0.0, n_in - 1)
    return np.ceil(x - 0.5).astype(np.intp)


def sli_scale_planes(
    planes: np.ndarray,
    factor: float,
    types_h: TypeMap,
    gains_h: np.ndarray,
    tau_h: float,
    types_v: TypeMap,
    gains_v: np.ndarray,
    tau_v: float,
    counter: Optional[OpCounter] = None,
    workers: int = 1,
) -> np.ndarray:
    """Separable SLI of ``(h, w, c)`` float planes; returns unquantized output.

    The row pre-filter uses gain ``gains_h[type]`` with the type of input
    pixel ``(y, x)`` taken from ``types_h``; the column pre-filter of the
    ``(h, w_out)`` intermediate reads ``types_v`` at ``(y, j)``.
    """
    f = np.ascontiguousarray(planes, dtype=np.float64)
    if f.ndim == 2:
        f = f[:, :, None]
    h, w, nc = f.shape
    w_out, h_out = output_size(w, h, factor)
    gains_h = np.asarray(gains_h, dtype=np.float64)
    gains_v = np.asarray(gains_v, dtype=np.float64)

    idx, frac = shifted_positions(w, output_coordinates(w_out, factor), tau_h)
    mid = np.empty((h, w_out, nc))
    _run_split(_kernels.sli_rows, h, workers, f, types_h.labels, gains_h, types_h.shift_y,
               types_h.shift_x, idx, frac, mid)
    tally(counter, "prefilter", adds=2 * f.size, muls=f.size)
    tally(counter, "interpolation", adds=2 * mid.size, muls=mid.size)

    # column coefficients overwrite the intermediate in place
    _run_split(_kernels.prefilter_cols, w_out, workers, mid, types_v.labels, gains_v,
               types_v.shift_y, types_v.shift_x, mid)
    idx, frac = shifted_positions(h, output_coordinates(h_out, factor), tau_v)
    out = np.empty((h_out, w_out, nc))
    _run_split(_kernels.shifted_linear_cols, w_out, workers, mid, idx, frac, out)
    tally(counter, "prefilter", adds=2 * mid.size, muls=mid.size)
    tally(counter, "interpolation", adds=2 * out.size, muls=out.size)
    return out


def scale_adaptive_planes(raster: Raster, job: ScaleJob, content_map: ContentMap,
                          counter: Optional[OpCounter] = None, workers: int = 1) -> np.ndarray:
    """Content-adaptive SLI, unquantized ``(h_out, w_out, c)`` result."""
    if (content_map.width, content_map.height) != (raster.width, raster.height):
        raise ValueError("content map does not match raster dimensions")
    w_out, _ = job.output_size(raster.width, raster.height)
    offsets = job.offsets
    labels = np.ascontiguousarray(content_map.block_labels)
    # intermediate pixels inherit the type of the nearest sampled pixel in their row
    source_block = nearest_source_index(w_out, raster.width, job.factor) >> _BLOCK_SHIFT
    major = content_map.major_type
    return sli_scale_planes(
        raster.planes(), job.factor,
        TypeMap(labels, _BLOCK_SHIFT, _BLOCK_SHIFT),
        recursion_gain(offsets.by_label(HORIZONTAL)), offsets.tau(major, HORIZONTAL),
        TypeMap(np.ascontiguousarray(labels[:, source_block]), _BLOCK_SHIFT, 0),
        recursion_gain(offsets.by_label(VERTICAL)), offsets.tau(major, VERTICAL),
        counter, workers,
    )


def scale_adaptive(raster: Raster, job: ScaleJob, content_map: ContentMap,
                   counter: Optional[OpCounter] = None, workers: int = 1) -> Raster:
    """Scale ``raster`` with per-pixel pre-filter offsets and a frame-global interpolation offset."""
    return round_to_raster(scale_adaptive_planes(raster, job, content_map, counter, workers))


def scale_fixed_sli_planes(raster: Raster, factor: float, tau: float = FIXED_TAU,
                           counter: Optional[OpCounter] = None, workers: int = 1) -> np.ndarray:
    check_tau(tau)
    ScaleJob(factor)
    k = recursion_gain([tau])
    uniform = TypeMap.uniform()
    return sli_scale_planes(raster.planes(), factor, uniform, k, tau, uniform, k, tau,
                            counter, workers)


def scale_fixed_sli(raster: Raster, factor: float, tau: float = FIXED_TAU,
                    counter: Optional[OpCounter] = None, workers: int = 1) -> Raster:
    """SLI with one offset everywhere and no classification."""
    return round_to_raster(scale_fixed_sli_planes(raster, factor, tau, counter, workers))


def scale_content_adaptive(raster: Raster, factor: float, offsets: Union[OffsetTable, None] = None,
                           params=None, counter: Optional[OpCounter] = None,
                           workers: int = 1) -> Raster:
    """Classify then scale: the full adaptive pipeline in one call."""
    from .classifier import ClassifierParams, classify_raster

    job = ScaleJob(factor, offsets or OffsetTable())
    cmap = classify_raster(raster, params or ClassifierParams(), counter)
    return scale_adaptive(raster, job, cmap, counter, workers)
