"""Quality metrics and operation-count measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .classifier import ClassifierParams
from .methods import scale_by_method
from .opcount import OpCounter, OpCounts
from .raster import BLOCK_SIZE, Raster
from .sli import OffsetTable

PEAK = 255.0


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float  # math.inf when the images are identical
    channel_mse: Tuple[float, ...]
    channel_psnr: Tuple[float, ...]

    @property
    def identical(self) -> bool:
        return self.mse == 0.0

    def psnr_label(self) -> str:
        return "identical" if self.identical else f"{self.psnr:.4f}"


def _psnr_from_mse(mse: float) -> float:
    return math.inf if mse == 0 else 10.0 * math.log10(PEAK**2 / mse)


def psnr(reference: Raster, candidate: Raster) -> QualityReport:
    if reference.shape != candidate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {candidate.shape}")
    diff = reference.samples.astype(np.float64) - candidate.samples.astype(np.float64)
    sq = diff**2
    channel_mse = tuple(float(m) for m in sq.mean(axis=(0, 1)))
    mse = float(sq.mean())
    return QualityReport(
        mse=mse,
        psnr=_psnr_from_mse(mse),
        channel_mse=channel_mse,
        channel_psnr=tuple(_psnr_from_mse(m) for m in channel_mse),
    )


def count_ops(
    method: str,
    raster: Raster,
    factor: float,
    offsets: Optional[OffsetTable] = None,
    params: Optional[ClassifierParams] = None,
) -> Tuple[Raster, OpCounts]:
    """Run ``method`` with instrumentation and return its output with the tallies."""
    counter = OpCounter()
    out = scale_by_method(method, raster, factor, offsets=offsets, params=params, counter=counter)
    return out, counter.counts()


def complexity_bounds(width: int, height: int, channels: int, out_width: int, out_height: int):
    """``(additions, multiplications)`` upper bounds for the adaptive scaler.

    Pixel counts are taken per sample (pixels x channels) because every
    channel is filtered separately.
    """
    n_in = width * height * channels
    n_out = out_width * out_height * channels
    n_b = math.ceil(width / BLOCK_SIZE) * math.ceil(height / BLOCK_SIZE)
    return 9 * n_in + 8 * n_out + 4 * n_b, 4 * n_in + 8 * n_out
