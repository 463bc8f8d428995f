"""Name-based dispatch over the available scalers."""

from __future__ import annotations

from typing import Optional

from .baselines import scale_bicubic, scale_bicubic_2pass, scale_bilinear
from .classifier import ClassifierParams
from .opcount import OpCounter
from .raster import Raster
from .sli import FIXED_TAU, OffsetTable, scale_content_adaptive, scale_fixed_sli

METHODS = ("bilinear", "bicubic", "bicubic-2pass", "sli-fixed", "adaptive")


def scale_by_method(
    method: str,
    raster: Raster,
    factor: float,
    offsets: Optional[OffsetTable] = None,
    params: Optional[ClassifierParams] = None,
    fixed_tau: float = FIXED_TAU,
    counter: Optional[OpCounter] = None,
) -> Raster:
    if method == "bilinear":
        return scale_bilinear(raster, factor, counter)
    if method == "bicubic":
        return scale_bicubic(raster, factor, counter)
    if method == "bicubic-2pass":
        return scale_bicubic_2pass(raster, factor, counter)
    if method == "sli-fixed":
        return scale_fixed_sli(raster, factor, fixed_tau, counter)
    if method == "adaptive":
        return scale_content_adaptive(raster, factor, offsets, params, counter)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
