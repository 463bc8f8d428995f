"""Timing and quality comparison of the scalers over a set of images."""

from __future__ import annotations

import csv
import logging
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .classifier import ClassifierParams
from .methods import METHODS, scale_by_method
from .metrics import count_ops, psnr
from .raster import Raster, load_image
from .sli import OffsetTable

log = logging.getLogger(__name__)

FIELDS = ("method", "factor", "width", "height", "wall_ms", "adds", "muls", "psnr_vs_reference")
MIN_RUNS = 5


@dataclass
class BenchRow:
    method: str
    factor: float
    width: int
    height: int
    wall_ms: float
    adds: int
    muls: int
    psnr_vs_reference: str
    image: str = ""
    error: str = ""

    def as_record(self) -> dict:
        return {k: getattr(self, k) for k in FIELDS}


def median_wall_ms(fn, runs: int = MIN_RUNS) -> float:
    """Median wall time of ``runs`` calls after one untimed warm-up call."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    fn()
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


def interleaved_wall_ms(fns: dict, runs: int = MIN_RUNS) -> dict:
    """Median wall time per entry of ``{name: fn}``, timed round-robin.

    Each round calls every function once, so slow drifts of the machine
    (frequency scaling, noisy neighbors) affect all entries alike.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    for fn in fns.values():
        fn()
    times = {name: [] for name in fns}
    for _ in range(runs):
        for name, fn in fns.items():
            t0 = time.perf_counter()
            fn()
            times[name].append((time.perf_counter() - t0) * 1e3)
    return {name: statistics.median(ts) for name, ts in times.items()}


def bench_raster(raster: Raster, factors: Sequence[float], methods: Sequence[str],
                 runs: int = MIN_RUNS, reference: str = "bicubic",
                 offsets: Optional[OffsetTable] = None,
                 params: Optional[ClassifierParams] = None, name: str = "") -> List[BenchRow]:
    """One row per (factor, method); a failing row records its error and the rest still run.

    Methods that ran cleanly are then timed together with :func:`interleaved_wall_ms`.
    """
    rows = []
    for factor in factors:
        try:
            ref = scale_by_method(reference, raster, factor, offsets, params)
        except Exception as exc:  # noqa: BLE001 - reported per row
            log.error("%s: reference %s failed at factor %g: %s", name, reference, factor, exc)
            ref = None
        ok = {}
        for method in methods:
            try:
                if method not in METHODS:
                    raise ValueError(f"unknown method {method!r}")
                out, ops = count_ops(method, raster, factor, offsets, params)
                quality = psnr(ref, out).psnr_label() if ref is not None else "nan"
                row = BenchRow(method, factor, out.width, out.height, float("nan"),
                               ops.additions, ops.multiplications, quality, name)
                ok[method] = row
            except Exception as exc:  # noqa: BLE001 - reported per row
                log.error("%s: %s at factor %g failed: %s", name, method, factor, exc)
                row = BenchRow(method, factor, 0, 0, float("nan"), 0, 0, "nan", name, str(exc))
            rows.append(row)
        wall = interleaved_wall_ms(
            {m: (lambda m=m: scale_by_method(m, raster, factor, offsets, params)) for m in ok}, runs)
        for method, ms in wall.items():
            ok[method].wall_ms = round(ms, 3)
    return rows


def bench_files(paths: Iterable[Path], factors: Sequence[float], methods: Sequence[str],
                runs: int = MIN_RUNS, reference: str = "bicubic",
                offsets: Optional[OffsetTable] = None,
                params: Optional[ClassifierParams] = None) -> List[BenchRow]:
    rows = []
    for path in paths:
        try:
            raster = load_image(path)
        except (OSError, ValueError) as exc:
            log.error("%s: cannot read: %s", path, exc)
            rows.extend(BenchRow(m, f, 0, 0, float("nan"), 0, 0, "nan", str(path), str(exc))
                        for f in factors for m in methods)
            continue
        rows.extend(bench_raster(raster, factors, methods, runs, reference, offsets, params, str(path)))
    return rows


def write_csv(rows: Sequence[BenchRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow(row.as_record())


def ratio(rows: Sequence[BenchRow], num: str, den: str, factor: float) -> float:
    """Wall-time ratio of two methods at ``factor`` (first matching image)."""
    by = {r.method: r.wall_ms for r in rows if r.factor == factor and not r.error}
    return by[num] / by[den]
