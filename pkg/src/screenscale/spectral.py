"""Offline training of SLI shift offsets from block spectra.

The expected interpolation error of a signal class is estimated in the
frequency domain as

    eta(tau) = sqrt( 1/(2 pi) * sum_w |F(w)|^2 * E_tau(w) )

where ``|F|^2`` is the average DFT energy of 16x16 training blocks and
``E_tau`` is the Fourier error kernel of shift-linear interpolation. The
curve is sampled over a grid of shifts, smoothed with a least-squares
polynomial and minimized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .classifier import ContentType
from .raster import BLOCK_SIZE, load_image, to_luma
from .sli import HORIZONTAL, VERTICAL, OffsetTable, check_tau

# pixel interval of the training blocks
SAMPLE_INTERVAL = 1.0
RADICAND_TOLERANCE = -1e-12
ARGMIN_STEP = 1e-4


def block_frequencies(n: int = BLOCK_SIZE) -> np.ndarray:
    """Angular frequencies ``2 pi k / n`` for ``k = -n/2 .. n/2 - 1`` (shifted DFT order)."""
    return 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n))


@dataclass(frozen=True)
class EnergyDensity:
    """Mean squared DFT magnitude of a set of blocks, in shifted (DC-centred) order.

    ``density2d[i, j]`` is the energy at vertical frequency ``omegas[i]`` and
    horizontal frequency ``omegas[j]``.
    """

    density2d: np.ndarray
    block_count: int
    omegas: np.ndarray = field(default_factory=block_frequencies)

    def __post_init__(self):
        d = np.asarray(self.density2d, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("density must be square")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("density entries must be finite and non-negative")
        if self.block_count < 1:
            raise ValueError("block_count must be >= 1")
        object.__setattr__(self, "density2d", d)

    @property
    def horizontal(self) -> np.ndarray:
        """Density over horizontal frequency, averaged across vertical frequency."""
        return self.density2d.mean(axis=0)

    @property
    def vertical(self) -> np.ndarray:
        return self.density2d.mean(axis=1)

    def directional(self, direction: str) -> np.ndarray:
        if direction == HORIZONTAL:
            return self.horizontal
        if direction == VERTICAL:
            return self.vertical
        raise ValueError(f"direction must be 'h' or 'v', got {direction!r}")

    def scaled(self, k: float) -> "EnergyDensity":
        return EnergyDensity(self.density2d * k, self.block_count, self.omegas)


def block_energy_density(blocks: Iterable[np.ndarray]) -> EnergyDensity:
    """Average ``|DFT|^2`` (unnormalized, DC kept) over 16x16 blocks."""
    acc = np.zeros((BLOCK_SIZE, BLOCK_SIZE))
    count = 0
    for b in blocks:
        b = np.asarray(b, dtype=np.float64)
        if b.shape != (BLOCK_SIZE, BLOCK_SIZE):
            raise ValueError(f"blocks must be {BLOCK_SIZE}x{BLOCK_SIZE}, got {b.shape}")
        acc += np.abs(np.fft.fft2(b)) ** 2
        count += 1
    if count == 0:
        raise ValueError("need at least one block")
    return EnergyDensity(np.fft.fftshift(acc / count), count)


def error_kernel(tau, omega):
    """Fourier error kernel of shift-linear interpolation with shift ``tau``.

    Vectorized over both arguments; ``omega`` is in radians per sample.
    """
    check_tau(tau)
    omega = np.asarray(omega, dtype=np.float64)
    if np.any(np.abs(omega) > np.pi + 1e-12):
        raise ValueError("omega must lie in [-pi, pi]")
    tau = np.asarray(tau, dtype=np.float64)
    denom = 1.0 - tau + tau * np.exp(-1j * omega)
    alias = (2.0 + np.cos(omega)) / (3.0 * np.abs(denom) ** 2)
    cross = np.sinc(omega / (2 * np.pi)) ** 2 * np.real(np.exp(-1j * omega * tau) / denom)
    return 1.0 + alias - 2.0 * cross


def _sqrt_radicand(r: float) -> float:
    if r < RADICAND_TOLERANCE:
        raise ArithmeticError(f"negative error radicand {r!r}")
    return float(np.sqrt(max(r, 0.0)))


def interpolation_error_1d(density: np.ndarray, tau: float, omegas: Optional[np.ndarray] = None) -> float:
    """Directional error ``eta`` for a 1-D energy density sampled at ``omegas``."""
    density = np.asarray(density, dtype=np.float64)
    if omegas is None:
        omegas = block_frequencies(density.size)
    e = error_kernel(tau, omegas * SAMPLE_INTERVAL)
    return _sqrt_radicand(np.sum(density * e) / (2 * np.pi))


def interpolation_error_2d(density: np.ndarray, tau_h: float, tau_v: float,
                           omegas: Optional[np.ndarray] = None) -> float:
    """Separable 2-D error; ``density[i, j]`` is at (vertical ``omegas[i]``, horizontal ``omegas[j]``)."""
    if isinstance(density, EnergyDensity):
        omegas = density.omegas
        density = density.density2d
    density = np.asarray(density, dtype=np.float64)
    if omegas is None:
        omegas = block_frequencies(density.shape[0])
    e_h = error_kernel(tau_h, omegas * SAMPLE_INTERVAL)
    e_v = error_kernel(tau_v, omegas * SAMPLE_INTERVAL)
    return _sqrt_radicand(np.sum(density * np.outer(e_v, e_h)) / (2 * np.pi))


# -- curve fitting ----------------------------------------------------------------

class PolyFit(NamedTuple):
    coefficients: np.ndarray  # ascending powers of tau
    tau_star: float
    at_boundary: bool


def fit_and_minimize(taus: Sequence[float], etas: Sequence[float], degree: int = 4) -> PolyFit:
    """Least-squares polynomial fit of ``eta(tau)`` and the location of its minimum.

    The fitted polynomial is scanned on a 1e-4 grid across the sampled span
    and the best point refined by bisection on the derivative. If the minimum
    sits on the span boundary (or the curve is flat) the smallest sampled
    value is used instead and ``at_boundary`` is set.
    """
    taus = np.asarray(taus, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    if degree < 2:
        raise ValueError("degree must be >= 2")
    if taus.shape != etas.shape or taus.ndim != 1:
        raise ValueError("taus and etas must be 1-D sequences of equal length")
    if np.unique(taus).size < degree + 1:
        raise np.linalg.LinAlgError(
            f"rank-deficient fit: {np.unique(taus).size} distinct shifts for degree {degree}"
        )
    poly = Polynomial.fit(taus, etas, degree)
    coefficients = poly.convert().coef

    lo, hi = float(taus.min()), float(taus.max())
    fallback = float(taus[np.argmin(etas)])
    scale = max(1.0, float(np.max(np.abs(etas))))
    if np.ptp(etas) <= 1e-12 * scale:
        return PolyFit(coefficients, fallback, True)

    grid = np.linspace(lo, hi, int(round((hi - lo) / ARGMIN_STEP)) + 1)
    i = int(np.argmin(poly(grid)))
    if i == 0 or i == grid.size - 1:
        return PolyFit(coefficients, fallback, True)

    dp = poly.deriv()
    a, b = grid[i - 1], grid[i + 1]
    if dp(a) < 0 < dp(b):
        for _ in range(60):
            m = 0.5 * (a + b)
            if dp(m) > 0:
                b = m
            else:
                a = m
        tau_star = 0.5 * (a + b)
    else:
        tau_star = float(grid[i])
    return PolyFit(coefficients, float(tau_star), False)


def is_unimodal(values: Sequence[float]) -> bool:
    """True when the sequence decreases then increases (at most one sign change in its steps)."""
    steps = np.sign(np.diff(np.asarray(values, dtype=np.float64)))
    steps = steps[steps != 0]
    changes = np.count_nonzero(steps[1:] != steps[:-1])
    if changes == 0:
        return True
    return changes == 1 and steps[0] < 0


@dataclass(frozen=True)
class SweepSettings:
    tau_min: float = 0.0
    tau_max: float = 0.4
    tau_step: float = 0.005
    degree: int = 4

    def __post_init__(self):
        if not 0.0 <= self.tau_min < self.tau_max <= 0.45:
            raise ValueError("sweep span must satisfy 0 <= tau_min < tau_max <= 0.45")
        if not self.tau_step > 0:
            raise ValueError("tau_step must be positive")
        if self.degree < 2:
            raise ValueError("degree must be >= 2")

    def grid(self) -> np.ndarray:
        n = int(round((self.tau_max - self.tau_min) / self.tau_step)) + 1
        return np.linspace(self.tau_min, self.tau_max, n)


@dataclass(frozen=True)
class ErrorCurve:
    content_type: ContentType
    direction: str
    tau_grid: np.ndarray
    eta_values: np.ndarray
    coefficients: np.ndarray
    tau_star: float
    degenerate: bool = False

    def fitted(self) -> np.ndarray:
        return Polynomial(self.coefficients)(self.tau_grid)

    @property
    def name(self) -> str:
        return f"{self.content_type.label}_{self.direction}"

    def to_csv(self) -> str:
        lines = ["tau,eta,fitted_eta"]
        for t, e, f in zip(self.tau_grid, self.eta_values, self.fitted()):
            lines.append(f"{t:.6f},{e:.10g},{f:.10g}")
        return "\n".join(lines) + "\n"


def error_curve(density: np.ndarray, content_type: ContentType, direction: str,
                sweep: SweepSettings = SweepSettings()) -> ErrorCurve:
    grid = sweep.grid()
    etas = np.array([interpolation_error_1d(density, t) for t in grid])
    fit = fit_and_minimize(grid, etas, sweep.degree)
    return ErrorCurve(ContentType(content_type), direction, grid, etas,
                      fit.coefficients, fit.tau_star, fit.at_boundary)


# -- corpus and training -----------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    image: str
    x: int
    y: int
    label: ContentType


@dataclass
class CorpusManifest:
    entries: List[CorpusEntry]
    root: Path = Path(".")

    def counts(self) -> Dict[ContentType, int]:
        out = {t: 0 for t in ContentType}
        for e in self.entries:
            out[e.label] += 1
        return out

    @classmethod
    def load(cls, path) -> "CorpusManifest":
        path = Path(path)
        entries = []
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    entries.append(CorpusEntry(rec["image"], int(rec["x"]), int(rec["y"]),
                                               ContentType.parse(rec["label"])))
                except (KeyError, ValueError, TypeError) as exc:
                    raise ValueError(f"{path}:{lineno}: bad manifest record ({exc})") from None
        return cls(entries, path.parent)

    def dumps(self) -> str:
        return "".join(
            json.dumps({"image": e.image, "x": e.x, "y": e.y, "label": e.label.label}) + "\n"
            for e in self.entries
        )

    def blocks(self) -> Dict[ContentType, List[np.ndarray]]:
        """Luma blocks grouped by label; images are loaded once each."""
        cache = {}
        out: Dict[ContentType, List[np.ndarray]] = {t: [] for t in ContentType}
        for e in self.entries:
            if e.image not in cache:
                p = Path(e.image)
                cache[e.image] = to_luma(load_image(p if p.is_absolute() else self.root / p))
            luma = cache[e.image]
            h, w = luma.shape
            if not (0 <= e.x <= w - BLOCK_SIZE and 0 <= e.y <= h - BLOCK_SIZE):
                raise ValueError(f"block ({e.x}, {e.y}) lies outside {e.image} ({w}x{h})")
            out[e.label].append(luma[e.y : e.y + BLOCK_SIZE, e.x : e.x + BLOCK_SIZE])
        return out


@dataclass(frozen=True)
class TrainingResult:
    offsets: OffsetTable
    curves: Dict[str, ErrorCurve]
    densities: Dict[ContentType, EnergyDensity]

    @property
    def degenerate(self) -> bool:
        return any(c.degenerate for c in self.curves.values())


def train_from_blocks(blocks: Dict[ContentType, Sequence[np.ndarray]],
                      sweep: SweepSettings = SweepSettings()) -> TrainingResult:
    """Optimal offsets for each (content type, direction) from labelled luma blocks."""
    densities = {}
    for kind in ContentType:
        if not blocks.get(kind):
            raise ValueError(f"no {kind.label} blocks in corpus")
        densities[kind] = block_energy_density(blocks[kind])
    curves = {}
    taus = {}
    for kind, dens in densities.items():
        for direction in (HORIZONTAL, VERTICAL):
            curve = error_curve(dens.directional(direction), kind, direction, sweep)
            curves[curve.name] = curve
            taus[curve.name] = curve.tau_star
    offsets = OffsetTable(
        text_h=taus["text_h"], text_v=taus["text_v"],
        pictorial_h=taus["pictorial_h"], pictorial_v=taus["pictorial_v"],
    )
    return TrainingResult(offsets, curves, densities)


def train_offsets(manifest: CorpusManifest, sweep: SweepSettings = SweepSettings()) -> TrainingResult:
    counts = manifest.counts()
    missing = [k.label for k, n in counts.items() if n == 0]
    if missing:
        raise ValueError(f"corpus has no blocks labelled {', '.join(missing)}")
    return train_from_blocks(manifest.blocks(), sweep)
