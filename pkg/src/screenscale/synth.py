"""Synthetic screen content with known block labels.

Text is drawn from a procedurally generated 5x7 bitmap font so the output
does not depend on installed fonts. Pictorial areas are smooth color fields
with a little sensor-like noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .classifier import ContentType
from .raster import BLOCK_SIZE, Raster, save_image
from .spectral import CorpusEntry, CorpusManifest

GLYPH_W, GLYPH_H = 5, 7
ADVANCE = GLYPH_W + 1
LINE_HEIGHT = GLYPH_H + 3


def make_font(rng: np.random.Generator, n: int = 64) -> np.ndarray:
    """``n`` random stroke-built glyphs, shape ``(n, 7, 5)`` bool."""
    glyphs = np.zeros((n, GLYPH_H, GLYPH_W), dtype=bool)
    for g in glyphs:
        for _ in range(rng.integers(2, 5)):
            if rng.random() < 0.5:
                col = rng.integers(0, GLYPH_W)
                r0 = rng.integers(0, GLYPH_H - 2)
                g[r0 : rng.integers(r0 + 3, GLYPH_H + 1), col] = True
            else:
                row = rng.integers(0, GLYPH_H)
                c0 = rng.integers(0, GLYPH_W - 2)
                g[row, c0 : rng.integers(c0 + 3, GLYPH_W + 1)] = True
    return glyphs


def text_region(height: int, width: int, rng: np.random.Generator,
                fg=(20, 20, 20), bg=(250, 250, 250), font=None) -> np.ndarray:
    """Dense lines of glyph "words" on a flat background, ``(h, w, 3)`` uint8."""
    font = make_font(rng) if font is None else font
    ink = np.zeros((height, width), dtype=bool)
    y = 2
    while y + GLYPH_H <= height:
        x = 1
        while x + GLYPH_W <= width:
            for _ in range(rng.integers(2, 9)):
                if x + GLYPH_W > width:
                    break
                ink[y : y + GLYPH_H, x : x + GLYPH_W] |= font[rng.integers(len(font))]
                x += ADVANCE
            x += ADVANCE  # word gap
        y += LINE_HEIGHT
    out = np.empty((height, width, 3), dtype=np.uint8)
    out[:] = bg
    out[ink] = fg
    return out


def picture_region(height: int, width: int, rng: np.random.Generator, noise: float = 1.5) -> np.ndarray:
    """A smooth photo-like color field, ``(h, w, 3)`` uint8."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    out = np.empty((height, width, 3))
    for ch in range(3):
        base = rng.uniform(60, 190)
        gx, gy = rng.uniform(-0.25, 0.25, size=2)
        field = base + gx * (xx - width / 2) * 120 / max(width, 1) + gy * (yy - height / 2) * 120 / max(height, 1)
        for _ in range(3):
            kx, ky = rng.uniform(0.005, 0.05, size=2)
            phase = rng.uniform(0, 2 * np.pi)
            field += rng.uniform(5, 20) * np.sin(kx * xx + ky * yy + phase)
        field += rng.normal(0.0, noise, size=field.shape)
        out[:, :, ch] = field
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Composite:
    raster: Raster
    truth: np.ndarray  # (blocks_y, blocks_x) ContentType values

    def agreement(self, labels: np.ndarray) -> float:
        return float(np.mean(np.asarray(labels) == self.truth))


def text_and_gradient(width: int = 256, height: int = 128, seed: int = 0) -> Composite:
    """Left half dense text, right half smooth picture (split on a block boundary)."""
    rng = np.random.default_rng(seed)
    split = (width // 2) // BLOCK_SIZE * BLOCK_SIZE
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, :split] = text_region(height, split, rng)
    img[:, split:] = picture_region(height, width - split, rng)
    bx = -(-width // BLOCK_SIZE)
    by = -(-height // BLOCK_SIZE)
    truth = np.full((by, bx), int(ContentType.PICTORIAL), dtype=np.uint8)
    truth[:, : split // BLOCK_SIZE] = int(ContentType.TEXT)
    return Composite(Raster(img), truth)


def screen(width: int = 1280, height: int = 768, seed: int = 0) -> Composite:
    """A desktop-like frame: text panels and pictures tiled on a block-aligned layout."""
    rng = np.random.default_rng(seed)
    font = make_font(rng)
    bx = -(-width // BLOCK_SIZE)
    by = -(-height // BLOCK_SIZE)
    img = np.empty((height, width, 3), dtype=np.uint8)
    truth = np.empty((by, bx), dtype=np.uint8)
    # panels of 4..12 blocks per side, alternating content
    y0 = 0
    kind = int(rng.integers(2))
    while y0 < by:
        ph = int(min(rng.integers(4, 13), by - y0))
        x0 = 0
        while x0 < bx:
            pw = int(min(rng.integers(4, 13), bx - x0))
            ys = slice(y0 * BLOCK_SIZE, min((y0 + ph) * BLOCK_SIZE, height))
            xs = slice(x0 * BLOCK_SIZE, min((x0 + pw) * BLOCK_SIZE, width))
            h, w = ys.stop - ys.start, xs.stop - xs.start
            if kind == ContentType.TEXT:
                fg = tuple(int(v) for v in rng.integers(0, 80, size=3))
                bg = tuple(int(v) for v in rng.integers(200, 256, size=3))
                img[ys, xs] = text_region(h, w, rng, fg, bg, font)
            else:
                img[ys, xs] = picture_region(h, w, rng)
            truth[y0 : y0 + ph, x0 : x0 + pw] = kind
            kind = 1 - kind
            x0 += pw
        y0 += ph
        kind = int(rng.integers(2))
    return Composite(Raster(img), truth)


def make_corpus(out_dir, seed: int = 0, n_text: int = 200, n_pictorial: int = 200,
                width: int = 640, height: int = 384) -> Tuple[Path, List[Path]]:
    """Write synthetic screens plus a JSON-lines block manifest; returns ``(manifest, images)``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    need = {ContentType.TEXT: n_text, ContentType.PICTORIAL: n_pictorial}
    pools = {ContentType.TEXT: [], ContentType.PICTORIAL: []}
    images: List[Path] = []
    i = 0
    while any(len(pools[k]) < need[k] for k in need):
        comp = screen(width, height, seed=int(rng.integers(1 << 31)))
        name = f"screen_{i:03d}.ppm"
        save_image(comp.raster, out_dir / name)
        images.append(out_dir / name)
        for (yb, xb), v in np.ndenumerate(comp.truth):
            if (yb + 1) * BLOCK_SIZE <= height and (xb + 1) * BLOCK_SIZE <= width:
                pools[ContentType(int(v))].append(CorpusEntry(name, xb * BLOCK_SIZE, yb * BLOCK_SIZE, ContentType(int(v))))
        i += 1
    entries = []
    for kind, n in need.items():
        pick = rng.choice(len(pools[kind]), size=n, replace=False)
        entries.extend(pools[kind][j] for j in sorted(pick))
    manifest = CorpusManifest(entries, out_dir)
    path = out_dir / "manifest.jsonl"
    path.write_text(manifest.dumps())
    return path, images
