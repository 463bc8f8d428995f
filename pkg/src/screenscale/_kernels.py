"""Compiled pixel loops shared by the scalers and the classifier.

Arrays are ``(rows, cols, channels)`` float64 unless stated otherwise.
Pre-filter gains are looked up as ``gtab[types[y >> sy, x >> sx]]``, so a
type plane may be stored per pixel (shifts 0), per 16x16 block (shifts 4)
or as a single entry (shifts of 62). Kernels that
take a ``lo, hi`` range process only those rows (or columns) and release
the GIL, so callers may split work across threads.
"""

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def _gain(types, gtab, sy, sx, y, x):
    return gtab[types[y >> sy, x >> sx]]


@njit(**_OPTS)
def _prefilter_row(f, y, types, gtab, sy, sx, row):
    """Pre-filter row ``y`` of ``f`` into ``row`` (shape ``(w, c)``)."""
    w, nc = row.shape
    g = _gain(types, gtab, sy, sx, y, 0)
    for ch in range(nc):
        v = f[y, 0, ch]
        row[0, ch] = v + g * (v - v)  # c_{-1} = f_0
    for x in range(1, w):
        g = _gain(types, gtab, sy, sx, y, x)
        for ch in range(nc):
            v = f[y, x, ch]
            row[x, ch] = v + g * (v - row[x - 1, ch])


@njit(**_OPTS)
def prefilter_rows(f, types, gtab, sy, sx, out, lo, hi):
    """Causal pre-filter along axis 1."""
    for y in range(lo, hi):
        _prefilter_row(f, y, types, gtab, sy, sx, out[y])


@njit(**_OPTS)
def prefilter_cols(f, types, gtab, sy, sx, out, lo, hi):
    """Causal pre-filter along axis 0 for columns ``lo:hi``; ``out`` may alias ``f``."""
    h, _, nc = f.shape
    for x in range(lo, hi):
        g = _gain(types, gtab, sy, sx, 0, x)
        for ch in range(nc):
            v = f[0, x, ch]
            out[0, x, ch] = v + g * (v - v)
    for y in range(1, h):
        for x in range(lo, hi):
            g = _gain(types, gtab, sy, sx, y, x)
            for ch in range(nc):
                v = f[y, x, ch]
                out[y, x, ch] = v + g * (v - out[y - 1, x, ch])


@njit(**_OPTS)
def _shifted_linear_row(row, idx, frac, dst):
    w, nc = row.shape
    for j in range(idx.shape[0]):
        i = idx[j]
        t = frac[j]
        k = i + 1 if i + 1 < w else i
        for ch in range(nc):
            a = row[i, ch]
            dst[j, ch] = a + t * (row[k, ch] - a)


@njit(**_OPTS)
def shifted_linear_rows(c, idx, frac, out, lo, hi):
    """``out[y, j] = c[y, i] + t * (c[y, i+1] - c[y, i])`` with ``i = idx[j]``, ``t = frac[j]``."""
    for y in range(lo, hi):
        _shifted_linear_row(c[y], idx, frac, out[y])


@njit(**_OPTS)
def shifted_linear_cols(c, idx, frac, out, lo, hi):
    h, _, nc = c.shape
    for j in range(idx.shape[0]):
        i = idx[j]
        t = frac[j]
        k = i + 1 if i + 1 < h else i
        for x in range(lo, hi):
            for ch in range(nc):
                a = c[i, x, ch]
                out[j, x, ch] = a + t * (c[k, x, ch] - a)


@njit(**_OPTS)
def sli_rows(f, types, gtab, sy, sx, idx, frac, out, lo, hi):
    """Horizontal pre-filter and interpolation fused row by row."""
    _, w, nc = f.shape
    row = np.empty((w, nc))
    for y in range(lo, hi):
        _prefilter_row(f, y, types, gtab, sy, sx, row)
        _shifted_linear_row(row, idx, frac, out[y])


@njit(**_OPTS)
def lerp_rows(f, i0, i1, t, out):
    """Bilinear pass along axis 1: ``(1 - t) * f[i0] + t * f[i1]``."""
    h, _, nc = f.shape
    for y in range(h):
        for j in range(i0.shape[0]):
            a = i0[j]
            b = i1[j]
            wb = t[j]
            wa = 1.0 - wb
            for ch in range(nc):
                out[y, j, ch] = wa * f[y, a, ch] + wb * f[y, b, ch]


@njit(**_OPTS)
def lerp_cols(f, i0, i1, t, out):
    _, w, nc = f.shape
    for j in range(i0.shape[0]):
        a = i0[j]
        b = i1[j]
        wb = t[j]
        wa = 1.0 - wb
        for x in range(w):
            for ch in range(nc):
                out[j, x, ch] = wa * f[a, x, ch] + wb * f[b, x, ch]


@njit(**_OPTS)
def taps4_rows(f, idx, wts, out):
    """Four-tap filter along axis 1; ``idx``/``wts`` are ``(n_out, 4)``."""
    h, _, nc = f.shape
    for y in range(h):
        for j in range(idx.shape[0]):
            i0, i1, i2, i3 = idx[j, 0], idx[j, 1], idx[j, 2], idx[j, 3]
            w0, w1, w2, w3 = wts[j, 0], wts[j, 1], wts[j, 2], wts[j, 3]
            for ch in range(nc):
                out[y, j, ch] = (w0 * f[y, i0, ch] + w1 * f[y, i1, ch]
                                 + w2 * f[y, i2, ch] + w3 * f[y, i3, ch])


@njit(**_OPTS)
def taps4_cols(f, idx, wts, out):
    _, w, nc = f.shape
    for j in range(idx.shape[0]):
        i0, i1, i2, i3 = idx[j, 0], idx[j, 1], idx[j, 2], idx[j, 3]
        w0, w1, w2, w3 = wts[j, 0], wts[j, 1], wts[j, 2], wts[j, 3]
        for x in range(w):
            for ch in range(nc):
                out[j, x, ch] = (w0 * f[i0, x, ch] + w1 * f[i1, x, ch]
                                 + w2 * f[i2, x, ch] + w3 * f[i3, x, ch])


@njit(**_OPTS)
def taps4x4(f, ridx, rw, cidx, cw, out):
    """Direct 4x4 tensor-product filter: every output pixel reads its 16 neighbors."""
    _, _, nc = f.shape
    for j in range(ridx.shape[0]):
        for i in range(cidx.shape[0]):
            for ch in range(nc):
                acc = 0.0
                for r in range(4):
                    y = ridx[j, r]
                    s = (cw[i, 0] * f[y, cidx[i, 0], ch] + cw[i, 1] * f[y, cidx[i, 1], ch]
                         + cw[i, 2] * f[y, cidx[i, 2], ch] + cw[i, 3] * f[y, cidx[i, 3], ch])
                    acc += rw[j, r] * s
                out[j, i, ch] = acc


@njit(**_OPTS)
def quantize(v, out):
    """Round half up and clamp to [0, 255]; equals half-away-from-zero after clamping."""
    flat_v = v.ravel()
    flat_o = out.ravel()
    for i in range(flat_v.shape[0]):
        q = np.floor(flat_v[i] + 0.5)
        if q < 0.0:
            q = 0.0
        elif q > 255.0:
            q = 255.0
        flat_o[i] = np.uint8(q)


# -- classification ------------------------------------------------------------------

@njit(**_OPTS)
def luma_plane(px, wr, wg, wb, out):
    """Weighted sum of the three channels (or a copy of the single one)."""
    h, w, nc = px.shape
    for y in range(h):
        for x in range(w):
            if nc == 1:
                out[y, x] = float(px[y, x, 0])
            else:
                out[y, x] = wr * float(px[y, x, 0]) + wg * float(px[y, x, 1]) + wb * float(px[y, x, 2])


@njit(**_OPTS)
def _code(px, y, x):
    if px.shape[2] == 1:
        return np.int64(px[y, x, 0])
    return (np.int64(px[y, x, 0]) << 16) | (np.int64(px[y, x, 1]) << 8) | np.int64(px[y, x, 2])


_HASH_SLOTS = 1024  # power of two, > 4x the pixels of one block


@njit(**_OPTS)
def _modal_code(px, ys, ye, xs, xe, keys, counts, used):
    """Most frequent packed color in a block; ties go to the smallest code."""
    mask = keys.shape[0] - 1
    n_used = 0
    for y in range(ys, ye):
        for x in range(xs, xe):
            c = _code(px, y, x)
            slot = ((c * 40503) >> 6) & mask
            while keys[slot] != c:
                if keys[slot] == -1:
                    keys[slot] = c
                    used[n_used] = slot
                    n_used += 1
                    break
                slot = (slot + 1) & mask
            counts[slot] += 1
    best = np.int64(-1)
    best_n = 0
    for i in range(n_used):
        slot = used[i]
        k = counts[slot]
        c = keys[slot]
        if k > best_n or (k == best_n and c < best):
            best_n = k
            best = c
        keys[slot] = -1
        counts[slot] = 0
    return best


@njit(**_OPTS)
def classify_blocks(px, luma, threshold, l1, l2_low, l2_high, text_if_concentrated, tile,
                    labels, n_hg, n_bc):
    """Two-step block labelling in raster order (1 = text, 0 = pictorial).

    Gradients are read from ``luma``, colors from ``px``. Blocks decided by
    step 1 get ``n_bc = -1``.
    """
    h, w, nc = px.shape
    by_n, bx_n = labels.shape
    full = tile * tile
    keys = np.full(_HASH_SLOTS, -1, dtype=np.int64)
    counts = np.zeros(_HASH_SLOTS, dtype=np.int64)
    used = np.empty(full, dtype=np.int64)
    for by in range(by_n):
        ys = by * tile
        ye = min(ys + tile, h)
        for bx in range(bx_n):
            xs = bx * tile
            xe = min(xs + tile, w)
            npix = (ye - ys) * (xe - xs)
            count = 0
            for y in range(ys, ye):
                for x in range(xs, xe):
                    g = 0.0
                    if x + 1 < xe:
                        g = abs(luma[y, x + 1] - luma[y, x])
                    if y + 1 < ye:
                        g = max(g, abs(luma[y + 1, x] - luma[y, x]))
                    count += g > threshold
            n_hg[by, bx] = count
            if count < l1 * npix / full:
                n_bc[by, bx] = -1
                labels[by, bx] = 0
                continue

            best = _modal_code(px, ys, ye, xs, xe, keys, counts, used)
            close = 0
            for y in range(ys, ye):
                for x in range(xs, xe):
                    ok = True
                    for ch in range(nc):
                        ref = (best >> (8 * (nc - 1 - ch))) & 0xFF
                        ok &= abs(np.int64(px[y, x, ch]) - ref) <= 2
                    close += ok
            n_bc[by, bx] = close

            all_pict = (bx > 0 and by > 0 and labels[by, bx - 1] == 0
                        and labels[by - 1, bx] == 0 and labels[by - 1, bx - 1] == 0)
            l2 = l2_high if all_pict else l2_low
            concentrated = close > l2 * npix / full
            labels[by, bx] = 1 if concentrated == text_if_concentrated else 0
