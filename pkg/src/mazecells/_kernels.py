"""Numeric kernels with optional JIT compilation.

The hot loops of the package (nearest-lattice-node search, wall-bounded
random walks, exhaustive lattice scans, spatial autocorrelograms) run
through numba-compiled kernels by default.  Setting the environment
variable ``MAZECELLS_NO_NUMBA=1`` selects pure numpy/python fallbacks
instead; both backends are accessible side by side through
:func:`get_kernels` so they can be benchmarked and cross-checked.
"""

from __future__ import annotations

import math
import os
import warnings
from types import SimpleNamespace

import numpy as np

ENV_NO_NUMBA = "MAZECELLS_NO_NUMBA"

TWO_PI = 2.0 * math.pi

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    prange = range


def numba_disabled_by_env() -> bool:
    return os.environ.get(ENV_NO_NUMBA, "").strip().lower() in {"1", "true", "yes", "on"}


def wrap_angle(a: float) -> float:
    """Wrap an angle to the half-open interval [-pi, pi)."""
    return a - TWO_PI * math.floor((a + math.pi) / TWO_PI)


def walk_step(x, y, h, step, turn_sigma, radius, z_turn, z_retry):
    """One bounded random-walk step.

    Turn by ``turn_sigma * z_turn``, advance ``step`` along the new
    heading; if that leaves the disk of ``radius``, reflect toward the
    center (plus ``turn_sigma * z_retry``) and retry once.  Should the
    retry still exit - possible only for extreme noise draws - the step
    falls back to a noise-free toward-center move, which provably lands
    inside for step < radius.

    The angle wrap is inlined (rather than calling wrap_angle) so the
    function stays self-contained for JIT compilation.
    """
    h = h + turn_sigma * z_turn
    h = h - TWO_PI * math.floor((h + math.pi) / TWO_PI)
    cx = x + step * math.cos(h)
    cy = y + step * math.sin(h)
    if cx * cx + cy * cy >= radius * radius:
        h = math.atan2(-y, -x) + turn_sigma * z_retry
        h = h - TWO_PI * math.floor((h + math.pi) / TWO_PI)
        cx = x + step * math.cos(h)
        cy = y + step * math.sin(h)
        if cx * cx + cy * cy >= radius * radius:
            h = math.atan2(-y, -x)
            cx = x + step * math.cos(h)
            cy = y + step * math.sin(h)
    return cx, cy, h


def nearest_node(px, py, b1x, b1y, b2x, b2y, offx, offy):
    """Nearest lattice node to (px, py); returns (cx, cy, d, m, n).

    Solves real-valued lattice coordinates through the basis inverse and
    scans a 6x6 integer window around them.  Ties on squared distance keep
    the lexicographically smallest (m, n).
    """
    det = b1x * b2y - b1y * b2x
    qx = px - offx
    qy = py - offy
    tm = (b2y * qx - b2x * qy) / det
    tn = (-b1y * qx + b1x * qy) / det
    m0 = int(math.floor(tm))
    n0 = int(math.floor(tn))
    best = np.inf
    bm = 0
    bn = 0
    bx = 0.0
    by = 0.0
    for m in range(m0 - 2, m0 + 4):
        fm = float(m)
        for n in range(n0 - 2, n0 + 4):
            fn = float(n)
            cx = fm * b1x + fn * b2x + offx
            cy = fm * b1y + fn * b2y + offy
            dx = px - cx
            dy = py - cy
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                bm = m
                bn = n
                bx = cx
                by = cy
    return bx, by, math.sqrt(best), bm, bn


# jitted aliases for use inside compiled loops (identity when numba is off)
if HAVE_NUMBA:
    _wrap_k = njit(cache=True)(wrap_angle)
    _walk_step_k = njit(cache=True)(walk_step)
    _nearest_k = njit(cache=True)(nearest_node)
else:
    _wrap_k = wrap_angle
    _walk_step_k = walk_step
    _nearest_k = nearest_node


def _walk_loop(x0, y0, h0, step, turn_sigma, radius, z_turn, z_retry, out):
    # out has shape (ticks, 3); row 0 is the start pose, row t the pose at
    # tick t.  z_turn / z_retry have length ticks - 1.
    out[0, 0] = x0
    out[0, 1] = y0
    out[0, 2] = h0
    x = x0
    y = y0
    h = h0
    for t in range(z_turn.shape[0]):
        x, y, h = _walk_step_k(x, y, h, step, turn_sigma, radius, z_turn[t], z_retry[t])
        out[t + 1, 0] = x
        out[t + 1, 1] = y
        out[t + 1, 2] = h


def _walk_loop_plain(x0, y0, h0, step, turn_sigma, radius, z_turn, z_retry, out):
    # Same sequential loop, guaranteed to stay off the JIT path.
    out[0, 0] = x0
    out[0, 1] = y0
    out[0, 2] = h0
    x = x0
    y = y0
    h = h0
    for t in range(z_turn.shape[0]):
        x, y, h = walk_step(x, y, h, step, turn_sigma, radius, z_turn[t], z_retry[t])
        out[t + 1, 0] = x
        out[t + 1, 1] = y
        out[t + 1, 2] = h


def _nearest_batch_loop(px, py, b1x, b1y, b2x, b2y, offx, offy, cx, cy, d, mi, ni):
    for i in range(px.shape[0]):
        bx, by, bd, bm, bn = _nearest_k(px[i], py[i], b1x, b1y, b2x, b2y, offx, offy)
        cx[i] = bx
        cy[i] = by
        d[i] = bd
        mi[i] = bm
        ni[i] = bn


def _rates_batch_loop(px, py, b1x, b1y, b2x, b2y, offx, offy, spacing, kappa, zeta, out):
    for i in range(px.shape[0]):
        _, _, bd, _, _ = _nearest_k(px[i], py[i], b1x, b1y, b2x, b2y, offx, offy)
        out[i] = 0.5 - math.atan(kappa * (bd / spacing - zeta)) / math.pi


def _brute_loop(px, py, b1x, b1y, b2x, b2y, offx, offy, max_index, cx, cy, d, mi, ni):
    # Exhaustive scan over |m|, |n| <= max_index in lexicographic order;
    # strict < keeps the lexicographically smallest index on ties.  This is
    # deliberately independent of the windowed search in nearest_node.
    for i in prange(px.shape[0]):
        best = np.inf
        bm = 0
        bn = 0
        bx = 0.0
        by = 0.0
        for m in range(-max_index, max_index + 1):
            fm = float(m)
            for n in range(-max_index, max_index + 1):
                fn = float(n)
                nx = fm * b1x + fn * b2x + offx
                ny = fm * b1y + fn * b2y + offy
                dx = px[i] - nx
                dy = py[i] - ny
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
                    bm = m
                    bn = n
                    bx = nx
                    by = ny
        cx[i] = bx
        cy[i] = by
        d[i] = math.sqrt(best)
        mi[i] = bm
        ni[i] = bn


def _autocorr_loop(vals, visited, min_overlap, out):
    # Pearson correlation of the map with itself at every integer-bin lag,
    # over mutually visited bins.  Only the dy > 0 (plus dy == 0, dx >= 0)
    # half is computed; the mirrored lag gets the identical value so the
    # symmetry under lag negation is exact by construction.
    h, w = vals.shape
    nv = 0
    for i in range(h):
        for j in range(w):
            if visited[i, j]:
                nv += 1
    for dy in range(0, h):
        for dx in range(-(w - 1), w):
            if dy == 0 and dx < 0:
                continue
            y0 = dy
            x0 = dx if dx > 0 else 0
            x1 = w if dx > 0 else w + dx
            n = 0
            sa = 0.0
            sb = 0.0
            saa = 0.0
            sbb = 0.0
            sab = 0.0
            for i in range(y0, h):
                for j in range(x0, x1):
                    if visited[i, j] and visited[i - dy, j - dx]:
                        a = vals[i, j]
                        b = vals[i - dy, j - dx]
                        n += 1
                        sa += a
                        sb += b
                        saa += a * a
                        sbb += b * b
                        sab += a * b
            if dy == 0 and dx == 0:
                r = 1.0 if nv >= min_overlap else np.nan
            elif n < min_overlap:
                r = np.nan
            else:
                va = n * saa - sa * sa
                vb = n * sbb - sb * sb
                if va <= 0.0 or vb <= 0.0:
                    r = np.nan
                else:
                    r = (n * sab - sa * sb) / math.sqrt(va * vb)
            out[h - 1 + dy, w - 1 + dx] = r
            out[h - 1 - dy, w - 1 - dx] = r


# ---------------------------------------------------------------------------
# numpy fallbacks (vectorized where the uncompiled loop would crawl)
# ---------------------------------------------------------------------------

_WINDOW = [(dm, dn) for dm in range(-2, 4) for dn in range(-2, 4)]


def _nearest_batch_numpy(px, py, b1x, b1y, b2x, b2y, offx, offy, cx, cy, d, mi, ni):
    det = b1x * b2y - b1y * b2x
    qx = px - offx
    qy = py - offy
    m0 = np.floor((b2y * qx - b2x * qy) / det)
    n0 = np.floor((-b1y * qx + b1x * qy) / det)
    best = np.full(px.shape, np.inf)
    bm = np.zeros(px.shape, dtype=np.int64)
    bn = np.zeros(px.shape, dtype=np.int64)
    for dm, dn in _WINDOW:  # lexicographic candidate order mirrors nearest_node
        fm = m0 + float(dm)
        fn = n0 + float(dn)
        nx = fm * b1x + fn * b2x + offx
        ny = fm * b1y + fn * b2y + offy
        dx = px - nx
        dy = py - ny
        d2 = dx * dx + dy * dy
        take = d2 < best
        best[take] = d2[take]
        bm[take] = fm[take].astype(np.int64)
        bn[take] = fn[take].astype(np.int64)
    fm = bm.astype(np.float64)
    fn = bn.astype(np.float64)
    cx[:] = fm * b1x + fn * b2x + offx
    cy[:] = fm * b1y + fn * b2y + offy
    d[:] = np.sqrt(best)
    mi[:] = bm
    ni[:] = bn


def _rates_batch_numpy(px, py, b1x, b1y, b2x, b2y, offx, offy, spacing, kappa, zeta, out):
    cx = np.empty_like(px)
    cy = np.empty_like(px)
    d = np.empty_like(px)
    mi = np.empty(px.shape, dtype=np.int64)
    ni = np.empty(px.shape, dtype=np.int64)
    _nearest_batch_numpy(px, py, b1x, b1y, b2x, b2y, offx, offy, cx, cy, d, mi, ni)
    out[:] = 0.5 - np.arctan(kappa * (d / spacing - zeta)) / np.pi


def _brute_numpy(px, py, b1x, b1y, b2x, b2y, offx, offy, max_index, cx, cy, d, mi, ni):
    idx = np.arange(-max_index, max_index + 1, dtype=np.float64)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")  # m-major => lexicographic ravel
    m = mm.ravel()
    n = nn.ravel()
    nx = m * b1x + n * b2x + offx
    ny = m * b1y + n * b2y + offy
    chunk = max(1, int(2_000_000 // max(1, nx.size)))
    for lo in range(0, px.shape[0], chunk):
        hi = min(lo + chunk, px.shape[0])
        dx = px[lo:hi, None] - nx[None, :]
        dy = py[lo:hi, None] - ny[None, :]
        d2 = dx * dx + dy * dy
        k = np.argmin(d2, axis=1)  # first minimum = lexicographic smallest
        rows = np.arange(lo, hi)
        cx[rows] = nx[k]
        cy[rows] = ny[k]
        d[rows] = np.sqrt(d2[rows - lo, k])
        mi[rows] = m[k].astype(np.int64)
        ni[rows] = n[k].astype(np.int64)


def _autocorr_numpy(vals, visited, min_overlap, out):
    h, w = vals.shape
    nv = int(visited.sum())
    safe = np.where(visited, vals, 0.0)
    for dy in range(0, h):
        for dx in range(-(w - 1), w):
            if dy == 0 and dx < 0:
                continue
            y0, y1 = dy, h
            x0 = dx if dx > 0 else 0
            x1 = w if dx > 0 else w + dx
            a = safe[y0:y1, x0:x1]
            b = safe[y0 - dy : y1 - dy, x0 - dx : x1 - dx]
            m = visited[y0:y1, x0:x1] & visited[y0 - dy : y1 - dy, x0 - dx : x1 - dx]
            n = int(m.sum())
            if dy == 0 and dx == 0:
                r = 1.0 if nv >= min_overlap else np.nan
            elif n < min_overlap:
                r = np.nan
            else:
                am = np.where(m, a, 0.0)
                bm = np.where(m, b, 0.0)
                sa = am.sum()
                sb = bm.sum()
                saa = (am * am).sum()
                sbb = (bm * bm).sum()
                sab = (am * bm).sum()
                va = n * saa - sa * sa
                vb = n * sbb - sb * sb
                if va <= 0.0 or vb <= 0.0:
                    r = np.nan
                else:
                    r = (n * sab - sa * sb) / math.sqrt(va * vb)
            out[h - 1 + dy, w - 1 + dx] = r
            out[h - 1 - dy, w - 1 - dx] = r


# ---------------------------------------------------------------------------
# backend assembly
# ---------------------------------------------------------------------------

_CACHE: dict[str, SimpleNamespace] = {}


def _build_numba() -> SimpleNamespace:
    return SimpleNamespace(
        backend="numba",
        walk_loop=njit(cache=True)(_walk_loop),
        nearest_batch=njit(cache=True)(_nearest_batch_loop),
        rates_batch=njit(cache=True)(_rates_batch_loop),
        brute_force=njit(cache=True, parallel=True)(_brute_loop),
        autocorr=njit(cache=True)(_autocorr_loop),
    )


def _build_numpy() -> SimpleNamespace:
    return SimpleNamespace(
        backend="numpy",
        walk_loop=_walk_loop_plain,
        nearest_batch=_nearest_batch_numpy,
        rates_batch=_rates_batch_numpy,
        brute_force=_brute_numpy,
        autocorr=_autocorr_numpy,
    )


def get_kernels(backend: str | None = None) -> SimpleNamespace:
    """Return the kernel namespace for ``backend`` ('numba' or 'numpy').

    With ``backend=None`` the default is numba unless it is unavailable or
    disabled through MAZECELLS_NO_NUMBA.
    """
    if backend is None:
        backend = "numpy" if (numba_disabled_by_env() or not HAVE_NUMBA) else "numba"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        warnings.warn("numba unavailable, falling back to numpy kernels")
        backend = "numpy"
    if backend not in _CACHE:
        _CACHE[backend] = _build_numba() if backend == "numba" else _build_numpy()
    return _CACHE[backend]
