"""Pure numpy (and, where a loop is unavoidable, pure Python) kernels."""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_BLOCK = 1 << 20  # max elements in one phase block


def eval_series(t, freqs, weights):
    """Return ``(sum w cos(f t), sum w sin(f t))`` for every node ``t``."""
    t = np.asarray(t, dtype=np.float64)
    f = np.asarray(freqs, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    x = np.empty(t.size)
    y = np.empty(t.size)
    rows = max(1, _BLOCK // max(1, f.size))
    for lo in range(0, t.size, rows):
        phase = np.multiply.outer(t[lo : lo + rows], f)
        x[lo : lo + rows] = np.cos(phase) @ w
        y[lo : lo + rows] = np.sin(phase) @ w
    return x, y


def _cells(u, ncells):
    return np.minimum(np.floor(u), ncells - 1).astype(np.int64)


def count_point_cells(u, v, ncols, nrows):
    """Number of distinct half-open unit cells holding the points ``(u, v)``.

    Coordinates are already in cell units and nonnegative; anything at or past
    the last cell's upper edge is clamped into it.
    """
    codes = _cells(u, ncols) * nrows + _cells(v, nrows)
    return int(np.unique(codes).size)


def count_segment_cells(u, v, ncols, nrows):
    """Cells met by the polygonal chain through ``(u, v)``.

    A cell counts when it holds a vertex or when some segment runs through
    its interior for a positive length. Each segment is split at its grid
    line crossings and the cell of every sub-piece's midpoint is recorded.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    iu, iv = _cells(u, ncols), _cells(v, nrows)
    codes = [iu * nrows + iv]
    if u.size < 2:
        return int(np.unique(codes[0]).size)

    u0, u1, v0, v1 = u[:-1], u[1:], v[:-1], v[1:]
    du, dv = u1 - u0, v1 - v0
    nseg = u0.size
    seg_ids, ts = [np.arange(nseg), np.arange(nseg)], [np.zeros(nseg), np.ones(nseg)]
    for start, stop, p0, d in ((iu[:-1], iu[1:], u0, du), (iv[:-1], iv[1:], v0, dv)):
        k = np.abs(stop - start)
        sid = np.repeat(np.arange(nseg), k)
        offs = np.arange(sid.size) - np.repeat(np.cumsum(k) - k, k)
        up = stop[sid] > start[sid]
        line = np.where(up, start[sid] + 1 + offs, start[sid] - offs)
        t = (line - p0[sid]) / d[sid]
        seg_ids.append(sid)
        ts.append(np.minimum(np.maximum(t, 0.0), 1.0))
    sid = np.concatenate(seg_ids)
    t = np.concatenate(ts)
    order = np.lexsort((t, sid))
    sid, t = sid[order], t[order]
    keep = (sid[1:] == sid[:-1]) & (t[1:] > t[:-1])
    s = sid[:-1][keep]
    tm = (t[:-1][keep] + t[1:][keep]) / 2.0
    um = u0[s] + tm * du[s]
    vm = v0[s] + tm * dv[s]
    codes.append(_cells(um, ncols) * nrows + _cells(vm, nrows))
    return int(np.unique(np.concatenate(codes)).size)


def _cross(xs, ys, o, a, b):
    return (xs[a] - xs[o]) * (ys[b] - ys[o]) - (ys[a] - ys[o]) * (xs[b] - xs[o])


def hull_chain(xs, ys):
    """Andrew's monotone chain on points already sorted by (x, y).

    Returns indices into the sorted arrays, counter-clockwise, without the
    closing repeat. Collinear boundary points are dropped.
    """
    xs = np.asarray(xs, dtype=np.float64).tolist()
    ys = np.asarray(ys, dtype=np.float64).tolist()
    n = len(xs)
    hull: list[int] = []
    for i in range(n):
        while len(hull) >= 2 and _cross(xs, ys, hull[-2], hull[-1], i) <= 0:
            hull.pop()
        hull.append(i)
    lower = len(hull) + 1
    for i in range(n - 2, -1, -1):
        while len(hull) >= lower and _cross(xs, ys, hull[-2], hull[-1], i) <= 0:
            hull.pop()
        hull.append(i)
    return np.asarray(hull[:-1] if n > 1 else hull, dtype=np.int64)


def max_sq_distance_convex(hx, hy):
    """Largest squared distance between vertices of a CCW convex polygon.

    Rotating calipers: for each edge, advance the antipodal vertex while the
    triangle area grows, checking both edge ends against it.
    """
    hx = np.asarray(hx, dtype=np.float64).tolist()
    hy = np.asarray(hy, dtype=np.float64).tolist()
    m = len(hx)
    if m < 2:
        return 0.0

    def d2(a, b):
        dx = hx[a] - hx[b]
        dy = hy[a] - hy[b]
        return dx * dx + dy * dy

    if m == 2:
        return d2(0, 1)
    best = 0.0
    j = 1
    for i in range(m):
        ni = (i + 1) % m
        while _cross(hx, hy, i, ni, (j + 1) % m) > _cross(hx, hy, i, ni, j):
            j = (j + 1) % m
        best = max(best, d2(i, j), d2(ni, j))
    return best
