"""numba-compiled kernels. Same formulas as ``numpy_backend``."""

from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # skip probing an outdated TBB; omp and workqueue are both fine here
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

NAME = "numba"


@njit(parallel=True, cache=True)
def _eval_series(t, f, w):
    n = t.size
    x = np.empty(n)
    y = np.empty(n)
    for j in prange(n):
        sx = 0.0
        sy = 0.0
        for k in range(f.size):
            phase = t[j] * f[k]
            sx += w[k] * np.cos(phase)
            sy += w[k] * np.sin(phase)
        x[j] = sx
        y[j] = sy
    return x, y


def eval_series(t, freqs, weights):
    return _eval_series(
        np.ascontiguousarray(t, dtype=np.float64),
        np.ascontiguousarray(freqs, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
    )


@njit(cache=True)
def _cell(u, ncells):
    c = np.int64(np.floor(u))
    if c > ncells - 1:
        c = ncells - 1
    return c


@njit(cache=True)
def _n_distinct(codes):
    if codes.size == 0:
        return 0
    s = np.sort(codes)
    count = 1
    for i in range(1, s.size):
        if s[i] != s[i - 1]:
            count += 1
    return count


@njit(cache=True)
def _count_point_cells(u, v, ncols, nrows):
    codes = np.empty(u.size, dtype=np.int64)
    for i in range(u.size):
        codes[i] = _cell(u[i], ncols) * nrows + _cell(v[i], nrows)
    return _n_distinct(codes)


def count_point_cells(u, v, ncols, nrows):
    return int(
        _count_point_cells(
            np.ascontiguousarray(u, dtype=np.float64),
            np.ascontiguousarray(v, dtype=np.float64),
            np.int64(ncols),
            np.int64(nrows),
        )
    )


@njit(cache=True)
def _crossing(start, stop, idx, p0, d):
    if stop > start:
        line = start + 1 + idx
    else:
        line = start - idx
    t = (line - p0) / d
    return min(max(t, 0.0), 1.0)


@njit(cache=True)
def _count_segment_cells(u, v, ncols, nrows):
    n = u.size
    iu = np.empty(n, dtype=np.int64)
    iv = np.empty(n, dtype=np.int64)
    total = n
    for i in range(n):
        iu[i] = _cell(u[i], ncols)
        iv[i] = _cell(v[i], nrows)
        if i > 0:
            total += abs(iu[i] - iu[i - 1]) + abs(iv[i] - iv[i - 1]) + 1
    codes = np.empty(total, dtype=np.int64)
    k = 0
    for i in range(n):
        codes[k] = iu[i] * nrows + iv[i]
        k += 1
    for s in range(n - 1):
        nx = abs(iu[s + 1] - iu[s])
        ny = abs(iv[s + 1] - iv[s])
        if nx + ny == 0:
            continue
        u0 = u[s]
        v0 = v[s]
        du = u[s + 1] - u0
        dv = v[s + 1] - v0
        a = 0
        b = 0
        tprev = 0.0
        while True:
            tx = _crossing(iu[s], iu[s + 1], a, u0, du) if a < nx else 1.0
            ty = _crossing(iv[s], iv[s + 1], b, v0, dv) if b < ny else 1.0
            tnext = min(tx, ty)
            if tnext > tprev:
                tm = (tprev + tnext) / 2.0
                codes[k] = _cell(u0 + tm * du, ncols) * nrows + _cell(v0 + tm * dv, nrows)
                k += 1
            if a >= nx and b >= ny:
                break
            if a < nx and (b >= ny or tx <= ty):
                a += 1
            else:
                b += 1
            tprev = tnext
    return _n_distinct(codes[:k])


def count_segment_cells(u, v, ncols, nrows):
    return int(
        _count_segment_cells(
            np.ascontiguousarray(u, dtype=np.float64),
            np.ascontiguousarray(v, dtype=np.float64),
            np.int64(ncols),
            np.int64(nrows),
        )
    )


@njit(cache=True)
def _cross(xs, ys, o, a, b):
    return (xs[a] - xs[o]) * (ys[b] - ys[o]) - (ys[a] - ys[o]) * (xs[b] - xs[o])


@njit(cache=True)
def _hull_chain(xs, ys):
    n = xs.size
    hull = np.empty(2 * n + 1, dtype=np.int64)
    k = 0
    for i in range(n):
        while k >= 2 and _cross(xs, ys, hull[k - 2], hull[k - 1], i) <= 0:
            k -= 1
        hull[k] = i
        k += 1
    lower = k + 1
    for i in range(n - 2, -1, -1):
        while k >= lower and _cross(xs, ys, hull[k - 2], hull[k - 1], i) <= 0:
            k -= 1
        hull[k] = i
        k += 1
    if n > 1:
        k -= 1
    return hull[:k].copy()


def hull_chain(xs, ys):
    return _hull_chain(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(ys, dtype=np.float64),
    )


@njit(cache=True)
def _max_sq_distance_convex(hx, hy):
    m = hx.size
    if m < 2:
        return 0.0
    if m == 2:
        dx = hx[0] - hx[1]
        dy = hy[0] - hy[1]
        return dx * dx + dy * dy
    best = 0.0
    j = 1
    for i in range(m):
        ni = (i + 1) % m
        while _cross(hx, hy, i, ni, (j + 1) % m) > _cross(hx, hy, i, ni, j):
            j = (j + 1) % m
        dx = hx[i] - hx[j]
        dy = hy[i] - hy[j]
        d = dx * dx + dy * dy
        if d > best:
            best = d
        dx = hx[ni] - hx[j]
        dy = hy[ni] - hy[j]
        d = dx * dx + dy * dy
        if d > best:
            best = d
    return best


def max_sq_distance_convex(hx, hy):
    return float(
        _max_sq_distance_convex(
            np.ascontiguousarray(hx, dtype=np.float64),
            np.ascontiguousarray(hy, dtype=np.float64),
        )
    )
