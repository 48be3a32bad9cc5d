"""Independent reference implementations used only by the tests.

Each is deliberately naive and shares no code with the package.
"""

from __future__ import annotations

import math

import numpy as np


def factorize(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def factorial_valuations(n: int) -> dict[int, int]:
    """Exponents in n!, by multiplying 1..n exactly and trial dividing."""
    return factorize(math.prod(range(1, n + 1)))


def factorial_valuations_additive(n: int) -> dict[int, int]:
    """Exponents in n!, by summing the factorizations of 1..n (fast for big n)."""
    out: dict[int, int] = {}
    for k in range(2, n + 1):
        for p, e in factorize(k).items():
            out[p] = out.get(p, 0) + e
    return out


def trial_division_primes(n: int) -> list[int]:
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, math.isqrt(k) + 1))]


def brute_diameter(points) -> float:
    pts = np.asarray(points, dtype=np.float64)
    best = 0.0
    for i in range(len(pts)):
        dx = pts[i, 0] - pts[i + 1 :, 0]
        dy = pts[i, 1] - pts[i + 1 :, 1]
        if dx.size:
            best = max(best, float(np.max(dx * dx + dy * dy)))
    return math.sqrt(best)


def _last_index(extent: float, eps: float) -> int:
    return max(1, int(np.ceil(extent / eps))) - 1


def exhaustive_box_count(points, m: int) -> int:
    """Enumerate every box of the anchored grid and test each for a point."""
    pts = np.asarray(points, dtype=np.float64)
    pts = pts - pts.min(axis=0)
    eps = 2.0**-m
    ext = pts.max(axis=0)
    last_x, last_y = _last_index(ext[0], eps), _last_index(ext[1], eps)
    x, y = pts[:, 0], pts[:, 1]
    count = 0
    for i in range(last_x + 1):
        in_x = (x >= i * eps) & ((x < (i + 1) * eps) | (i == last_x))
        if not in_x.any():
            continue
        for j in range(last_y + 1):
            in_y = (y >= j * eps) & ((y < (j + 1) * eps) | (j == last_y))
            if np.any(in_x & in_y):
                count += 1
    return count


def _clip_length(p0, p1, lo, hi) -> float:
    """Parametric length of the segment p0->p1 inside the closed box [lo, hi]."""
    t0, t1 = 0.0, 1.0
    for a in range(2):
        d = p1[a] - p0[a]
        if d == 0.0:
            if not lo[a] <= p0[a] <= hi[a]:
                return 0.0
            continue
        ta, tb = (lo[a] - p0[a]) / d, (hi[a] - p0[a]) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    return max(0.0, t1 - t0)


def exhaustive_segment_box_count(points, m: int) -> int:
    """Boxes holding a vertex or crossed by a segment for a positive length.

    Exact for inputs in general position (no segment along a grid line).
    """
    pts = np.asarray(points, dtype=np.float64)
    pts = pts - pts.min(axis=0)
    eps = 2.0**-m
    ext = pts.max(axis=0)
    last_x, last_y = _last_index(ext[0], eps), _last_index(ext[1], eps)
    occupied = set()
    for x, y in pts:
        occupied.add((min(int(x // eps), last_x), min(int(y // eps), last_y)))
    for s in range(len(pts) - 1):
        p0, p1 = pts[s], pts[s + 1]
        ilo, ihi = (int(min(p0[0], p1[0]) // eps), int(max(p0[0], p1[0]) // eps))
        jlo, jhi = (int(min(p0[1], p1[1]) // eps), int(max(p0[1], p1[1]) // eps))
        for i in range(ilo, min(ihi, last_x) + 1):
            for j in range(jlo, min(jhi, last_y) + 1):
                lo = (i * eps, j * eps)
                hi = ((i + 1) * eps, (j + 1) * eps)
                if _clip_length(p0, p1, lo, hi) > 0.0:
                    occupied.add((i, j))
    return len(occupied)


def direct_sum(terms, t: float) -> tuple[float, float]:
    """Plain Python evaluation of sum w exp(i f t)."""
    x = math.fsum(w * math.cos(f * t) for f, w in terms)
    y = math.fsum(w * math.sin(f * t) for f, w in terms)
    return x, y
