"""Box counting on dyadic grids and log-log scaling fits.

The grid is anchored at the lower-left corner of the sample's bounding box.
Boxes are half-open, ``[i eps, (i+1) eps) x [j eps, (j+1) eps)``; points on
the bounding box's upper edges go into the last box. A unit-diameter sample
therefore uses at most ``2^m`` boxes per axis at scale ``eps = 2^-m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import NormalizedSample, as_points

MAX_M = 20
# extents within this many cells of a grid line are snapped onto it
_EDGE_SLACK = 1e-9


class CountMode(str, enum.Enum):
    POINTS = "points"
    SEGMENTS = "segments"

    @classmethod
    def parse(cls, value: "str | CountMode") -> "CountMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown counting mode {value!r} (expected points or segments)") from None


@dataclass(frozen=True, eq=False)
class BoxCountProfile:
    m_values: np.ndarray
    counts: np.ndarray
    exponents: np.ndarray
    mode: CountMode = CountMode.POINTS

    @classmethod
    def from_counts(cls, m_values, counts, mode: CountMode | str = CountMode.POINTS) -> "BoxCountProfile":
        """Build a profile from given counts (synthetic counts may be non-integral)."""
        m = np.asarray(m_values, dtype=np.int64)
        c = np.asarray(counts)
        if m.shape != c.shape or m.ndim != 1 or m.size == 0:
            raise ValueError("m_values and counts must be equal-length, nonempty 1-D sequences")
        if np.any(np.diff(m) <= 0) or m[0] < 1:
            raise ValueError("m_values must be increasing integers >= 1")
        if np.any(c <= 0):
            raise ValueError("box counts must be positive")
        exps = np.array([effective_exponent(ci, mi) for ci, mi in zip(c.tolist(), m.tolist())])
        for a in (m, c, exps):
            a.setflags(write=False)
        return cls(m, c, exps, CountMode.parse(mode))

    @property
    def epsilons(self) -> np.ndarray:
        return np.ldexp(1.0, -self.m_values)

    def window(self, m_lo: int, m_hi: int) -> slice:
        present = set(self.m_values.tolist())
        if m_lo not in present or m_hi not in present:
            raise ValueError(
                f"fit window [{m_lo}, {m_hi}] is outside the profile range "
                f"[{int(self.m_values[0])}, {int(self.m_values[-1])}]"
            )
        lo = int(np.searchsorted(self.m_values, m_lo))
        hi = int(np.searchsorted(self.m_values, m_hi))
        return slice(lo, hi + 1)


@dataclass(frozen=True)
class ScalingFit:
    m_lo: int
    m_hi: int
    slope: float
    intercept: float
    residual_rms: float


def _check_m(m: int, max_m: int = MAX_M) -> int:
    if int(m) != m or not 1 <= m <= max_m:
        raise ValueError(f"scale index m must be an integer in [1, {max_m}], got {m}")
    return int(m)


def cells_per_axis(extent: float, m: int) -> int:
    """Number of grid boxes needed to cover ``[0, extent]`` at ``eps = 2^-m``."""
    return max(1, math.ceil(math.ldexp(extent, m) - _EDGE_SLACK))


def _anchored(sample) -> np.ndarray:
    pts = sample.points if isinstance(sample, NormalizedSample) else as_points(sample)
    if pts.shape[0] == 0:
        raise ValueError("cannot box-count an empty sample")
    return pts - pts.min(axis=0)


def _count(shifted: np.ndarray, extent: np.ndarray, m: int, mode: CountMode) -> int:
    ncols = cells_per_axis(float(extent[0]), m)
    nrows = cells_per_axis(float(extent[1]), m)
    u = np.ldexp(shifted[:, 0], m)
    v = np.ldexp(shifted[:, 1], m)
    if mode is CountMode.SEGMENTS:
        return _kernels.count_segment_cells(u, v, ncols, nrows)
    return _kernels.count_point_cells(u, v, ncols, nrows)


def box_count(sample, m: int, mode: CountMode | str = CountMode.POINTS, max_m: int = MAX_M) -> int:
    """Occupied boxes of side ``2^-m``.

    ``sample`` is a ``NormalizedSample`` or an (N, 2) array; either way the
    grid is anchored at the bounding box's lower-left corner.
    """
    m = _check_m(m, max_m)
    shifted = _anchored(sample)
    return _count(shifted, shifted.max(axis=0), m, CountMode.parse(mode))


def effective_exponent(count: float, m: int) -> float:
    """``log N(eps) / log(1/eps)`` at ``eps = 2^-m``."""
    if int(m) != m or m < 1:
        raise ValueError(f"effective exponent needs an integer m >= 1, got {m}")
    if not count > 0:
        raise ValueError(f"box count must be positive, got {count}")
    return math.log2(count) / m


def profile(
    sample,
    m_lo: int = 1,
    m_hi: int = 10,
    mode: CountMode | str = CountMode.POINTS,
    max_m: int = MAX_M,
) -> BoxCountProfile:
    _check_m(m_lo, max_m)
    _check_m(m_hi, max_m)
    if m_lo > m_hi:
        raise ValueError(f"empty scale range [{m_lo}, {m_hi}]")
    mode = CountMode.parse(mode)
    shifted = _anchored(sample)
    extent = shifted.max(axis=0)
    ms = list(range(int(m_lo), int(m_hi) + 1))
    counts = [_count(shifted, extent, m, mode) for m in ms]
    return BoxCountProfile.from_counts(ms, np.array(counts, dtype=np.int64), mode)


def ols(x, y) -> tuple[float, float, float]:
    """Slope, intercept and RMS residual of the least-squares line ``y ~ x``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    return slope, intercept, float(np.sqrt(np.mean(resid**2)))


def fit_scaling(prof: BoxCountProfile, m_lo: int = 3, m_hi: int = 7) -> ScalingFit:
    """Least-squares line of ``log N(eps_m)`` against ``log(1/eps_m)`` over ``[m_lo, m_hi]``.

    The regression runs in base 2 against the integer ``m`` (exact for dyadic
    counts); intercept and residual are reported in natural-log units.
    """
    if m_hi - m_lo < 1:
        raise ValueError(f"fit window [{m_lo}, {m_hi}] needs at least two scales")
    sl = prof.window(m_lo, m_hi)
    m = prof.m_values[sl].astype(np.float64)
    log2_n = np.log2(np.asarray(prof.counts[sl], dtype=np.float64))
    slope, intercept, rms = ols(m, log2_n)
    ln2 = math.log(2.0)
    return ScalingFit(int(m_lo), int(m_hi), slope, intercept * ln2, rms * ln2)
