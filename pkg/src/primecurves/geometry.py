"""Centering and rescaling of planar samples before box counting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


class DegenerateSampleError(ValueError):
    """All points coincide, so there is no scale to normalize by."""


class NormalizationMethod(str, enum.Enum):
    CENTROID_DIAMETER = "centroid-diameter"
    MAX_RADIUS = "max-radius"
    BOUNDING_BOX = "bounding-box"

    @classmethod
    def parse(cls, value: "str | NormalizationMethod") -> "NormalizationMethod":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown normalization {value!r} (expected one of: {names})") from None


@dataclass(frozen=True, eq=False)
class NormalizedSample:
    points: np.ndarray
    method: NormalizationMethod
    centroid_before: tuple[float, float]
    scale_factor: float

    def __len__(self) -> int:
        return int(self.points.shape[0])


def as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1 and pts.size == 2:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of planar points, got shape {pts.shape}")
    return pts


def centroid(points) -> tuple[float, float]:
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("centroid of an empty point set")
    c = pts.mean(axis=0)
    return float(c[0]), float(c[1])


def convex_hull(points) -> np.ndarray:
    """Hull vertices in counter-clockwise order, as an (H, 2) array."""
    pts = as_points(points)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    srt = pts[order]
    return srt[_kernels.hull_chain(srt[:, 0], srt[:, 1])]


def diameter(points) -> float:
    """Largest pairwise Euclidean distance (convex hull + rotating calipers)."""
    pts = as_points(points)
    if pts.shape[0] == 0 or np.all(pts == pts[0]):
        raise DegenerateSampleError("diameter is zero: all points coincide")
    hull = convex_hull(pts)
    return math.sqrt(_kernels.max_sq_distance_convex(hull[:, 0], hull[:, 1]))


def _scale(centered: np.ndarray, method: NormalizationMethod) -> float:
    if method is NormalizationMethod.CENTROID_DIAMETER:
        return diameter(centered)
    if method is NormalizationMethod.MAX_RADIUS:
        return float(np.max(np.hypot(centered[:, 0], centered[:, 1])))
    extent = centered.max(axis=0) - centered.min(axis=0)
    return float(extent.max())


def normalize(points, method: NormalizationMethod | str = NormalizationMethod.CENTROID_DIAMETER) -> NormalizedSample:
    """Subtract the centroid, then divide by the method's scale.

    ``centroid-diameter`` divides by the diameter, ``max-radius`` by the
    largest distance from the centroid and ``bounding-box`` by the longer side
    of the axis-aligned bounding box.
    """
    method = NormalizationMethod.parse(method)
    pts = as_points(points)
    if pts.shape[0] == 0 or np.all(pts == pts[0]):
        raise DegenerateSampleError("cannot normalize: all points coincide")
    c = centroid(pts)
    centered = pts - np.array(c)
    scale = _scale(centered, method)
    if not scale > 0.0:
        raise DegenerateSampleError(f"{method.value} scale is {scale}")
    out = centered / scale
    out.setflags(write=False)
    return NormalizedSample(out, method, c, scale)
