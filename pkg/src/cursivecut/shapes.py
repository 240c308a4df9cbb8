"""Landmark shape statistics: Procrustes alignment, mean shapes,
band variability, and the per-letter diacritic coordinate frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .band import CursiveBand
from .errors import (DegenerateShape, MismatchedLandmarkCount,
                     MissingInputPoint, NoShapes)


@dataclass(frozen=True)
class LandmarkShape:
    """Fixed-length ordered sequence of 2-D landmarks."""

    points: np.ndarray          # (k, 2) float64

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise DegenerateShape(f"need >= 3 landmarks of dim 2, got {pts.shape}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    @property
    def centroid_size(self) -> float:
        return float(np.linalg.norm(self.points - self.centroid))

    def normalized(self) -> "LandmarkShape":
        """Centered at the origin, scaled to unit centroid size."""
        size = self.centroid_size
        if size <= 0:
            raise DegenerateShape("all landmarks coincide")
        return LandmarkShape((self.points - self.centroid) / size)


@dataclass(frozen=True)
class ProcrustesTransform:
    """Similarity transform aligning shape b onto shape a."""

    rotation: float             # radians, applied to normalized b
    scale: float                # a_size / b_size
    a_centroid: np.ndarray
    b_centroid: np.ndarray

    def apply(self, b: LandmarkShape) -> np.ndarray:
        """Map b's raw landmarks into a's raw coordinate frame."""
        c, s = np.cos(self.rotation), np.sin(self.rotation)
        R = np.array([[c, -s], [s, c]])
        pts = (b.points - self.b_centroid) @ R.T * self.scale
        return pts + self.a_centroid


def _optimal_rotation(a: np.ndarray, b: np.ndarray) -> float:
    """Rotation angle maximizing alignment of b with a (no reflection)."""
    num = float(np.sum(b[:, 0] * a[:, 1] - b[:, 1] * a[:, 0]))
    den = float(np.sum(b[:, 0] * a[:, 0] + b[:, 1] * a[:, 1]))
    return float(np.arctan2(num, den))


def procrustes_align(a: LandmarkShape, b: LandmarkShape):
    """Optimal similarity alignment of b onto a.

    Both shapes are centered and scaled to unit centroid size; the
    rotation comes in closed form from the landmark cross terms.
    Returns (transform, distance) with distance the root-sum-square
    residual, which lies in [0, 2].
    """
    if len(a) != len(b):
        raise MismatchedLandmarkCount(f"{len(a)} vs {len(b)} landmarks")
    an = a.normalized().points
    bn = b.normalized().points
    theta = _optimal_rotation(an, bn)
    c, s = np.cos(theta), np.sin(theta)
    R = np.array([[c, -s], [s, c]])
    residual = an - bn @ R.T
    dist = float(np.linalg.norm(residual))
    tf = ProcrustesTransform(theta, a.centroid_size / b.centroid_size,
                             a.centroid, b.centroid)
    return tf, dist


def procrustes_distance(a: LandmarkShape, b: LandmarkShape) -> float:
    return procrustes_align(a, b)[1]


@dataclass(frozen=True)
class GPAResult:
    mean: LandmarkShape
    converged: bool
    iterations: int


def procrustes_mean(shapes: list[LandmarkShape], tol: float = 1e-8,
                    max_iter: int = 100) -> GPAResult:
    """Generalized Procrustes mean shape (unit centroid size).

    Iteratively aligns every shape to the current mean, averages the
    landmarks and renormalizes, until the mean moves less than ``tol``.
    """
    if not shapes:
        raise NoShapes("need at least one shape")
    k = len(shapes[0])
    for s in shapes:
        if len(s) != k:
            raise MismatchedLandmarkCount("all shapes must share landmark count")
    normed = [s.normalized().points for s in shapes]
    mean = normed[0]
    for it in range(1, max_iter + 1):
        aligned = []
        for pts in normed:
            theta = _optimal_rotation(mean, pts)
            c, s = np.cos(theta), np.sin(theta)
            R = np.array([[c, -s], [s, c]])
            aligned.append(pts @ R.T)
        new_mean = np.mean(aligned, axis=0)
        new_mean -= new_mean.mean(axis=0)
        size = np.linalg.norm(new_mean)
        if size <= 0:
            raise DegenerateShape("degenerate mean shape")
        new_mean /= size
        # keep the mean's rotation anchored to the previous iterate
        theta = _optimal_rotation(mean, new_mean)
        c, s = np.cos(theta), np.sin(theta)
        new_mean = new_mean @ np.array([[c, -s], [s, c]]).T
        moved = float(np.linalg.norm(new_mean - mean))
        mean = new_mean
        if moved < tol:
            return GPAResult(LandmarkShape(mean), True, it)
    return GPAResult(LandmarkShape(mean), False, max_iter)


# ---------------------------------------------------------------------------
# variability of cursive bands (coefficient of variation, percent)

@dataclass(frozen=True)
class ClassVariability:
    size_variability: float         # percent
    thickness_variability: float    # percent
    n_instances: int


@dataclass(frozen=True)
class VariabilityReport:
    per_class: dict                 # shape-class value -> ClassVariability


def variability_report(instances: list[CursiveBand]) -> VariabilityReport:
    """Size/thickness coefficient of variation per band shape class.

    Classes with fewer than 2 instances are omitted.
    """
    groups: dict = {}
    for band in instances:
        if band.shape is None:
            continue
        groups.setdefault(band.shape.value, []).append(band)
    per_class = {}
    for cls in sorted(groups):
        bands = groups[cls]
        if len(bands) < 2:
            continue
        lengths = np.array([b.length_dots for b in bands])
        thicks = np.array([b.thickness.mean for b in bands])
        per_class[cls] = ClassVariability(
            size_variability=100.0 * float(np.std(lengths, ddof=1) / np.mean(lengths)),
            thickness_variability=100.0 * float(np.std(thicks, ddof=1) / np.mean(thicks)),
            n_instances=len(bands),
        )
    return VariabilityReport(per_class)


# ---------------------------------------------------------------------------
# diacritic landmark frame

@dataclass(frozen=True)
class DiacriticFrame:
    """Per-letter frame: baseline x-axis, perpendicular through the
    letter's input point, letter-box dimensions as units."""

    origin: np.ndarray          # (x, y) px: baseline crossing of the input normal
    unit: tuple                 # (base width px, base height px), both > 0
    baseline_y: float

    def __post_init__(self):
        if not (self.unit[0] > 0 and self.unit[1] > 0):
            raise DegenerateShape(f"frame units must be positive, got {self.unit}")


def diacritic_frame(base_points: np.ndarray, baseline_y: float,
                    input_point=None) -> DiacriticFrame:
    """Frame for locating marks relative to a base grapheme.

    ``base_points`` is the grapheme outline or pixel cloud; ``input_point``
    comes from the grapheme's cut metadata.
    """
    if input_point is None:
        raise MissingInputPoint("grapheme has no recorded input point")
    pts = np.asarray(base_points, dtype=float)
    if pts.size == 0:
        raise DegenerateShape("empty base grapheme")
    w = float(pts[:, 0].max() - pts[:, 0].min())
    h = float(pts[:, 1].max() - pts[:, 1].min())
    origin = np.array([float(input_point[0]), float(baseline_y)])
    return DiacriticFrame(origin, (w, h), float(baseline_y))


def diacritic_coords(frame: DiacriticFrame, mark_pixels: np.ndarray):
    """(x, y, extent) of a detached mark in frame units.

    The mark projects onto the baseline as a segment; x is the segment
    midpoint, y the signed height (positive above the baseline) of the
    mark point over that midpoint, extent the segment length.
    """
    px = np.asarray(mark_pixels, dtype=float)
    if px.size == 0:
        raise DegenerateShape("empty mark")
    cx = px[:, 0] + 0.5
    cy = px[:, 1] + 0.5
    lo, hi = float(cx.min()), float(cx.max())
    mid = 0.5 * (lo + hi)
    at_mid = np.abs(cx - mid) <= 0.5
    y_px = float(np.mean(cy[at_mid])) if at_mid.any() else float(np.mean(cy))
    x = (mid - frame.origin[0]) / frame.unit[0]
    y = (frame.baseline_y - y_px) / frame.unit[1]
    extent = (hi - lo) / frame.unit[0]
    return float(x), float(y), float(extent)
