"""Shared types describing the cursive connection band between two letters."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class ShapeClass(Enum):
    CONCAVE = "concave"
    LINEAR = "linear"
    CURVILINEAR_NO_CURVATURE = "curvilinear_no_curvature"
    CURVILINEAR_WITH_CURVATURE = "curvilinear_with_curvature"
    LAYING = "laying"


@dataclass(frozen=True)
class ThicknessProfile:
    """Stroke thickness along a path, arc positions and values in dots."""

    arc_positions: np.ndarray
    thickness: np.ndarray
    method: str = "vertical_projection"

    def __post_init__(self):
        if len(self.arc_positions) != len(self.thickness):
            raise ValueError("thickness/arc sample mismatch")

    @property
    def mean(self) -> float:
        return float(np.mean(self.thickness)) if len(self.thickness) else 0.0


@dataclass(frozen=True)
class Fracture:
    arc_position: float     # dots from band start
    gap_length: float       # dots


@dataclass
class CursiveBand:
    """The connection region between two letter radicals.

    ``path`` is the centerline in pixel coordinates, ordered in the
    writing direction (right to left).  Arc positions along the band are
    measured in dots from the right end.
    """

    path: np.ndarray                    # (n, 2) px
    upper: np.ndarray                   # (n, 2) px boundary above centerline
    lower: np.ndarray                   # (n, 2) px boundary below centerline
    thickness: ThicknessProfile
    length_dots: float
    dot_px: float
    baseline_y: float
    shape: ShapeClass | None = None
    anomalies: list = field(default_factory=list)       # Fracture list
    annotations: tuple = ()
    cleaned: bool = False

    def arc_positions(self) -> np.ndarray:
        """Cumulative arc length of the path samples, in dots."""
        seg = np.linalg.norm(np.diff(self.path, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)]) / self.dot_px

    def point_at(self, arc_dots: float) -> np.ndarray:
        arcs = self.arc_positions()
        s = float(np.clip(arc_dots, arcs[0], arcs[-1]))
        x = np.interp(s, arcs, self.path[:, 0])
        y = np.interp(s, arcs, self.path[:, 1])
        return np.array([x, y])

    def tangent_at(self, arc_dots: float) -> np.ndarray:
        arcs = self.arc_positions()
        h = max(0.05, min(0.25, self.length_dots / 10))
        a = self.point_at(arc_dots - h)
        b = self.point_at(arc_dots + h)
        v = b - a
        n = np.linalg.norm(v)
        if n == 0:
            return np.array([-1.0, 0.0])
        return v / n

    def with_updates(self, **kw) -> "CursiveBand":
        return replace(self, **kw)
