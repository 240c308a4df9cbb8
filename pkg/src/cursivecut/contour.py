"""Boundary tracing, resampling, curvature and tangent statistics.

Contours are closed polygons whose vertices lie on the pixel-corner
lattice (sub-pixel with respect to pixel centers), traced so that the
enclosed area matches the pixel count exactly: a filled 3x3 square
yields a contour of shoelace area 9.  Outer contours carry positive
shoelace area, hole contours negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateContour, NoForeground
from .raster import BinaryRaster
from .shapes import LandmarkShape


@dataclass(frozen=True)
class Contour:
    points: np.ndarray          # (n, 2) float64 vertices (x, y)
    closed: bool = True

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if self.closed and len(pts) < 4:
            raise DegenerateContour(f"closed contour needs >= 4 points, got {len(pts)}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def reversed(self) -> "Contour":
        return Contour(self.points[::-1], self.closed)

    @property
    def signed_area(self) -> float:
        return shoelace_area(self.points)

    @property
    def perimeter(self) -> float:
        return float(segment_lengths(self.points, self.closed).sum())


@dataclass(frozen=True)
class CurvatureProfile:
    """Signed curvature sampled along arc length, both in dot units."""

    arc_positions: np.ndarray   # dots, strictly increasing
    kappa: np.ndarray           # 1/dots, signed
    window: float               # dots


def shoelace_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def segment_lengths(points: np.ndarray, closed: bool) -> np.ndarray:
    p = np.vstack([points, points[:1]]) if closed else points
    return np.linalg.norm(np.diff(p, axis=0), axis=1)


# ---------------------------------------------------------------------------
# crack-edge boundary following

_LEFT = {(1, 0): (0, -1), (0, -1): (-1, 0), (-1, 0): (0, 1), (0, 1): (1, 0)}
_RIGHT = {v: k for k, v in _LEFT.items()}

# pixels ahead of a corner, relative to direction: (front_left, front_right)
# offsets are of the pixel whose top-left corner is the key position
_AHEAD = {
    (1, 0): ((0, -1), (0, 0)),
    (0, 1): ((0, 0), (-1, 0)),
    (-1, 0): ((-1, 0), (-1, -1)),
    (0, -1): ((-1, -1), (0, -1)),
}


def _trace_from(mask, x0, y0, visited):
    """Walk one closed crack contour starting at the top edge of pixel (x0, y0).

    Foreground is kept on the walker's right (image coordinates, y down),
    which makes outer loops positive-shoelace and holes negative.  At
    diagonal pinches the walker turns through the shared corner, so the
    foreground is treated as 8-connected.
    """
    h, w = mask.shape

    def fg(px, py):
        return 0 <= px < w and 0 <= py < h and mask[py, px]

    start = (x0, y0)
    pos, d = start, (1, 0)
    pts = []
    while True:
        if d == (1, 0):
            visited[pos[1], pos[0]] = True   # traversing top edge of pixel at pos
        pts.append(pos)
        pos = (pos[0] + d[0], pos[1] + d[1])
        fl_off, fr_off = _AHEAD[d]
        fl = fg(pos[0] + fl_off[0], pos[1] + fl_off[1])
        fr = fg(pos[0] + fr_off[0], pos[1] + fr_off[1])
        if fl:
            d = _LEFT[d]
        elif fr:
            pass
        else:
            d = _RIGHT[d]
        if pos == start and d == (1, 0):
            break
    return np.array(pts, dtype=float)


def trace_boundary(img: BinaryRaster) -> list[Contour]:
    """All boundary contours: outer loops and interior holes.

    One outer contour per 8-connected component plus one per hole,
    discovered in scanline order (deterministic).
    """
    mask = img.mask
    if not mask.any():
        raise NoForeground("no foreground to trace")
    h, w = mask.shape
    above = np.zeros_like(mask)
    above[1:] = mask[:-1]
    top_edges = mask & ~above        # pixel is fg, pixel above is bg
    visited = np.zeros_like(mask)
    contours = []
    for y, x in zip(*np.nonzero(top_edges)):
        if visited[y, x]:
            continue
        pts = _trace_from(mask, int(x), int(y), visited)
        contours.append(Contour(pts))
    return contours


def outer_contour(img: BinaryRaster) -> Contour:
    """Largest positive-area contour; convenience for single-blob images."""
    cs = [c for c in trace_boundary(img) if c.signed_area > 0]
    return max(cs, key=lambda c: c.signed_area)


# ---------------------------------------------------------------------------
# resampling and curvature

def _resample_closed(points: np.ndarray, n: int, start_idx: int = 0) -> np.ndarray:
    """n points equally spaced in arc length around a closed polygon."""
    pts = np.roll(points, -start_idx, axis=0)
    pts = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0:
        raise DegenerateContour("zero-length contour")
    targets = np.arange(n) * (total / n)
    xs = np.interp(targets, cum, pts[:, 0])
    ys = np.interp(targets, cum, pts[:, 1])
    return np.column_stack([xs, ys])


def resample_arclength(c: Contour, k: int) -> LandmarkShape:
    """k landmarks at equal arc spacing, anchored at the min-(y, x) vertex."""
    if k < 3:
        raise ValueError(f"landmark count must be >= 3, got {k}")
    pts = c.points
    start = int(np.lexsort((pts[:, 0], pts[:, 1]))[0])
    return LandmarkShape(_resample_closed(pts, k, start))


def resample_polyline(points: np.ndarray, step: float) -> np.ndarray:
    """Open polyline resampled at uniform arc steps."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0 or step <= 0:
        raise DegenerateContour("degenerate polyline")
    n = max(int(round(total / step)) + 1, 2)
    t = np.linspace(0.0, total, n)
    return np.column_stack([np.interp(t, cum, points[:, 0]),
                            np.interp(t, cum, points[:, 1])])


def smooth_polyline(points: np.ndarray, sigma: float,
                    step: float = 0.1) -> np.ndarray:
    """Gaussian-smooth an open polyline at scale ``sigma`` along its arc.

    The polyline is first resampled uniformly in arc length so the
    smoothing scale is isotropic along the path, not along x.
    """
    p = resample_polyline(points, step)
    s = sigma / step
    return np.column_stack([ndimage.gaussian_filter1d(p[:, 0], s, mode="nearest"),
                            ndimage.gaussian_filter1d(p[:, 1], s, mode="nearest")])


def polyline_curvature(points: np.ndarray, window: float) -> tuple[np.ndarray, np.ndarray]:
    """Turning-angle curvature of an open polyline (units as given).

    Returns (arc_positions, kappa).  The polyline is resampled at
    window/4 steps; each curvature sample compares the chord directions
    over a full window behind and ahead.
    """
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0 or window <= 0:
        raise DegenerateContour("degenerate polyline")
    h = window / 4.0
    n = max(int(round(total / h)) + 1, 9)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    t = np.linspace(0.0, total, n)
    xs = np.interp(t, cum, points[:, 0])
    ys = np.interp(t, cum, points[:, 1])
    p = np.column_stack([xs, ys])
    step = total / (n - 1)
    m = max(1, int(round(window / step)))
    kappa = np.zeros(n)
    for i in range(n):
        a = max(0, i - m)
        b = min(n - 1, i + m)
        v_in = p[i] - p[a]
        v_out = p[b] - p[i]
        ang = np.arctan2(v_out[1], v_out[0]) - np.arctan2(v_in[1], v_in[0])
        ang = (ang + np.pi) % (2 * np.pi) - np.pi
        # chord midpoints sit (b - a)/2 steps apart; angle per that arc
        span = 0.5 * (b - a) * step
        kappa[i] = ang / span if span > 0 else 0.0
    return t, kappa


def curvature_profile(c: Contour, window: float, dot_px: float = 1.0) -> CurvatureProfile:
    """Signed curvature along a closed contour, in dot units."""
    if window <= 0:
        raise ValueError("window must be positive")
    pts = c.points / dot_px
    seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0:
        raise DegenerateContour("zero-length contour")
    h = window / 4.0
    n = max(int(round(total / h)), 8)
    p = _resample_closed(pts, n)
    step = total / n
    m = max(1, int(round(window / step)))
    fwd = np.roll(p, -m, axis=0) - p
    bwd = p - np.roll(p, m, axis=0)
    ang = np.arctan2(fwd[:, 1], fwd[:, 0]) - np.arctan2(bwd[:, 1], bwd[:, 0])
    ang = (ang + np.pi) % (2 * np.pi) - np.pi
    # positive for positively-oriented (outer) contours
    kappa = ang / (m * step)
    arcs = np.arange(n) * step
    return CurvatureProfile(arcs, kappa, window)


def direction_histogram(c, bins: int) -> np.ndarray:
    """Length-weighted histogram of tangent directions over [0, 2pi)."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if isinstance(c, Contour):
        pts, closed = c.points, c.closed
    else:
        pts, closed = np.asarray(c, dtype=float), False
    p = np.vstack([pts, pts[:1]]) if closed else pts
    d = np.diff(p, axis=0)
    lengths = np.linalg.norm(d, axis=1)
    keep = lengths > 0
    if not keep.any():
        raise DegenerateContour("no nonzero segments")
    angles = np.mod(np.arctan2(d[keep, 1], d[keep, 0]), 2 * np.pi)
    hist, _ = np.histogram(angles, bins=bins, range=(0.0, 2 * np.pi),
                           weights=lengths[keep])
    return hist


# ---------------------------------------------------------------------------
# active-contour refinement

def refine_active_contour(c: Contour, img: BinaryRaster, iterations: int,
                          alpha: float = 0.05, beta: float = 0.1) -> Contour:
    """Relax a closed contour onto the ink boundary of ``img``.

    Internal energy is alpha*stretch + beta*bend; the external term pulls
    points down the unsigned distance to the foreground/background
    interface (computed from the signed pixel distance field, whose zero
    level sits between ink and paper).  iterations=0 is the identity.
    """
    if iterations < 0 or alpha < 0 or beta < 0:
        raise ValueError("iterations, alpha, beta must be non-negative")
    if iterations == 0:
        return c
    mask = img.mask
    inside = ndimage.distance_transform_edt(mask)
    outside = ndimage.distance_transform_edt(~mask)
    sdf = np.abs(inside - outside)      # ~0 on the ink boundary
    gy, gx = np.gradient(sdf)

    n = len(c.points)
    gamma = 0.4
    # pentadiagonal internal-energy operator (circulant)
    a, b = alpha, beta
    row = np.zeros(n)
    row[0] = 2 * a + 6 * b
    row[1] = row[-1] = -a - 4 * b
    if n > 3:
        row[2] = row[-2] = b
    A = np.empty((n, n))
    for i in range(n):
        A[i] = np.roll(row, i)
    M = np.linalg.inv(np.eye(n) + gamma * A)

    h, w = mask.shape

    def sample(field, pts):
        # bilinear sample at pixel-center coordinates
        x = np.clip(pts[:, 0] - 0.5, 0, w - 1.001)
        y = np.clip(pts[:, 1] - 0.5, 0, h - 1.001)
        x0 = x.astype(int)
        y0 = y.astype(int)
        fx, fy = x - x0, y - y0
        return (field[y0, x0] * (1 - fx) * (1 - fy)
                + field[y0, x0 + 1] * fx * (1 - fy)
                + field[y0 + 1, x0] * (1 - fx) * fy
                + field[y0 + 1, x0 + 1] * fx * fy)

    pts = c.points.copy()
    for _ in range(iterations):
        fx = -sample(gx, pts)
        fy = -sample(gy, pts)
        pts = M @ (pts + gamma * np.column_stack([fx, fy]))
    return Contour(pts, c.closed)
