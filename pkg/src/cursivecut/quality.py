"""Graphic-quality measurements: pen-width (dot) estimation, stroke
thickness profiles, fracture detection, regularity entropy and the
dot-distance check between letter portions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .band import CursiveBand, Fracture, ThicknessProfile
from .contour import direction_histogram
from .errors import AmbiguousPenWidth, NoForeground, PathOutsideInk


@dataclass(frozen=True)
class PortionCheck:
    expected: float     # dots
    measured: float     # dots
    violation: bool


@dataclass
class QualityReport:
    fractures: list = field(default_factory=list)               # Fracture list
    regularity_entropy: float = 0.0                             # bits
    regular: bool = True
    portion_distance_violations: list = field(default_factory=list)  # PortionCheck


# ---------------------------------------------------------------------------
# dot unit

def _run_lengths(mask: np.ndarray) -> np.ndarray:
    """Foreground run lengths along axis 1 of a bool array."""
    h = mask.shape[0]
    padded = np.zeros((h, mask.shape[1] + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    d = np.diff(padded, axis=1)
    starts = np.nonzero(d == 1)
    ends = np.nonzero(d == -1)
    return ends[1] - starts[1]


def estimate_dot_unit(img) -> float:
    """Pen width in pixels from the mode of row+column ink run lengths.

    Runs longer than 4x the provisional mode (stroke runs *along* their
    own direction, Kashidas, baselines) are excluded before the final
    mode is taken.
    """
    if img.ink_count == 0:
        raise NoForeground("cannot estimate pen width of an empty image")
    runs = np.concatenate([_run_lengths(img.mask), _run_lengths(img.mask.T)])
    counts = np.bincount(runs)
    provisional = int(np.argmax(counts))
    kept = runs[runs <= 4 * provisional]
    counts = np.bincount(kept)
    best = counts.max()
    modes = np.nonzero(counts == best)[0]
    if len(modes) > 1 and np.any(np.diff(modes) > 1):
        raise AmbiguousPenWidth(f"run-length mode ties at {modes.tolist()}")
    return float(modes.mean())


# ---------------------------------------------------------------------------
# thickness

def _resample_path(path: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray]:
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    n = max(int(round(total / step)) + 1, 2)
    t = np.linspace(0.0, total, n)
    xs = np.interp(t, cum, path[:, 0])
    ys = np.interp(t, cum, path[:, 1])
    return t, np.column_stack([xs, ys])


def _column_run(mask: np.ndarray, x: int, y: float):
    """The ink run in column x containing (or nearest to) row y."""
    h = mask.shape[0]
    if not (0 <= x < mask.shape[1]):
        return None
    col = mask[:, x]
    if not col.any():
        return None
    d = np.diff(np.concatenate([[0], col.view(np.int8), [0]]))
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0]      # exclusive
    for s, e in zip(starts, ends):
        if s - 0.5 <= y <= e - 0.5:
            return int(s), int(e)
    # nearest run within 1 px
    dists = np.minimum(np.abs(starts - y), np.abs(ends - 1 - y))
    i = int(np.argmin(dists))
    if dists[i] <= 1.0:
        return int(starts[i]), int(ends[i])
    return None


def _march(mask: np.ndarray, p: np.ndarray, direction: np.ndarray,
           limit: float, step: float = 0.25) -> float:
    """Distance from p to background along direction (p assumed on ink)."""
    h, w = mask.shape
    t = 0.0
    while t < limit:
        t += step
        q = p + t * direction
        xi, yi = int(np.floor(q[0])), int(np.floor(q[1]))
        if not (0 <= xi < w and 0 <= yi < h) or not mask[yi, xi]:
            return t - step / 2
    return limit


def thickness_profile(img, band_path: np.ndarray, method: str = "vertical_projection",
                      dot_px: float | None = None) -> ThicknessProfile:
    """Stroke thickness along a path, in dots.

    ``vertical_projection`` measures the height of the ink run in each
    column; ``contour_pairing`` measures between opposing boundary hits
    along the local normal.
    """
    dot = dot_px if dot_px is not None else img.dot_px
    if dot is None:
        raise ValueError("dot unit unknown; set img.dot_px or pass dot_px")
    if method not in ("vertical_projection", "contour_pairing"):
        raise ValueError(f"unknown thickness method {method!r}")
    arcs_px, samples = _resample_path(np.asarray(band_path, float), dot / 4.0)
    mask = img.mask
    values = np.zeros(len(samples))
    misses = 0
    for i, p in enumerate(samples):
        if method == "vertical_projection":
            run = _column_run(mask, int(round(p[0] - 0.5)), p[1] - 0.5)
            if run is None:
                misses += 1
                continue
            values[i] = (run[1] - run[0]) / dot
        else:
            xi, yi = int(np.floor(p[0])), int(np.floor(p[1]))
            if not (0 <= xi < mask.shape[1] and 0 <= yi < mask.shape[0]) \
                    or not mask[yi, xi]:
                misses += 1
                continue
            if i + 1 < len(samples):
                tangent = samples[i + 1] - p
            else:
                tangent = p - samples[i - 1]
            norm = np.linalg.norm(tangent)
            tangent = tangent / norm if norm > 0 else np.array([1.0, 0.0])
            normal = np.array([-tangent[1], tangent[0]])
            up = _march(mask, p, normal, 3 * dot)
            down = _march(mask, p, -normal, 3 * dot)
            values[i] = (up + down) / dot
    if misses > 0.5 * len(samples):
        raise PathOutsideInk(f"{misses}/{len(samples)} samples off the ink")
    return ThicknessProfile(arcs_px / dot, values, method)


# ---------------------------------------------------------------------------
# fractures

def _runs_where(flags: np.ndarray):
    d = np.diff(np.concatenate([[0], flags.astype(np.int8), [0]]))
    return zip(np.nonzero(d == 1)[0], np.nonzero(d == -1)[0])


def detect_fractures(profile: ThicknessProfile, img, band_path: np.ndarray,
                     thin_dots: float = 0.25, min_extent_dots: float = 0.25,
                     dot_px: float | None = None) -> list[Fracture]:
    """Breaks in the band: sustained thin stretches or background crossings."""
    dot = dot_px if dot_px is not None else img.dot_px
    if dot is None:
        raise ValueError("dot unit unknown")
    intervals = []
    arcs = profile.arc_positions
    thin = profile.thickness < thin_dots
    for s, e in _runs_where(thin):
        a0, a1 = arcs[s], arcs[min(e, len(arcs) - 1)]
        if a1 - a0 >= min_extent_dots:
            intervals.append((a0, a1))
    # direct background crossings along the path
    arcs_px, samples = _resample_path(np.asarray(band_path, float), 0.5)
    mask = img.mask
    on_bg = np.array([
        not (0 <= int(np.floor(p[0])) < mask.shape[1]
             and 0 <= int(np.floor(p[1])) < mask.shape[0]
             and mask[int(np.floor(p[1])), int(np.floor(p[0]))])
        for p in samples])
    for s, e in _runs_where(on_bg):
        gap_px = arcs_px[min(e, len(arcs_px) - 1)] - arcs_px[s]
        if gap_px >= 1.0:
            intervals.append((arcs_px[s] / dot, arcs_px[min(e, len(arcs_px) - 1)] / dot))
    if not intervals:
        return []
    intervals.sort()
    merged = [list(intervals[0])]
    for a0, a1 in intervals[1:]:
        if a0 <= merged[-1][1] + 0.1:
            merged[-1][1] = max(merged[-1][1], a1)
        else:
            merged.append([a0, a1])
    return [Fracture(0.5 * (a0 + a1), a1 - a0) for a0, a1 in merged]


# ---------------------------------------------------------------------------
# regularity

def regularity_entropy(c, bins: int = 16, threshold: float = 1.5):
    """Shannon entropy (bits) of the tangent-direction histogram.

    Returns (entropy, regular); a low-entropy contour keeps few
    directions and counts as regular.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    hist = direction_histogram(c, bins)
    total = hist.sum()
    p = hist[hist > 0] / total
    entropy = float(-(p * np.log2(p)).sum())
    return entropy, entropy < threshold


def portion_distance_check(band: CursiveBand, expected: float,
                           tolerance: float = 0.5) -> PortionCheck:
    """Compare the straight-line distance between the band's radical
    attachment points against the calligraphic table value (dots)."""
    if expected <= 0:
        raise ValueError("expected distance must be positive")
    measured = float(np.linalg.norm(band.path[-1] - band.path[0])) / band.dot_px
    return PortionCheck(expected, measured, abs(measured - expected) > tolerance)


def assess_band(band: CursiveBand, img, expected_distance: float | None = None,
                bins: int = 16, entropy_threshold: float = 1.5) -> QualityReport:
    """Full quality report for one cursive band."""
    fr = detect_fractures(band.thickness, img, band.path, dot_px=band.dot_px)
    ent, reg = regularity_entropy(band.path, bins, entropy_threshold)
    violations = []
    if expected_distance is not None:
        check = portion_distance_check(band, expected_distance)
        if check.violation:
            violations.append(check)
    return QualityReport(fr, ent, reg, violations)
