"""SVG emission: cubic Bezier curves fitted to raster contours.

The fitter is the classic least-squares chord-parameterized cubic fit
with recursive subdivision at the worst point, good enough to stay
within a quarter dot of the polygon without Newton reparameterization.
"""

from __future__ import annotations

import numpy as np

from .contour import Contour


def _bezier_point(bz, t):
    p0, p1, p2, p3 = bz
    u = 1.0 - t
    return (u ** 3)[:, None] * p0 + 3 * (u ** 2 * t)[:, None] * p1 \
        + 3 * (u * t ** 2)[:, None] * p2 + (t ** 3)[:, None] * p3


def _fit_single(pts, t, tan0, tan1):
    """Least-squares cubic with fixed endpoints and end tangents."""
    p0, p3 = pts[0], pts[-1]
    u = 1.0 - t
    b0 = u ** 3
    b1 = 3 * u ** 2 * t
    b2 = 3 * u * t ** 2
    b3 = t ** 3
    a1 = b1[:, None] * tan0
    a2 = b2[:, None] * tan1
    rhs = pts - (b0 + b1)[:, None] * p0 - (b2 + b3)[:, None] * p3
    c11 = float((a1 * a1).sum())
    c12 = float((a1 * a2).sum())
    c22 = float((a2 * a2).sum())
    x1 = float((a1 * rhs).sum())
    x2 = float((a2 * rhs).sum())
    det = c11 * c22 - c12 * c12
    if abs(det) < 1e-12:
        alpha1 = alpha2 = np.linalg.norm(p3 - p0) / 3.0
    else:
        alpha1 = (x1 * c22 - x2 * c12) / det
        alpha2 = (c11 * x2 - c12 * x1) / det
    seg_len = np.linalg.norm(p3 - p0)
    eps = 1e-6 * max(seg_len, 1.0)
    if alpha1 < eps or alpha2 < eps:
        alpha1 = alpha2 = seg_len / 3.0
    return (p0, p0 + alpha1 * tan0, p3 + alpha2 * tan1, p3)


def _chord_params(pts):
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    t = np.concatenate([[0.0], np.cumsum(d)])
    return t / t[-1] if t[-1] > 0 else np.linspace(0, 1, len(pts))


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else np.array([1.0, 0.0])


def _fit_recursive(pts, tan0, tan1, max_err, depth=0):
    if len(pts) == 2:
        d = np.linalg.norm(pts[1] - pts[0]) / 3.0
        return [(pts[0], pts[0] + d * tan0, pts[1] + d * tan1, pts[1])]
    t = _chord_params(pts)
    bz = _fit_single(pts, t, tan0, tan1)
    errs = np.linalg.norm(_bezier_point(bz, t) - pts, axis=1)
    worst = int(np.argmax(errs))
    if errs[worst] <= max_err or depth > 24:
        return [bz]
    worst = min(max(worst, 1), len(pts) - 2)
    center_tan = _unit(pts[worst - 1] - pts[worst + 1])
    return (_fit_recursive(pts[: worst + 1], tan0, center_tan, max_err, depth + 1)
            + _fit_recursive(pts[worst:], -center_tan, tan1, max_err, depth + 1))


def fit_cubics(contour: Contour, max_err: float):
    """Cubic Bezier segments approximating a closed contour within
    ``max_err`` (same units as the contour points)."""
    pts = np.asarray(contour.points, dtype=float)
    if contour.closed:
        pts = np.vstack([pts, pts[:1]])
        tan0 = _unit(pts[1] - pts[-2])
        tan1 = -tan0
    else:
        tan0 = _unit(pts[1] - pts[0])
        tan1 = _unit(pts[-2] - pts[-1])
    return _fit_recursive(pts, tan0, tan1, max_err)


def bezier_max_deviation(beziers, pts: np.ndarray) -> float:
    """Greatest distance from dense bezier samples to the polygon."""
    samples = []
    t = np.linspace(0.0, 1.0, 32)
    for bz in beziers:
        samples.append(_bezier_point(bz, t))
    samples = np.vstack(samples)
    # distance to each polygon segment, vectorized per segment
    a = pts
    b = np.roll(pts, -1, axis=0)
    best = np.full(len(samples), np.inf)
    for i in range(len(a)):
        ab = b[i] - a[i]
        denom = float(ab @ ab)
        ap = samples - a[i]
        tt = np.clip((ap @ ab) / denom, 0, 1) if denom > 0 else np.zeros(len(ap))
        d = np.linalg.norm(ap - tt[:, None] * ab, axis=1)
        best = np.minimum(best, d)
    return float(best.max())


def svg_path(contour: Contour, max_err: float) -> str:
    """SVG path data ("M ... C ... Z") for one closed contour."""
    beziers = fit_cubics(contour, max_err)
    p0 = beziers[0][0]
    parts = [f"M {p0[0]:.3f} {p0[1]:.3f}"]
    for _, c1, c2, p3 in beziers:
        parts.append(f"C {c1[0]:.3f} {c1[1]:.3f} {c2[0]:.3f} {c2[1]:.3f} "
                     f"{p3[0]:.3f} {p3[1]:.3f}")
    if contour.closed:
        parts.append("Z")
    return " ".join(parts)


def write_svg(path, contours, size, dot_px: float = 1.0,
              max_err: float | None = None) -> None:
    """Write contours (outer loops and holes) as one even-odd filled path."""
    if max_err is None:
        max_err = 0.25 * dot_px
    w, h = size
    d = " ".join(svg_path(c, max_err) for c in contours)
    body = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n'
            f'  <path d="{d}" fill="black" fill-rule="evenodd"/>\n'
            f'</svg>\n')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(body)
