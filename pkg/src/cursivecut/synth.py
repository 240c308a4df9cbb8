"""Deterministic synthetic calligraphy generator.

Renders parametric subwords built from abstract letter archetypes joined
by parametric cursive bands, with exact ground truth: band intervals,
true cut points, pen width, per-letter standalone graphemes and
diacritic frames, plus controlled tremor and fracture injection.

Letter archetypes are stroke programs, not real outlines: "tooth" and
"ascender" are tall thin radicals, "bowl" a thick sub-baseline arc,
"stacked" joints model the multi-line ligature contexts the cutter must
refuse.  Strokes are stamped with a lozenge pen cross-section whose
diagonal equals the pen width, so axis-aligned strokes measure exactly
one dot across.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .band import Fracture, ShapeClass
from .errors import SpecInvalid
from .raster import BinaryRaster

# canvas layout, in dots
_ASCENT = 4.8
_DESCENT = 3.6
_MARGIN_X = 1.8

# joint profile geometry: (amplitude dots, truth fractions from band start)
_PROFILE_TRUTH = {
    ShapeClass.LINEAR: (0.25, 0.75),
    ShapeClass.CONCAVE: (0.25, 0.75),
    ShapeClass.CURVILINEAR_NO_CURVATURE: (0.25, 0.75),
    ShapeClass.CURVILINEAR_WITH_CURVATURE: (0.25, 0.75),
    ShapeClass.LAYING: (0.325, 0.675),
}

RECOMMENDED_LENGTH = {
    ShapeClass.LINEAR: 3.0,
    ShapeClass.CONCAVE: 6.0,
    ShapeClass.CURVILINEAR_NO_CURVATURE: 6.0,
    ShapeClass.CURVILINEAR_WITH_CURVATURE: 5.0,
    ShapeClass.LAYING: 8.0,
}

_ARCHETYPE_WIDTHS = {"tooth": 1.0, "ascender": 1.0, "bowl": 3.75}


@dataclass(frozen=True)
class LetterSpec:
    archetype: str = "tooth"
    mark: tuple | None = None   # (x frame-units, y frame-units, w dots, h dots)


@dataclass(frozen=True)
class JointSpec:
    shape: ShapeClass | None = ShapeClass.LINEAR
    length_dots: float = 2.0
    tremor: float = 0.0                 # dots, rms of centerline noise
    fractures: tuple = ()               # (arc_dots_from_band_start, gap_dots)
    taper: tuple = (1.0, 1.0)           # stroke width at start/end, dots
    stacked: bool = False               # multi-line connector instead of a band


@dataclass(frozen=True)
class SynthSpec:
    letters: tuple
    joints: tuple
    pen_width_px: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if len(self.joints) != len(self.letters) - 1:
            raise SpecInvalid(
                f"{len(self.letters)} letters need {len(self.letters) - 1} joints, "
                f"got {len(self.joints)}")
        if not self.pen_width_px > 0:
            raise SpecInvalid("pen width must be positive")
        for j in self.joints:
            if not (0.0 <= j.length_dots <= 13.0):
                raise SpecInvalid(f"joint length {j.length_dots} outside [0, 13] dots")
            if j.tremor < 0:
                raise SpecInvalid("tremor must be >= 0")
        for l in self.letters:
            if l.archetype not in _ARCHETYPE_WIDTHS:
                raise SpecInvalid(f"unknown archetype {l.archetype!r}")


@dataclass
class JointTruth:
    index: int
    shape: ShapeClass | None
    stacked: bool
    zero_length: bool
    visible_x: tuple                # (x_lo, x_hi) px of the band-only interval
    length_dots: float              # arc length of the visible centerline
    input_point: np.ndarray | None  # px, where the second letter's stroke begins
    output_point: np.ndarray | None  # px, where the first letter's stroke ends
    input_arc_dots: float | None    # arc from band start (right end)
    output_arc_dots: float | None
    centerline_px: np.ndarray | None
    fractures: list = field(default_factory=list)
    tremor: float = 0.0


@dataclass
class LetterTruth:
    index: int
    archetype: str
    attach_in: np.ndarray           # px, right attachment on the baseline
    attach_out: np.ndarray | None   # px, left attachment (None for last letter)
    standalone: BinaryRaster        # full grapheme: radical + joint stubs
    ink_bbox: tuple                 # (x0, y0, x1, y1) of the standalone grapheme
    frame_origin: np.ndarray        # (attach_in.x, baseline)
    frame_unit: tuple               # (bbox width px, bbox height px)
    mark_truth: tuple | None        # (x, y, extent) in frame units


@dataclass
class GroundTruth:
    ink_count: int
    dot_px: float
    baseline_y: float
    joints: list
    letters: list

    @property
    def n_letters(self) -> int:
        return len(self.letters)


def spec_from_dict(data: dict) -> SynthSpec:
    """Build a SynthSpec from its JSON form."""
    try:
        letters = tuple(
            LetterSpec(archetype=l.get("archetype", "tooth"),
                       mark=tuple(l["mark"]) if l.get("mark") else None)
            for l in data["letters"])
        joints = tuple(
            JointSpec(
                shape=ShapeClass(j["shape"]) if j.get("shape") else None,
                length_dots=float(j.get("length_dots", 2.0)),
                tremor=float(j.get("tremor", 0.0)),
                fractures=tuple(tuple(f) for f in j.get("fractures", ())),
                taper=tuple(j.get("taper", (1.0, 1.0))),
                stacked=bool(j.get("stacked", False)))
            for j in data["joints"])
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise SpecInvalid(f"bad synth spec: {exc}") from exc
    return SynthSpec(letters, joints,
                     pen_width_px=float(data.get("pen_width_px", 8.0)),
                     seed=int(data.get("seed", 0)))


# ---------------------------------------------------------------------------
# stroke rendering

def _densify(points: np.ndarray, widths: np.ndarray, step: float):
    """Resample a polyline (px) with per-point widths at fine arc steps."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    n = max(int(math.ceil(total / step)) + 1, 2)
    t = np.linspace(0.0, total, n)
    xs = np.interp(t, cum, points[:, 0])
    ys = np.interp(t, cum, points[:, 1])
    ws = np.interp(t, cum, widths)
    return np.column_stack([xs, ys]), ws


def _stamp(mask: np.ndarray, points: np.ndarray, widths: np.ndarray) -> None:
    """Stamp lozenge pen cross-sections along a dense point sequence."""
    if len(points) == 0:
        return
    h, w = mask.shape
    xs, ys = points[:, 0], points[:, 1]
    r = widths / 2.0
    R = int(math.ceil(r.max())) + 1
    bx = np.floor(xs).astype(int)
    by = np.floor(ys).astype(int)
    for dx in range(-R, R + 1):
        for dy in range(-R, R + 1):
            px = bx + dx
            py = by + dy
            cov = (np.abs(px + 0.5 - xs) + np.abs(py + 0.5 - ys)) <= r
            cov &= (px >= 0) & (px < w) & (py >= 0) & (py < h)
            if cov.any():
                mask[py[cov], px[cov]] = True


def _render_strokes(shape, strokes, dot):
    """Rasterize strokes given in dot coordinates (baseline y = 0 handled
    by the caller; here coordinates are already in px)."""
    mask = np.zeros(shape, dtype=bool)
    for pts, widths in strokes:
        dense, ws = _densify(pts, widths, step=min(0.3, dot / 8))
        _stamp(mask, dense, ws)
    return mask


# ---------------------------------------------------------------------------
# letter archetypes (local dot coordinates: x in [0, width], baseline y=0,
# input attachment at (width, 0), output at (0, 0), y grows downward)

def _letter_strokes(archetype: str):
    w = _ARCHETYPE_WIDTHS[archetype]
    if archetype == "tooth":
        pts = np.array([[0.5, 0.3], [0.5, -2.2]])
        return w, [(pts, np.full(2, 1.0))]
    if archetype == "ascender":
        pts = np.array([[0.5, 0.3], [0.5, -3.9]])
        return w, [(pts, np.full(2, 1.0))]
    if archetype == "bowl":
        cx, radius, width = w / 2.0, 1.0, 1.75
        theta = np.linspace(0.0, math.pi, 48)
        pts = np.column_stack([cx + radius * np.cos(theta),
                               radius * np.sin(theta)])
        return w, [(pts, np.full(len(pts), width))]
    raise SpecInvalid(f"unknown archetype {archetype!r}")


# ---------------------------------------------------------------------------
# joint centerlines

def _ramp(f: np.ndarray, center: float, width: float) -> np.ndarray:
    """Smoothstep from 0 to 1 around ``center`` over ``width``."""
    t = np.clip((f - (center - width / 2)) / width, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _profile(shape: ShapeClass, f: np.ndarray) -> np.ndarray:
    """Band centerline depth (dots, positive below baseline) at band
    fraction f in [0, 1] measured from the right end."""
    if shape is ShapeClass.LINEAR:
        return np.zeros_like(f)
    if shape is ShapeClass.CONCAVE:
        # flat - linear ramp down - flat floor - linear ramp up - flat:
        # constant-slope ramps keep all the curvature at the floor corners
        return 0.45 * np.interp(f, [0.1, 0.25, 0.75, 0.9], [0.0, 1.0, 1.0, 0.0])
    if shape is ShapeClass.CURVILINEAR_NO_CURVATURE:
        return -0.45 * np.interp(f, [0.1, 0.25, 0.75, 0.9], [0.0, 1.0, 1.0, 0.0])
    if shape is ShapeClass.CURVILINEAR_WITH_CURVATURE:
        return 0.9 * np.sin(2 * math.pi * np.clip(f, 0.0, 1.0))
    if shape is ShapeClass.LAYING:
        return 2.0 * np.interp(f, [0.075, 0.325, 0.675, 0.925], [0.0, 1.0, 1.0, 0.0])
    raise SpecInvalid(f"no profile for {shape}")


def _tremor_offsets(arcs: np.ndarray, sigma: float, rng) -> np.ndarray:
    """Hand-tremor centerline noise with rms ``sigma`` dots.

    Physiological tremor is narrowband, so a single sinusoid of random
    wavelength and phase models it: amplitude sigma*sqrt(2) gives the
    requested rms.
    """
    if sigma <= 0:
        return np.zeros_like(arcs)
    lam = rng.uniform(1.2, 1.5)
    phase = rng.uniform(0, 2 * math.pi)
    return sigma * math.sqrt(2.0) * np.sin(2 * math.pi * arcs / lam + phase)


# ---------------------------------------------------------------------------
# assembly

def _layout(spec: SynthSpec):
    """Attachment x positions (dots) of each letter, right to left."""
    widths = [_ARCHETYPE_WIDTHS[l.archetype] for l in spec.letters]
    spans = []
    for j in spec.joints:
        if j.stacked:
            spans.append(2.0)
        elif j.length_dots <= 0:
            spans.append(0.6)       # nominal zero: a short neck remains
        else:
            spans.append(j.length_dots)
    total = sum(widths) + sum(spans) + 2 * _MARGIN_X
    x = total - _MARGIN_X
    slots = []                      # (x_left, x_right) of each letter, dots
    for k, wk in enumerate(widths):
        slots.append((x - wk, x))
        x -= wk
        if k < len(spans):
            x -= spans[k]
    return slots, total


def _mask_col_extent(mask: np.ndarray):
    cols = np.nonzero(mask.any(axis=0))[0]
    return (int(cols.min()), int(cols.max())) if len(cols) else None


def synth_subword(spec: SynthSpec):
    """Render a subword and its exact ground truth.

    Deterministic: same spec and seed give identical bytes.
    """
    dot = float(spec.pen_width_px)
    slots, total_dots = _layout(spec)
    W = int(math.ceil(total_dots * dot))
    H = int(math.ceil((_ASCENT + _DESCENT) * dot))
    baseline = round(_ASCENT * dot)

    def to_px(pts_dots):
        pts = np.asarray(pts_dots, dtype=float).copy()
        pts[:, 0] *= dot
        pts[:, 1] = pts[:, 1] * dot + baseline
        return pts

    # letters alone (no stubs): needed for the visible band intervals
    letter_masks = []
    letter_strokes_px = []
    for k, lspec in enumerate(spec.letters):
        wk, strokes = _letter_strokes(lspec.archetype)
        x_left = slots[k][0]
        strokes_px = [(to_px(pts + np.array([x_left, 0.0])), widths * dot)
                      for pts, widths in strokes]
        letter_strokes_px.append(strokes_px)
        letter_masks.append(_render_strokes((H, W), strokes_px, dot))

    # joints
    joint_truths = []
    joint_strokes_px = []           # full centerline strokes per joint
    for j, jspec in enumerate(spec.joints):
        xa = slots[j][0]            # output attachment of the right letter
        xb = slots[j + 1][1]        # input attachment of the left letter
        rng = np.random.default_rng([spec.seed & 0xFFFFFFFF, j, 0xC0])
        if jspec.stacked:
            mid = 0.5 * (xa + xb)
            pts = np.array([[xa + 0.2, 0.1], [mid, -2.4], [xb - 0.2, 0.1]])
            joint_strokes_px.append([(to_px(pts), np.full(3, dot))])
            joint_truths.append(JointTruth(
                j, None, True, False, (xb * dot, xa * dot), 0.0,
                None, None, None, None, None, tremor=jspec.tremor))
            continue

        lm = _mask_col_extent(letter_masks[j + 1])
        rm = _mask_col_extent(letter_masks[j])
        xv_lo = (lm[1] + 1.0) / dot     # dots, just left of the left letter's ink
        xv_hi = (rm[0] - 0.0) / dot     # dots, right letter's ink edge
        w_vis = max(xv_hi - xv_lo, 1e-6)

        xs = np.arange(xb, xa + 0.02, 0.02)
        f = (xv_hi - xs) / w_vis
        depth_clean = _profile(jspec.shape, np.clip(f, 0.0, 1.0))
        arcs0 = np.abs(xs - xv_hi)      # approximate arc for noise phase
        depth = depth_clean + _tremor_offsets(arcs0, jspec.tremor, rng)
        widths = np.interp(f, [0.0, 1.0], [jspec.taper[0], jspec.taper[1]])
        # the rendered stroke carries the tremor; ground truth (below) uses
        # the clean profile, since noise does not move the ideal cut
        center_px = to_px(np.column_stack([xs, depth])[::-1])
        joint_strokes_px.append([(center_px, widths[::-1] * dot)])
        center = np.column_stack([xs, depth_clean])[::-1]

        if jspec.length_dots <= 0:
            joint_truths.append(JointTruth(
                j, None, False, True, (xv_lo * dot, xv_hi * dot),
                w_vis, None, None, None, None, center_px,
                tremor=jspec.tremor))
            continue

        # visible centerline and arc positions
        vis = (center[:, 0] >= xv_lo) & (center[:, 0] <= xv_hi)
        vc = center[vis]
        seg = np.linalg.norm(np.diff(vc, axis=0), axis=1)
        varc = np.concatenate([[0.0], np.cumsum(seg)])
        vlen = float(varc[-1])
        f_in, f_out = _PROFILE_TRUTH[jspec.shape]
        x_in = xv_hi - f_in * w_vis
        x_out = xv_hi - f_out * w_vis

        def point_at_x(x):
            i = int(np.argmin(np.abs(vc[:, 0] - x)))
            return to_px(vc[i:i + 1])[0], float(varc[i])

        p_in, a_in = point_at_x(x_in)
        p_out, a_out = point_at_x(x_out)
        joint_truths.append(JointTruth(
            j, jspec.shape, False, False, (xv_lo * dot, xv_hi * dot),
            vlen, p_in, p_out, a_in, a_out, to_px(vc),
            fractures=[], tremor=jspec.tremor))

    # full render
    mask = np.zeros((H, W), dtype=bool)
    for strokes in letter_strokes_px + joint_strokes_px:
        for pts, widths in strokes:
            dense, ws = _densify(pts, widths, step=min(0.3, dot / 8))
            _stamp(mask, dense, ws)

    # fracture injection
    for j, jspec in enumerate(spec.joints):
        jt = joint_truths[j]
        if jt.centerline_px is None or not jspec.fractures:
            continue
        seg = np.linalg.norm(np.diff(jt.centerline_px, axis=0), axis=1)
        arc = np.concatenate([[0.0], np.cumsum(seg)]) / dot
        for arc_pos, gap in jspec.fractures:
            i = int(np.argmin(np.abs(arc - arc_pos)))
            cx = jt.centerline_px[i]
            half = gap * dot / 2.0
            x0 = max(0, int(math.floor(cx[0] - half)))
            x1 = min(W, int(math.ceil(cx[0] + half)))
            y0 = max(0, int(math.floor(cx[1] - 1.3 * dot)))
            y1 = min(H, int(math.ceil(cx[1] + 1.3 * dot)))
            mask[y0:y1, x0:x1] = False
            jt.fractures.append(Fracture(float(arc_pos), float(gap)))

    # per-letter standalone graphemes: radical + joint stubs
    letter_truths = []
    for k, lspec in enumerate(spec.letters):
        gmask = letter_masks[k].copy()
        # output stub: right joint (index k-1 is the joint to this letter's
        # right? joints are indexed by their right letter) -- joint k joins
        # letter k (right) to letter k+1 (left).
        if k < len(spec.joints):
            jt = joint_truths[k]
            if jt.centerline_px is not None and not jt.stacked:
                cl = jt.centerline_px
                if jt.zero_length:
                    keep = np.ones(len(cl), dtype=bool)
                else:
                    # first letter keeps [band start .. output_first]
                    keep = cl[:, 0] >= jt.output_point[0]
                stub = cl[keep]
                if len(stub) >= 2:
                    jspec = spec.joints[k]
                    _stamp(gmask, *_densify(stub, np.full(len(stub), jspec.taper[0] * dot),
                                            step=min(0.3, dot / 8)))
        if k > 0:
            jt = joint_truths[k - 1]
            if jt.centerline_px is not None and not jt.stacked:
                cl = jt.centerline_px
                if jt.zero_length:
                    keep = np.ones(len(cl), dtype=bool)
                else:
                    # second letter keeps [input_second .. band end]
                    keep = cl[:, 0] <= jt.input_point[0]
                stub = cl[keep]
                if len(stub) >= 2:
                    jspec = spec.joints[k - 1]
                    _stamp(gmask, *_densify(stub, np.full(len(stub), jspec.taper[1] * dot),
                                            step=min(0.3, dot / 8)))
        cols = np.nonzero(gmask.any(axis=0))[0]
        rows = np.nonzero(gmask.any(axis=1))[0]
        bbox = (int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max()))
        attach_in = np.array([slots[k][1] * dot, float(baseline)])
        attach_out = (np.array([slots[k][0] * dot, float(baseline)])
                      if k < len(spec.joints) else None)
        unit = (bbox[2] - bbox[0] + 1.0, bbox[3] - bbox[1] + 1.0)
        origin = np.array([attach_in[0], float(baseline)])
        letter_truths.append(LetterTruth(
            k, lspec.archetype, attach_in, attach_out,
            BinaryRaster(gmask, dot), bbox, origin, unit, None))

    # detached marks, placed in each letter's frame
    for k, lspec in enumerate(spec.letters):
        if lspec.mark is None:
            continue
        fx, fy, mw, mh = lspec.mark
        lt = letter_truths[k]
        cx = lt.frame_origin[0] + fx * lt.frame_unit[0]
        cy = baseline - fy * lt.frame_unit[1]
        x0 = int(round(cx - mw * dot / 2))
        x1 = int(round(cx + mw * dot / 2))
        y0 = int(round(cy - mh * dot / 2))
        y1 = int(round(cy + mh * dot / 2))
        mask[max(0, y0):y1, max(0, x0):x1] = True
        mid = 0.5 * ((x0 + 0.5) + (x1 - 1 + 0.5))
        lt.mark_truth = ((mid - lt.frame_origin[0]) / lt.frame_unit[0],
                         fy, (x1 - x0 - 1) / lt.frame_unit[0])

    img = BinaryRaster(mask, dot)
    gt = GroundTruth(img.ink_count, dot, float(baseline), joint_truths, letter_truths)
    return img, gt


# ---------------------------------------------------------------------------
# post-hoc perturbation

def perturb(img: BinaryRaster, gt: GroundTruth, tremor: float = 0.0,
            fractures: tuple = (), seed: int = 0):
    """Warp the raster with smooth seeded noise and erase listed gaps.

    ``fractures`` entries are (joint_index, arc_dots, gap_dots).  With
    tremor 0 and no fractures this is the identity.
    """
    if tremor < 0:
        raise SpecInvalid("tremor must be >= 0")
    mask = img.mask.copy()
    dot = img.dot_px or gt.dot_px
    if tremor > 0:
        rng = np.random.default_rng([seed & 0xFFFFFFFF, 0xD1])
        h, w = mask.shape
        cell = max(4, int(round(2 * dot)))
        gh, gw = h // cell + 3, w // cell + 3
        from scipy import ndimage as ndi
        def smooth_field():
            g = rng.normal(0.0, 1.0, (gh, gw))
            f = ndi.zoom(g, (h / gh, w / gw), order=3, mode="nearest")[:h, :w]
            std = f.std()
            return f / std * tremor * dot if std > 0 else f
        dx = smooth_field()
        dy = smooth_field()
        yy, xx = np.mgrid[0:h, 0:w]
        sx = np.clip(np.round(xx + dx).astype(int), 0, w - 1)
        sy = np.clip(np.round(yy + dy).astype(int), 0, h - 1)
        mask = mask[sy, sx]
    for joint_index, arc_pos, gap in fractures:
        jt = gt.joints[joint_index]
        if jt.centerline_px is None:
            continue
        seg = np.linalg.norm(np.diff(jt.centerline_px, axis=0), axis=1)
        arc = np.concatenate([[0.0], np.cumsum(seg)]) / dot
        i = int(np.argmin(np.abs(arc - arc_pos)))
        cx = jt.centerline_px[i]
        half = gap * dot / 2.0
        x0 = max(0, int(math.floor(cx[0] - half)))
        x1 = min(mask.shape[1], int(math.ceil(cx[0] + half)))
        y0 = max(0, int(math.floor(cx[1] - 1.3 * dot)))
        y1 = min(mask.shape[0], int(math.ceil(cx[1] + 1.3 * dot)))
        mask[y0:y1, x0:x1] = False
        jt.fractures.append(Fracture(float(arc_pos), float(gap)))
    out = BinaryRaster(mask, img.dot_px)
    gt.ink_count = out.ink_count
    return out, gt
