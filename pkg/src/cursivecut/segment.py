"""Cutting cursive subwords into per-letter graphemes.

The pipeline per joint: locate the cursive band between two radicals,
clean its thickness profile, classify its shape, split it at curvature
landmarks, choose the two cut points (the second letter's input and the
first letter's output), then duplicate the subword and cut each copy
once so both graphemes keep the shared band portion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .band import CursiveBand, ThicknessProfile
from .contour import polyline_curvature, smooth_polyline
from .errors import (BandCountMismatch, BandTooShort, CursiveCutError,
                     JointError, NonSeparatingCut)
from .quality import QualityReport, assess_band, estimate_dot_unit
from .raster import (BinaryRaster, RoleHint, connected_components,
                     estimate_baseline)
from .rules import ElongationKind, RuleTable, classify_cursive_shape, default_table


@dataclass(frozen=True)
class CutPoints:
    """The two cut positions on a band, arcs in dots from the right end."""

    input_second: float         # where the second (left) letter's stroke begins
    output_first: float         # where the first (right) letter's stroke ends
    input_point: np.ndarray     # px
    output_point: np.ndarray    # px
    input_tangent: np.ndarray   # unit, along the writing direction
    output_tangent: np.ndarray


@dataclass(frozen=True)
class BandDecomposition:
    splits: tuple               # arc positions (dots) of curvature landmarks
    segments: tuple             # (arc_start, arc_end) sub-segments covering the band


@dataclass
class GraphemePair:
    """The two overlapping graphemes produced by cutting one joint.

    ``right`` contains everything up to the first letter's output point,
    ``left`` everything from the second letter's input point on; their
    union is exactly the original subword and their intersection is the
    duplicated common band portion.
    """

    right: BinaryRaster
    left: BinaryRaster
    common: BinaryRaster
    cuts: CutPoints
    band: CursiveBand


# ---------------------------------------------------------------------------
# band localization

def _column_runs(col: np.ndarray):
    d = np.diff(np.concatenate([[0], col.view(np.int8), [0]]))
    return np.nonzero(d == 1)[0], np.nonzero(d == -1)[0]


def _candidate_columns(mask: np.ndarray, baseline: float, dot: float):
    """Columns holding exactly one band-like run: about a dot thick,
    near the baseline.  Returns (flags, centers, tops, bottoms)."""
    h, w = mask.shape
    flags = np.zeros(w, dtype=bool)
    centers = np.full(w, np.nan)
    tops = np.full(w, np.nan)
    bots = np.full(w, np.nan)
    for x in range(w):
        col = mask[:, x]
        if not col.any():
            continue
        starts, ends = _column_runs(col)
        if len(starts) != 1:
            continue
        s, e = int(starts[0]), int(ends[0])
        thick = e - s
        if not (0.35 * dot <= thick <= 1.7 * dot):
            continue
        center = 0.5 * (s + e)
        if not (baseline - 1.7 * dot <= center <= baseline + 2.3 * dot):
            continue
        if s < baseline - 2.3 * dot:
            continue
        flags[x] = True
        centers[x] = center
        tops[x] = s
        bots[x] = e
    return flags, centers, tops, bots


def _group_intervals(flags: np.ndarray, max_gap: float):
    """Maximal candidate column intervals, merged across small gaps."""
    idx = np.nonzero(flags)[0]
    if len(idx) == 0:
        return []
    groups = [[int(idx[0]), int(idx[0])]]
    for x in idx[1:]:
        if x - groups[-1][1] - 1 < max_gap:
            groups[-1][1] = int(x)
        else:
            groups.append([int(x), int(x)])
    return [tuple(g) for g in groups]


def _trim_letter_blend(x0, x1, tops, bots, dot):
    """Pull band ends off columns where the stroke thickens into a letter.

    The band proper is uniform pen-width ink; columns at either end whose
    run is markedly thicker than the band's median belong to the adjacent
    letter's blend zone.  At most one dot is trimmed per side.
    """
    t = bots[x0:x1 + 1] - tops[x0:x1 + 1]
    good = t[~np.isnan(t)]
    if len(good) < 3:
        return x0, x1
    lim = 1.3 * float(np.median(good))
    max_trim = int(round(dot))
    lo, hi = 0, x1 - x0
    while lo < hi and lo < max_trim and (np.isnan(t[lo]) or t[lo] > lim):
        lo += 1
    while hi > lo and (x1 - x0 - hi) < max_trim and (np.isnan(t[hi]) or t[hi] > lim):
        hi -= 1
    return x0 + lo, x0 + hi


def _build_band(mask, x0, x1, centers, tops, bots, baseline, dot):
    xs = np.arange(x1, x0 - 1, -1)          # right to left
    ys = centers[x0:x1 + 1][::-1].copy()
    ts = tops[x0:x1 + 1][::-1].copy()
    bs = bots[x0:x1 + 1][::-1].copy()
    # interpolate across merged gap columns
    for arr in (ys, ts, bs):
        bad = np.isnan(arr)
        if bad.any():
            good = np.nonzero(~bad)[0]
            arr[bad] = np.interp(np.nonzero(bad)[0], good, arr[good])
    path = np.column_stack([xs + 0.5, ys])
    upper = np.column_stack([xs + 0.5, ts])
    lower = np.column_stack([xs + 0.5, bs])
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    arcs = np.concatenate([[0.0], np.cumsum(seg)]) / dot
    thickness = ThicknessProfile(arcs, (bs - ts) / dot)
    return CursiveBand(path, upper, lower, thickness, float(arcs[-1]),
                       dot, float(baseline))


def locate_cursive_bands(subword: BinaryRaster, n_letters: int,
                         baseline_y: float | None = None,
                         dot_px: float | None = None) -> list[CursiveBand]:
    """The ``n_letters - 1`` cursive bands of a subword, right to left.

    A band column holds a single ink run about one dot thick sitting
    near the baseline; runs of such columns, bridged across sub-dot gaps
    (fractures), form band candidates.  Raises BandCountMismatch when
    the expected count cannot be met (e.g. stacked ligature contexts).
    """
    if n_letters < 1:
        raise ValueError(f"n_letters must be >= 1, got {n_letters}")
    expected = n_letters - 1
    if expected == 0:
        return []
    dot = dot_px or subword.dot_px or estimate_dot_unit(subword)
    baseline = float(baseline_y) if baseline_y is not None \
        else float(estimate_baseline(subword)) + 0.5
    mask = subword.mask
    flags, centers, tops, bots = _candidate_columns(mask, baseline, dot)
    groups = _group_intervals(flags, max_gap=1.0 * dot)
    groups = [_trim_letter_blend(x0, x1, tops, bots, dot) for x0, x1 in groups]
    groups = [g for g in groups if g[1] - g[0] + 1 >= 0.8 * dot]
    if len(groups) < expected:
        raise BandCountMismatch(
            f"found {len(groups)} band candidates, expected {expected}")
    groups.sort(key=lambda g: g[0] - g[1])      # widest first
    groups = groups[:expected]
    groups.sort(key=lambda g: -g[1])            # right to left
    return [_build_band(mask, x0, x1, centers, tops, bots, baseline, dot)
            for x0, x1 in groups]


# ---------------------------------------------------------------------------
# cleaning, decomposition, cut selection

def mask_anomalies(band: CursiveBand, report: QualityReport,
                   max_dots: float | None = None) -> CursiveBand:
    """Neutralize quality anomalies before geometric analysis.

    Thickness over detected fractures is bridged by interpolation from
    the flanks; rule-level anomalies become annotations.
    """
    arcs = band.thickness.arc_positions
    values = band.thickness.thickness.copy()
    for fr in report.fractures:
        a0 = fr.arc_position - fr.gap_length / 2 - 0.1
        a1 = fr.arc_position + fr.gap_length / 2 + 0.1
        inside = (arcs >= a0) & (arcs <= a1)
        if inside.all() or not inside.any():
            continue
        good = np.nonzero(~inside)[0]
        values[inside] = np.interp(np.nonzero(inside)[0], good, values[good])
    notes = list(band.annotations)
    if report.fractures:
        notes.append("fractures_masked")
    if not report.regular:
        notes.append("irregular")
    if max_dots is not None and band.length_dots > max_dots + 0.5:
        notes.append("false_elongation")
    if report.portion_distance_violations:
        notes.append("false_approach")
    return band.with_updates(
        thickness=ThicknessProfile(arcs, values, band.thickness.method),
        anomalies=list(report.fractures),
        annotations=tuple(notes),
        cleaned=True,
    )


def decompose_band(band: CursiveBand,
                   kappa_threshold: float = 0.15) -> BandDecomposition:
    """Split the band at curvature landmarks.

    Landmarks are local maxima of |kappa| above the threshold (1/dots)
    on the smoothed centerline, at least half a dot apart and clear of
    the band ends.  A featureless band yields one segment.
    """
    pts = smooth_polyline(band.path / band.dot_px, sigma=0.75)
    arcs, kappa = polyline_curvature(pts, window=1.0)
    mag = np.abs(kappa)
    L = float(arcs[-1])
    # band ends carry boundary artifacts (letter merge, clamped windows);
    # landmarks and the prominence scale come from the interior only
    interior = (arcs >= 0.4) & (arcs <= L - 0.4)
    step = arcs[1] - arcs[0] if len(arcs) > 1 else 1.0
    kwargs = {"height": kappa_threshold,
              "distance": max(1, int(round(0.5 / step)))}
    interior_max = float(mag[interior].max()) if interior.any() else 0.0
    if interior_max > kappa_threshold:
        kwargs["prominence"] = 0.3 * interior_max
    peaks, _ = signal.find_peaks(mag, **kwargs)
    # peak arcs live on the smoothed, resampled polyline; express them in
    # the band's own arc coordinate by snapping each landmark back to the
    # nearest raw centerline sample (smoothing shortens steep stretches,
    # so arc positions drift between the two parameterizations)
    cum = np.concatenate([[0.0], np.cumsum(
        np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    raw = band.path / band.dot_px
    raw_arcs = band.arc_positions()
    splits = []
    for i in peaks:
        if not interior[i]:
            continue
        q = np.column_stack([np.interp([arcs[i]], cum, pts[:, 0]),
                             np.interp([arcs[i]], cum, pts[:, 1])])[0]
        j = int(np.argmin(np.linalg.norm(raw - q, axis=1)))
        splits.append(float(raw_arcs[j]))
    splits.sort()
    bounds = [0.0] + splits + [band.length_dots]
    segments = tuple(zip(bounds[:-1], bounds[1:]))
    return BandDecomposition(tuple(splits), segments)


def _segment_variance(band: CursiveBand, a0: float, a1: float) -> float:
    arcs = band.thickness.arc_positions
    sel = (arcs >= a0) & (arcs <= a1)
    if np.count_nonzero(sel) < 2:
        return 0.0
    return float(np.var(band.thickness.thickness[sel]))


def select_cut_points(band: CursiveBand,
                      decomposition: BandDecomposition | None = None) -> CutPoints:
    """Choose the second letter's input and the first letter's output.

    The input is the earliest landmark in the right-end half whose
    following sub-segment (the stroke the second letter begins there)
    has minimal thickness variance; the output is the latest landmark
    in the other half whose preceding sub-segment (the stroke the first
    letter ends there) is minimal.  A half without landmarks falls back
    to its quarter position.
    """
    L = band.length_dots
    if L < 1.0:
        raise BandTooShort(f"band of {L:.2f} dots cannot host two cut points")
    splits = list(decomposition.splits) if decomposition else []

    def choose(cands, pick_last, preceding):
        if not cands:
            return None
        scored = []
        for s in cands:
            if preceding:
                prev = max([t for t in splits if t < s], default=0.0)
                a0, a1 = prev, s
            else:
                nxt = min([t for t in splits if t > s], default=L)
                a0, a1 = s, nxt
            scored.append((round(_segment_variance(band, a0, a1), 2), s))
        best = min(v for v, _ in scored)
        pool = [s for v, s in scored if v == best]
        return max(pool) if pick_last else min(pool)

    input_arc = choose([s for s in splits if s < L / 2],
                       pick_last=False, preceding=False)
    output_arc = choose([s for s in splits if s >= L / 2],
                        pick_last=True, preceding=True)
    if input_arc is None:
        input_arc = 0.25 * L
    if output_arc is None:
        output_arc = 0.75 * L
    if output_arc - input_arc < 0.5:
        input_arc, output_arc = 0.25 * L, 0.75 * L

    # report coordinates on the denoised centerline: the raw path carries
    # pixel quantization and tremor jitter that should not end up in the
    # cut locations
    sm = smooth_polyline(band.path / band.dot_px, sigma=0.75) * band.dot_px

    def on_smooth(arc):
        p = band.point_at(arc)
        i = int(np.argmin(np.linalg.norm(sm - p, axis=1)))
        lo, hi = max(i - 1, 0), min(i + 1, len(sm) - 1)
        t = sm[hi] - sm[lo]
        n = np.linalg.norm(t)
        return sm[i], (t / n if n > 0 else np.array([-1.0, 0.0]))

    input_point, input_tangent = on_smooth(input_arc)
    output_point, output_tangent = on_smooth(output_arc)
    return CutPoints(
        input_second=float(input_arc),
        output_first=float(output_arc),
        input_point=input_point,
        output_point=output_point,
        input_tangent=input_tangent,
        output_tangent=output_tangent,
    )


# ---------------------------------------------------------------------------
# duplicate and cut

def _signed_along(mask_shape, point, tangent):
    h, w = mask_shape
    yy, xx = np.mgrid[0:h, 0:w]
    px = xx + 0.5 - point[0]
    py = yy + 0.5 - point[1]
    return px * tangent[0] + py * tangent[1]


def extract_and_merge(subword: BinaryRaster, band: CursiveBand,
                      cuts: CutPoints) -> GraphemePair:
    """Duplicate the subword and cut each copy at one of the two points.

    The copy cut at the output point keeps the first (right) grapheme;
    the copy cut at the input point keeps the second (left) one.  Both
    keep the common band portion between the cuts.
    """
    mask = subword.mask
    s_out = _signed_along(mask.shape, cuts.output_point, cuts.output_tangent)
    s_in = _signed_along(mask.shape, cuts.input_point, cuts.input_tangent)
    right = mask & (s_out <= 0)
    left = mask & (s_in >= 0)
    if not (right | left).sum() == mask.sum():
        raise NonSeparatingCut("cut lines leave pixels in neither grapheme")
    if not right.any() or not left.any():
        raise NonSeparatingCut("a cut line misses the ink entirely")
    common = right & left
    dot = band.dot_px
    return GraphemePair(
        right=BinaryRaster(right, dot),
        left=BinaryRaster(left, dot),
        common=BinaryRaster(common, dot),
        cuts=cuts,
        band=band,
    )


# ---------------------------------------------------------------------------
# word driver

@dataclass
class JointResult:
    index: int                  # joint position within the subword
    band: CursiveBand
    quality: QualityReport | None
    cuts: CutPoints
    pair: GraphemePair


@dataclass
class SubwordResult:
    letters: tuple              # letter codes, reading order
    raster: BinaryRaster
    baseline_y: float
    joints: list = field(default_factory=list)      # JointResult list
    graphemes: list = field(default_factory=list)   # one BinaryRaster per letter


@dataclass
class WordSegmentation:
    subwords: list
    marks: list                 # detached dot-mark components
    dot_px: float


def _subword_groups(letters, table: RuleTable):
    groups = [[letters[0]]]
    for prev, cur in zip(letters, letters[1:]):
        if table.joins_forward(prev):
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return groups


def _valley_band(mask, lo, hi, baseline, dot):
    """Pseudo-band around the thinnest junction column in [lo, hi]."""
    counts = mask[:, lo:hi + 1].sum(axis=0)
    nz = np.nonzero(counts > 0)[0]
    if len(nz) == 0:
        raise BandCountMismatch("no ink between radicals of a zero-length joint")
    v = lo + int(nz[np.argmin(counts[nz])])
    half = max(1, int(round(0.6 * dot)))
    x0, x1 = max(lo, v - half), min(hi, v + half)
    xs = np.arange(x1, x0 - 1, -1)
    ys, ts, bs = [], [], []
    for x in xs:
        starts, ends = _column_runs(mask[:, x])
        if len(starts) == 0:
            ys.append(np.nan); ts.append(np.nan); bs.append(np.nan)
            continue
        mids = (starts + ends) / 2.0
        i = int(np.argmin(np.abs(mids - baseline)))
        ys.append(mids[i]); ts.append(float(starts[i])); bs.append(float(ends[i]))
    ys, ts, bs = map(np.asarray, (ys, ts, bs))
    for arr in (ys, ts, bs):
        bad = np.isnan(arr)
        if bad.all():
            raise BandCountMismatch("empty junction window")
        if bad.any():
            good = np.nonzero(~bad)[0]
            arr[bad] = np.interp(np.nonzero(bad)[0], good, arr[good])
    path = np.column_stack([xs + 0.5, ys])
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    arcs = np.concatenate([[0.0], np.cumsum(seg)]) / dot
    thick = ThicknessProfile(arcs, (bs - ts) / dot)
    return CursiveBand(path, np.column_stack([xs + 0.5, ts]),
                       np.column_stack([xs + 0.5, bs]), thick,
                       float(arcs[-1]), dot, float(baseline),
                       annotations=("zero_length_area",), cleaned=True)


def _fallback_cuts(band: CursiveBand) -> CutPoints:
    L = band.length_dots
    i, o = 0.25 * L, 0.75 * L
    return CutPoints(i, o, band.point_at(i), band.point_at(o),
                     band.tangent_at(i), band.tangent_at(o))


def segment_word(img: BinaryRaster, word_ctx, table: RuleTable | None = None,
                 dot_px: float | None = None) -> WordSegmentation:
    """Segment a word image given its letter sequence (reading order).

    Components are matched to subwords right to left; detached dot-sized
    components are set aside as marks.  Per-joint failures are wrapped
    in JointError carrying the joint index.
    """
    table = table or default_table()
    letters = list(word_ctx)
    for code in letters:
        table.check_letter(code)
    dot = dot_px or img.dot_px or estimate_dot_unit(img)
    comps = connected_components(img.with_dot(dot))
    marks = [c for c in comps if c.role_hint is RoleHint.DOT_MARK]
    bodies = [c for c in comps if c.role_hint is not RoleHint.DOT_MARK]
    groups = _subword_groups(letters, table)
    if len(bodies) != len(groups):
        raise BandCountMismatch(
            f"{len(groups)} subwords in context but {len(bodies)} components")

    results = []
    for comp, group in zip(bodies, groups):
        sub = comp.raster(img.mask.shape, dot)
        baseline = float(estimate_baseline(sub)) + 0.5
        rules = [table.elongation_rule(a, b) for a, b in zip(group, group[1:])]
        normal = [j for j, r in enumerate(rules)
                  if r.kind is not ElongationKind.FORBIDDEN]
        res = SubwordResult(tuple(group), sub, baseline)
        if rules:
            bands = locate_cursive_bands(sub, len(normal) + 1, baseline, dot)
            it = iter(bands)
            cut_sets = []
            for j, rule in enumerate(rules):
                try:
                    if rule.kind is ElongationKind.FORBIDDEN:
                        prev_x = (cut_sets[-1].band.path[:, 0].min()
                                  if cut_sets else comp.bounding_box[2])
                        band = _valley_band(sub.mask, comp.bounding_box[0],
                                            int(prev_x), baseline, dot)
                        quality = None
                        cuts = _fallback_cuts(band)
                    else:
                        band = next(it)
                        quality = assess_band(band, sub)
                        band = mask_anomalies(band, quality,
                                              max_dots=rule.max_dots)
                        band = band.with_updates(
                            shape=classify_cursive_shape(band, table))
                        decomp = decompose_band(band)
                        cuts = select_cut_points(band, decomp)
                    pair = extract_and_merge(sub, band, cuts)
                except CursiveCutError as exc:
                    raise JointError(j, exc) from exc
                jr = JointResult(j, band, quality, cuts, pair)
                cut_sets.append(jr)
                res.joints.append(jr)
        # per-letter graphemes: between the cuts of adjacent joints
        for k in range(len(group)):
            m = sub.mask
            if k > 0:
                jr = res.joints[k - 1]
                s = _signed_along(m.shape, jr.cuts.input_point,
                                  jr.cuts.input_tangent)
                m = m & (s >= 0)
            if k < len(res.joints):
                jr = res.joints[k]
                s = _signed_along(m.shape, jr.cuts.output_point,
                                  jr.cuts.output_tangent)
                m = m & (s <= 0)
            res.graphemes.append(BinaryRaster(m, dot))
        results.append(res)
    return WordSegmentation(results, marks, dot)
