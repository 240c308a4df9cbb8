"""Command-line front end: segmentation, quality, classification,
synthesis, shape statistics and diacritic frames.

Exit codes: 0 success, 1 usage error, 2 processing error (the error
class name goes to stderr).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import serialize
from .config import RunConfig
from .contour import outer_contour, resample_arclength, trace_boundary
from .errors import CursiveCutError
from .quality import assess_band, estimate_dot_unit
from .raster import (BinaryRaster, RoleHint, connected_components,
                     estimate_baseline, load_raster, save_pbm)
from .rules import RuleTable, classify_cursive_shape, default_table
from .segment import locate_cursive_bands, segment_word
from .shapes import (diacritic_coords, diacritic_frame, procrustes_mean,
                     variability_report)
from .svgout import write_svg
from .synth import perturb, spec_from_dict, synth_subword


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="cursive-cut",
                description="Segment cursive subword images into letter graphemes.")
    p.add_argument("--config", help="RunConfig JSON (or set CURSIVE_CUT_CONFIG)")
    sub = p.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="cut a word image into graphemes")
    seg.add_argument("image")
    seg.add_argument("--letters", required=True,
                     help="letter codes in reading order")
    seg.add_argument("--out", default=None, help="output directory")
    seg.add_argument("--rules", default=None, help="rule-table JSON override")
    seg.add_argument("--dot", type=float, default=None, help="pen width in px")

    qua = sub.add_parser("quality", help="band quality report")
    qua.add_argument("image")
    qua.add_argument("--letters", required=True,
                     help="letter count or codes of the subword")
    qua.add_argument("--out", default=None)
    qua.add_argument("--dot", type=float, default=None)

    cls = sub.add_parser("classify", help="shape class of each band")
    cls.add_argument("image")
    cls.add_argument("--letters", required=True)
    cls.add_argument("--out", default=None)
    cls.add_argument("--dot", type=float, default=None)

    syn = sub.add_parser("synth", help="render an oracle subword")
    syn.add_argument("spec", help="SynthSpec JSON file")
    syn.add_argument("--seed", type=int, default=None)
    syn.add_argument("--tremor", type=float, default=None,
                     help="post-hoc raster tremor in dots")
    syn.add_argument("--out", default=None)

    mean = sub.add_parser("mean-shape", help="Procrustes mean of outlines")
    mean.add_argument("dir", help="directory of PBM/PGM images")
    mean.add_argument("--landmarks", type=int, default=None)
    mean.add_argument("--out", default=None)

    var = sub.add_parser("variability", help="per-class band variability")
    var.add_argument("dir")
    var.add_argument("--letters", required=True,
                     help="letter count of each subword image")
    var.add_argument("--out", default=None)
    var.add_argument("--dot", type=float, default=None)

    dia = sub.add_parser("diacritics", help="mark coordinates in letter frames")
    dia.add_argument("image")
    dia.add_argument("--base", required=True,
                     help="grapheme JSON with input_point and baseline_y")
    dia.add_argument("--out", default=None)
    dia.add_argument("--dot", type=float, default=None)
    return p


def _letters_count(value: str) -> int:
    return int(value) if value.isdigit() else len(value)


def _load(image, dot):
    img = load_raster(image)
    return img.with_dot(dot if dot is not None else estimate_dot_unit(img))


def _bands_of(img, n_letters, cfg):
    baseline = float(estimate_baseline(img)) + 0.5
    return locate_cursive_bands(img, n_letters, baseline)


def _out_dir(args, cfg) -> Path:
    d = Path(args.out if args.out else cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _cmd_segment(args, cfg):
    img = _load(args.image, args.dot)
    table = RuleTable.from_file(args.rules) if args.rules else (
        RuleTable.from_file(cfg.rules_path) if cfg.rules_path else default_table())
    seg = segment_word(img, args.letters, table)
    out = _out_dir(args, cfg)
    stem = Path(args.image).stem
    serialize.write_json(out / f"{stem}.joints.json",
                         serialize.segmentation_report(seg))
    for si, sw in enumerate(seg.subwords):
        for ji, jr in enumerate(sw.joints):
            for side in ("right", "left"):
                g = getattr(jr.pair, side)
                name = f"{stem}.s{si}.j{ji}.{side}"
                save_pbm(g, out / f"{name}.pbm")
                contours = trace_boundary(g)
                write_svg(out / f"{name}.svg", contours,
                          (g.width, g.height), seg.dot_px)
    return 0


def _cmd_quality(args, cfg):
    img = _load(args.image, args.dot)
    bands = _bands_of(img, _letters_count(args.letters), cfg)
    reports = [assess_band(b, img, bins=cfg.entropy_bins,
                           entropy_threshold=cfg.entropy_threshold)
               for b in bands]
    out = _out_dir(args, cfg)
    doc = serialize.quality_report_doc(reports, img.dot_px)
    serialize.write_json(out / f"{Path(args.image).stem}.quality.json", doc)
    json.dump(doc, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_classify(args, cfg):
    img = _load(args.image, args.dot)
    bands = _bands_of(img, _letters_count(args.letters), cfg)
    shapes = [classify_cursive_shape(b) for b in bands]
    out = _out_dir(args, cfg)
    doc = serialize.classify_doc(shapes)
    serialize.write_json(out / f"{Path(args.image).stem}.classify.json", doc)
    json.dump(doc, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_synth(args, cfg):
    with open(args.spec, encoding="utf-8") as fh:
        spec = spec_from_dict(json.load(fh))
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    img, gt = synth_subword(spec)
    if args.tremor:
        img, gt = perturb(img, gt, tremor=args.tremor, seed=spec.seed)
    out = _out_dir(args, cfg)
    stem = Path(args.spec).stem
    save_pbm(img, out / f"{stem}.pbm")
    serialize.write_json(out / f"{stem}.truth.json",
                         serialize.ground_truth_doc(gt))
    return 0


def _cmd_mean_shape(args, cfg):
    k = args.landmarks if args.landmarks else cfg.landmarks
    shapes = []
    paths = sorted(Path(args.dir).glob("*.p[bg]m"))
    for path in paths:
        img = load_raster(path)
        shapes.append(resample_arclength(outer_contour(img), k))
    result = procrustes_mean(shapes)
    out = _out_dir(args, cfg)
    serialize.write_json(out / "mean_shape.json",
                         serialize.mean_shape_doc(result, len(shapes)))
    from .contour import Contour
    pts = result.mean.points * 100 + 150     # unit shape on a viewable canvas
    write_svg(out / "mean_shape.svg", [Contour(pts)], (300, 300), 1.0,
              max_err=0.25)
    return 0


def _cmd_variability(args, cfg):
    n = _letters_count(args.letters)
    bands = []
    for path in sorted(Path(args.dir).glob("*.p[bg]m")):
        img = _load(path, args.dot)
        for band in _bands_of(img, n, cfg):
            bands.append(band.with_updates(shape=classify_cursive_shape(band)))
    report = variability_report(bands)
    out = _out_dir(args, cfg)
    doc = serialize.variability_doc(report)
    serialize.write_json(out / "variability.json", doc)
    json.dump(doc, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_diacritics(args, cfg):
    img = _load(args.image, args.dot)
    with open(args.base, encoding="utf-8") as fh:
        base = json.load(fh)
    comps = connected_components(img)
    bodies = [c for c in comps if c.role_hint is not RoleHint.DOT_MARK]
    marks = [c for c in comps if c.role_hint is RoleHint.DOT_MARK]
    if not bodies:
        from .errors import NoForeground
        raise NoForeground("no base grapheme component")
    base_pts = bodies[0].pixels.astype(float)
    frame = diacritic_frame(base_pts, base["baseline_y"],
                            input_point=base.get("input_point"))
    coords = [diacritic_coords(frame, m.pixels) for m in marks]
    out = _out_dir(args, cfg)
    doc = serialize.diacritics_doc(frame, coords)
    serialize.write_json(out / f"{Path(args.image).stem}.diacritics.json", doc)
    json.dump(doc, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


_COMMANDS = {
    "segment": _cmd_segment,
    "quality": _cmd_quality,
    "classify": _cmd_classify,
    "synth": _cmd_synth,
    "mean-shape": _cmd_mean_shape,
    "variability": _cmd_variability,
    "diacritics": _cmd_diacritics,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = RunConfig.load(args.config)
        return _COMMANDS[args.command](args, cfg)
    except CursiveCutError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
