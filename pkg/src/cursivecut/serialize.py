"""Canonical JSON serialization of reports, all versioned cursive-cut/v1.

Canonical form: sorted keys, two-space indent, UTF-8, trailing newline —
so identical data always round-trips to identical bytes.
"""

from __future__ import annotations

import json
from importlib import resources

SCHEMA_VERSION = "cursive-cut/v1"


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(obj))


def load_schema(name: str) -> dict:
    text = resources.files("cursivecut").joinpath(f"schemas/{name}.schema.json") \
        .read_text("utf-8")
    return json.loads(text)


def validate(obj, schema_name: str) -> None:
    """Validate a report against a shipped schema (needs jsonschema)."""
    import jsonschema
    jsonschema.validate(obj, load_schema(schema_name))


# ---------------------------------------------------------------------------
# report builders

def _point(p):
    return [round(float(p[0]), 3), round(float(p[1]), 3)]


def joint_record(jr) -> dict:
    band = jr.band
    rec = {
        "index": jr.index,
        "shape": band.shape.value if band.shape else None,
        "length_dots": round(band.length_dots, 3),
        "annotations": sorted(band.annotations),
        "cuts": {
            "input_second_dots": round(jr.cuts.input_second, 3),
            "output_first_dots": round(jr.cuts.output_first, 3),
            "input_point": _point(jr.cuts.input_point),
            "output_point": _point(jr.cuts.output_point),
        },
        "fractures": [{"arc_dots": round(f.arc_position, 3),
                       "gap_dots": round(f.gap_length, 3)}
                      for f in band.anomalies],
    }
    if jr.quality is not None:
        rec["quality"] = quality_record(jr.quality)
    return rec


def quality_record(report) -> dict:
    return {
        "fractures": [{"arc_dots": round(f.arc_position, 3),
                       "gap_dots": round(f.gap_length, 3)}
                      for f in report.fractures],
        "regularity_entropy_bits": round(report.regularity_entropy, 6),
        "regular": report.regular,
        "portion_distance_violations": [
            {"expected_dots": v.expected, "measured_dots": round(v.measured, 3)}
            for v in report.portion_distance_violations],
    }


def segmentation_report(seg) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "joints",
        "dot_px": seg.dot_px,
        "subwords": [
            {
                "letters": list(sw.letters),
                "baseline_y": sw.baseline_y,
                "joints": [joint_record(jr) for jr in sw.joints],
            }
            for sw in seg.subwords
        ],
        "marks": [{"bounding_box": list(m.bounding_box), "area": m.area}
                  for m in seg.marks],
    }


def quality_report_doc(reports, dot_px) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "quality",
        "dot_px": dot_px,
        "bands": [quality_record(r) for r in reports],
    }


def classify_doc(shapes) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "classify",
        "bands": [{"index": i, "shape": s.value} for i, s in enumerate(shapes)],
    }


def variability_doc(report) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "variability_report",
        "classes": {
            cls: {
                "size_variability": cv.size_variability,
                "thickness_variability": cv.thickness_variability,
                "n_instances": cv.n_instances,
            }
            for cls, cv in report.per_class.items()
        },
    }


def mean_shape_doc(result, n_shapes: int) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "mean_shape",
        "converged": result.converged,
        "iterations": result.iterations,
        "n_shapes": n_shapes,
        "landmarks": [_point(p) for p in result.mean.points],
    }


def diacritics_doc(frame, marks) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "type": "diacritics",
        "frame": {
            "origin": _point(frame.origin),
            "unit": [round(frame.unit[0], 3), round(frame.unit[1], 3)],
            "baseline_y": frame.baseline_y,
        },
        "marks": [{"x": round(x, 4), "y": round(y, 4), "extent": round(e, 4)}
                  for x, y, e in marks],
    }


def ground_truth_doc(gt) -> dict:
    joints = []
    for jt in gt.joints:
        joints.append({
            "index": jt.index,
            "shape": jt.shape.value if jt.shape else None,
            "stacked": jt.stacked,
            "zero_length": jt.zero_length,
            "visible_x_px": [round(jt.visible_x[0], 3), round(jt.visible_x[1], 3)],
            "length_dots": round(jt.length_dots, 4),
            "input_point": _point(jt.input_point) if jt.input_point is not None else None,
            "output_point": _point(jt.output_point) if jt.output_point is not None else None,
            "input_arc_dots": round(jt.input_arc_dots, 4)
            if jt.input_arc_dots is not None else None,
            "output_arc_dots": round(jt.output_arc_dots, 4)
            if jt.output_arc_dots is not None else None,
            "fractures": [{"arc_dots": f.arc_position, "gap_dots": f.gap_length}
                          for f in jt.fractures],
            "tremor": jt.tremor,
        })
    letters = []
    for lt in gt.letters:
        letters.append({
            "index": lt.index,
            "archetype": lt.archetype,
            "attach_in": _point(lt.attach_in),
            "attach_out": _point(lt.attach_out) if lt.attach_out is not None else None,
            "ink_bbox": list(lt.ink_bbox),
            "frame_origin": _point(lt.frame_origin),
            "frame_unit": [round(lt.frame_unit[0], 3), round(lt.frame_unit[1], 3)],
            "mark": {"x": round(lt.mark_truth[0], 4), "y": round(lt.mark_truth[1], 4),
                     "extent": round(lt.mark_truth[2], 4)}
            if lt.mark_truth is not None else None,
        })
    return {
        "schema": SCHEMA_VERSION,
        "type": "ground_truth",
        "ink_count": gt.ink_count,
        "dot_px": gt.dot_px,
        "baseline_y": gt.baseline_y,
        "joints": joints,
        "letters": letters,
    }
