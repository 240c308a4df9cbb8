"""Segmenting cursive Arabic subword images into per-letter graphemes.

The pipeline localizes the cursive connection band between joined
letters, classifies its shape, picks curvature-based cut points, and
duplicates the shared band portion into both graphemes.  Around that
core: calligraphic rule tables, graphic-quality metrics (pen-width
estimation, fracture detection, regularity entropy), Procrustes shape
statistics, and a deterministic synthetic oracle.
"""

from .band import CursiveBand, Fracture, ShapeClass, ThicknessProfile
from .config import RunConfig
from .contour import (Contour, CurvatureProfile, curvature_profile,
                      direction_histogram, outer_contour, polyline_curvature,
                      refine_active_contour, resample_arclength, trace_boundary)
from .errors import (AmbiguousPenWidth, BandCountMismatch, BandTooShort,
                     CursiveCutError, DegenerateContour, DegenerateShape,
                     EmptyImage, JointError, MismatchedLandmarkCount,
                     MissingInputPoint, NoForeground, NoJoin, NonSeparatingCut,
                     NoShapes, PathOutsideInk, SpecInvalid, UnknownLetter,
                     UnreadableFile, UnsupportedFormat)
from .quality import (PortionCheck, QualityReport, assess_band,
                      detect_fractures, estimate_dot_unit,
                      portion_distance_check, regularity_entropy,
                      thickness_profile)
from .raster import (BinaryRaster, Component, RoleHint, connected_components,
                     estimate_baseline, load_raster, save_pbm)
from .rules import (ElongationKind, ElongationRule, LetterId, Position,
                    RuleTable, classify_cursive_shape, default_table,
                    elongation_rule, interweaving_partners, letter_family)
from .segment import (BandDecomposition, CutPoints, GraphemePair,
                      WordSegmentation, decompose_band, extract_and_merge,
                      locate_cursive_bands, mask_anomalies, segment_word,
                      select_cut_points)
from .shapes import (DiacriticFrame, GPAResult, LandmarkShape,
                     ProcrustesTransform, VariabilityReport, diacritic_coords,
                     diacritic_frame, procrustes_align, procrustes_distance,
                     procrustes_mean, variability_report)
from .synth import (GroundTruth, JointSpec, LetterSpec, SynthSpec, perturb,
                    spec_from_dict, synth_subword)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
