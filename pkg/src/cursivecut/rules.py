"""Calligraphic rule tables and the cursive-band shape classifier.

The tables (letter families, non-joining letters, toothed letters,
interweaving pairs, elongation contexts) are data: embedded defaults in
``data/rules.json``, overridable with a user file of the same schema.
Entries listed under ``non_calligraphic_defaults`` fill gaps the source
tables leave open and are not canonical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .band import CursiveBand, ShapeClass
from .contour import smooth_polyline
from .errors import BandTooShort, NoJoin, UnknownLetter


class Position(Enum):
    ISOLATED = "isolated"
    INITIAL = "initial"
    MEDIAL = "medial"
    FINAL = "final"


class ElongationKind(Enum):
    FORBIDDEN = "forbidden"
    RECOMMENDED = "recommended"
    ALLOWED = "allowed"


@dataclass(frozen=True)
class ElongationRule:
    kind: ElongationKind
    default_dots: int
    max_dots: int

    def __post_init__(self):
        if self.kind is ElongationKind.FORBIDDEN:
            if self.default_dots != 0 or self.max_dots != 0:
                raise ValueError("forbidden elongation must be 0/0 dots")
        else:
            if not (0 <= self.default_dots <= 3 <= self.max_dots <= 13):
                raise ValueError(
                    f"rule out of bounds: default={self.default_dots} max={self.max_dots}")


class RuleTable:
    """Immutable lookup tables for one calligraphic style (Naskh)."""

    def __init__(self, data: dict):
        self.letters = tuple(data["letters"])
        self.non_joining = frozenset(data["non_joining"])
        self.families = {k: tuple(v) for k, v in data["families"].items()}
        self.toothed = frozenset(data["toothed"])
        self._interweaving = {k: tuple(v) for k, v in data["interweaving"].items()}
        e = data["elongation"]
        self.forbidden_pairs = [tuple(p) for p in e["forbidden_pairs"]]
        self.recommended_dots = int(e["recommended_dots"])
        self.default_allowed_dots = int(e["default_allowed_dots"])
        self.max_dots = int(e["max_dots"])
        self.classifier = dict(data.get("classifier", {}))
        self._member_to_family = {}
        for fam, members in self.families.items():
            for m in members:
                self._member_to_family[m] = fam

    @classmethod
    def default(cls) -> "RuleTable":
        text = resources.files("cursivecut").joinpath("data/rules.json").read_text("utf-8")
        return cls(json.loads(text))

    @classmethod
    def from_file(cls, path) -> "RuleTable":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    # -- lookups ----------------------------------------------------------

    def check_letter(self, code: str) -> None:
        if code not in self.letters:
            raise UnknownLetter(f"not one of the 28 base letters: {code!r}")

    def family(self, code: str) -> str:
        """Family name for a letter; singletons map to themselves."""
        self.check_letter(code)
        return self._member_to_family.get(code, code)

    def family_members(self, name: str) -> tuple:
        return self.families.get(name, (name,))

    def joins_forward(self, code: str) -> bool:
        self.check_letter(code)
        return code not in self.non_joining

    def _expand(self, token: str) -> tuple:
        if token.startswith("[") and token.endswith("]"):
            return self.family_members(token[1:-1])
        return (token,)

    def interweaving_partners(self, code: str) -> frozenset:
        """Letters that may interweave with ``code`` at word end."""
        self.check_letter(code)
        key = self.family(code)
        if key not in self._interweaving:
            key = code
        entry = self._interweaving.get(key, ())
        out = []
        for token in entry:
            out.extend(self._expand(token))
        return frozenset(out)

    def _in_pair_side(self, code: str, token: str) -> bool:
        return code in self._expand(token)

    def elongation_rule(self, left: str, right: str) -> ElongationRule:
        """Elongation context for the joint left -> right.

        ``left`` is the earlier letter in reading order (its output
        stroke starts the band); it must join forward.
        """
        self.check_letter(left)
        self.check_letter(right)
        if not self.joins_forward(left):
            raise NoJoin(f"{left!r} does not join to a following letter")
        for a, b in self.forbidden_pairs:
            if self._in_pair_side(left, a) and self._in_pair_side(right, b):
                return ElongationRule(ElongationKind.FORBIDDEN, 0, 0)
        if left in self.toothed and right in self.toothed:
            return ElongationRule(ElongationKind.RECOMMENDED,
                                  self.recommended_dots, self.max_dots)
        return ElongationRule(ElongationKind.ALLOWED,
                              self.default_allowed_dots, self.max_dots)


_DEFAULT_TABLE = None


def default_table() -> RuleTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = RuleTable.default()
    return _DEFAULT_TABLE


@dataclass(frozen=True)
class LetterId:
    code: str
    position: Position = Position.ISOLATED

    def __post_init__(self):
        table = default_table()
        table.check_letter(self.code)
        if self.code in table.non_joining and \
                self.position in (Position.INITIAL, Position.MEDIAL):
            raise ValueError(f"{self.code!r} admits only isolated/final positions")


def letter_family(letter: LetterId | str, table: RuleTable | None = None) -> str:
    code = letter.code if isinstance(letter, LetterId) else letter
    return (table or default_table()).family(code)


def elongation_rule(left, right, table: RuleTable | None = None) -> ElongationRule:
    lc = left.code if isinstance(left, LetterId) else left
    rc = right.code if isinstance(right, LetterId) else right
    return (table or default_table()).elongation_rule(lc, rc)


def interweaving_partners(letter, table: RuleTable | None = None) -> frozenset:
    code = letter.code if isinstance(letter, LetterId) else letter
    return (table or default_table()).interweaving_partners(code)


# ---------------------------------------------------------------------------
# five-way shape classifier

def classify_cursive_shape(band: CursiveBand,
                           table: RuleTable | None = None) -> ShapeClass:
    """Classify a band's centerline into one of the five cursive shapes.

    The path is smoothed at pen scale first, so hand tremor does not
    masquerade as curvature.  Decision order: laying (sustained run well
    below the baseline), linear (no chord deviation), inflected double
    curve (substantial deviation on both sides of the chord), then the
    remaining single-lobe bends: toward the baseline is concave, away
    from it is curved without inflection.
    """
    cfg = (table or default_table()).classifier
    lin_dev = float(cfg.get("linear_deviation_dots", 0.15))
    lay_depth = float(cfg.get("laying_depth_dots", 1.2))
    lay_frac = float(cfg.get("laying_fraction", 0.35))
    lobe_frac = float(cfg.get("minor_lobe_fraction", 0.3))

    if len(band.path) < 5:
        raise BandTooShort(f"band path has {len(band.path)} samples")
    pts = smooth_polyline(band.path / band.dot_px, sigma=0.75)
    baseline = band.baseline_y / band.dot_px

    below = pts[:, 1] - baseline > lay_depth
    if below.mean() > lay_frac:
        return ShapeClass.LAYING

    # perpendicular deviation from the chord, positive downward; the
    # chord is anchored on end-region means, not the end samples, so
    # residual jitter at the band boundaries cannot tilt it
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arcs_s = np.concatenate([[0.0], np.cumsum(seg)])
    head = pts[arcs_s <= 0.6]
    tail = pts[arcs_s >= arcs_s[-1] - 0.6]
    p0 = head.mean(axis=0) if len(head) else pts[0]
    p1 = tail.mean(axis=0) if len(tail) else pts[-1]
    chord = p1 - p0
    clen = np.linalg.norm(chord)
    if clen == 0:
        raise BandTooShort("zero-length chord")
    u = chord / clen
    rel = pts - p0
    along = rel @ u
    perp = rel - np.outer(along, u)
    dev = np.sign(perp[:, 1] + 1e-12) * np.linalg.norm(perp, axis=1)
    if np.abs(dev).max() < lin_dev:
        return ShapeClass.LINEAR

    # lobe analysis: an inflected double curve deviates substantially on
    # both sides of the chord, a single-lobe bend on one side only
    down = float(dev.max())          # toward the baseline
    up = float(-dev.min())           # away from it
    minor, major = min(down, up), max(down, up)
    if minor > lin_dev and minor > lobe_frac * major:
        return ShapeClass.CURVILINEAR_WITH_CURVATURE
    if down >= up:
        return ShapeClass.CONCAVE
    return ShapeClass.CURVILINEAR_NO_CURVATURE
