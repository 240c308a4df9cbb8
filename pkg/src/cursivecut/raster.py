"""Binary raster representation, netpbm I/O and connected components.

Foreground is ink (dark pixels).  Coordinates are image coordinates:
x grows rightward, y grows downward, so "below the baseline" means
larger y.  Every raster can carry ``dot_px``, the calligraphic dot unit
(pen width) in pixels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import EmptyImage, UnreadableFile, UnsupportedFormat


class RoleHint(Enum):
    SUBWORD = "subword"
    DOT_MARK = "dot_mark"
    DIACRITIC = "diacritic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class BinaryRaster:
    """Rectangular foreground mask with an optional dot unit."""

    mask: np.ndarray            # 2-D bool, shape (height, width)
    dot_px: float | None = None

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise EmptyImage(f"raster must be 2-D and non-empty, got shape {m.shape}")
        if self.dot_px is not None and not self.dot_px > 0:
            raise ValueError(f"dot_px must be positive, got {self.dot_px}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def ink_count(self) -> int:
        return int(self.mask.sum())

    def with_dot(self, dot_px: float) -> "BinaryRaster":
        return BinaryRaster(self.mask, dot_px)

    def __eq__(self, other):
        if not isinstance(other, BinaryRaster):
            return NotImplemented
        return (self.mask.shape == other.mask.shape
                and bool(np.array_equal(self.mask, other.mask))
                and self.dot_px == other.dot_px)


@dataclass(frozen=True)
class Component:
    """One connected blob of foreground pixels."""

    pixels: np.ndarray          # (n, 2) int array of (x, y)
    bounding_box: tuple         # (x0, y0, x1, y1), inclusive
    area: int
    role_hint: RoleHint = RoleHint.UNKNOWN

    def raster(self, shape: tuple[int, int], dot_px: float | None = None) -> BinaryRaster:
        """Render this component alone on a canvas of the given (h, w)."""
        m = np.zeros(shape, dtype=bool)
        m[self.pixels[:, 1], self.pixels[:, 0]] = True
        return BinaryRaster(m, dot_px)


# ---------------------------------------------------------------------------
# netpbm I/O (PBM P1/P4, PGM P2/P5)

_MAGIC = re.compile(rb"^P[1245]")


def _read_tokens(data: bytes, count: int, pos: int):
    """Read whitespace/comment-separated ASCII integer tokens."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise UnreadableFile("truncated netpbm header")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def load_raster(path, threshold: int = 128) -> BinaryRaster:
    """Load a PBM/PGM file as a binary raster.

    For PGM, foreground is every pixel strictly darker than ``threshold``.
    For PBM the threshold is ignored (bit 1 = ink).
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UnreadableFile(str(exc)) from exc
    if len(data) < 2 or not _MAGIC.match(data):
        raise UnsupportedFormat(f"not a supported PBM/PGM file: {path}")
    magic = data[:2]
    try:
        if magic in (b"P1", b"P4"):
            (w, h), pos = _read_tokens(data, 2, 2)
            if w == 0 or h == 0:
                raise EmptyImage(f"zero-dimension image: {path}")
            if magic == b"P1":
                bits = [c for c in data[pos:] if c in (0x30, 0x31)]
                if len(bits) < w * h:
                    raise UnreadableFile("truncated P1 payload")
                mask = (np.array(bits[: w * h], dtype=np.uint8) == 0x31)
                mask = mask.reshape(h, w)
            else:
                pos += 1  # single whitespace after header
                row_bytes = (w + 7) // 8
                raw = np.frombuffer(data, dtype=np.uint8,
                                    count=row_bytes * h, offset=pos)
                bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)
                mask = bits[:, :w].astype(bool)
        else:  # P2 / P5
            (w, h, maxval), pos = _read_tokens(data, 3, 2)
            if w == 0 or h == 0:
                raise EmptyImage(f"zero-dimension image: {path}")
            if maxval > 255:
                raise UnsupportedFormat("16-bit PGM not supported")
            if magic == b"P2":
                vals, _ = _read_tokens(data, w * h, pos)
                arr = np.array(vals, dtype=np.uint8).reshape(h, w)
            else:
                pos += 1
                arr = np.frombuffer(data, dtype=np.uint8,
                                    count=w * h, offset=pos).reshape(h, w)
            mask = arr < threshold
    except ValueError as exc:
        raise UnreadableFile(f"bad netpbm payload: {exc}") from exc
    return BinaryRaster(mask)


def save_pbm(img: BinaryRaster, path) -> None:
    """Write the raster as binary PBM (P4)."""
    h, w = img.mask.shape
    packed = np.packbits(img.mask.astype(np.uint8), axis=1)
    with open(path, "wb") as fh:
        fh.write(b"P4\n%d %d\n" % (w, h))
        fh.write(packed.tobytes())


# ---------------------------------------------------------------------------
# connected components

_STRUCT = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}


def connected_components(img: BinaryRaster, connectivity: int = 8) -> list[Component]:
    """Decompose foreground into components, sorted right-to-left.

    Ordering follows Arabic reading order: decreasing bounding-box max-x,
    ties broken by min-y then min-x.  When the raster carries a dot unit,
    components smaller than 4 dot^2 are hinted as detached dot marks.
    """
    if connectivity not in _STRUCT:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, n = ndimage.label(img.mask, structure=_STRUCT[connectivity])
    comps = []
    for sl, idx in zip(ndimage.find_objects(labels), range(1, n + 1)):
        ys, xs = np.nonzero(labels[sl] == idx)
        xs = xs + sl[1].start
        ys = ys + sl[0].start
        order = np.lexsort((xs, ys))
        pixels = np.column_stack([xs[order], ys[order]])
        bbox = (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
        area = len(xs)
        hint = RoleHint.UNKNOWN
        if img.dot_px is not None and area < 4 * img.dot_px ** 2:
            hint = RoleHint.DOT_MARK
        comps.append(Component(pixels, bbox, area, hint))
    comps.sort(key=lambda c: (-c.bounding_box[2], c.bounding_box[1], c.bounding_box[0]))
    return comps


def estimate_baseline(img: BinaryRaster) -> int:
    """Baseline estimate from the horizontal ink projection.

    The baseline is the upper writing line: bowls, descenders and laying
    dips all fall below it, so among rows whose projection comes close to
    the maximum we return the topmost one rather than the absolute peak
    (a long sustained dip can out-project the baseline itself).
    """
    from .errors import NoForeground
    if img.ink_count == 0:
        raise NoForeground("cannot estimate baseline of an empty image")
    proj = img.mask.sum(axis=1).astype(float)
    w = max(3, img.mask.shape[0] // 16) | 1
    kern = np.ones(w) / w
    sm = np.convolve(proj, kern, mode="same")
    # local maxima of the smoothed projection; the topmost strong one is
    # the baseline stroke, anything below it a bowl or dip
    peaks = [i for i in range(1, len(sm) - 1)
             if sm[i] >= sm[i - 1] and sm[i] > sm[i + 1]
             and sm[i] >= 0.6 * sm.max()]
    if not peaks:
        peaks = [int(np.argmax(sm))]
    return int(peaks[0])
