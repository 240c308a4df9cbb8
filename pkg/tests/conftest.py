"""Shared oracle builders for the test suite."""

import numpy as np
import pytest

from cursivecut.band import ShapeClass
from cursivecut.raster import BinaryRaster
from cursivecut.synth import (JointSpec, LetterSpec, SynthSpec,
                              RECOMMENDED_LENGTH, synth_subword)

DOT = 8.0


def oracle_pair(shape=ShapeClass.LINEAR, length=None, tremor=0.0, seed=0,
                fractures=(), taper=(1.0, 1.0), archetypes=("tooth", "tooth"),
                dot=DOT):
    """Two-letter oracle subword with one joint; returns (img, truth)."""
    if length is None:
        length = RECOMMENDED_LENGTH[shape]
    spec = SynthSpec(
        tuple(LetterSpec(a) for a in archetypes),
        (JointSpec(shape, length, tremor, tuple(fractures), tuple(taper)),),
        pen_width_px=dot, seed=seed)
    return synth_subword(spec)


def oracle_word(seed, n_letters, sigma, dot=DOT):
    """Multi-letter oracle with mixed archetypes and cycling joint shapes."""
    classes = list(ShapeClass)
    arch = ["tooth", "ascender", "bowl"]
    letters = tuple(LetterSpec(arch[(seed + k) % 3]) for k in range(n_letters))
    joints = tuple(
        JointSpec(classes[(seed + j) % 5],
                  RECOMMENDED_LENGTH[classes[(seed + j) % 5]], sigma)
        for j in range(n_letters - 1))
    return synth_subword(SynthSpec(letters, joints, pen_width_px=dot, seed=seed))


@pytest.fixture
def straight_band_img():
    """A plain horizontal bar, 8 px thick: the simplest possible band."""
    mask = np.zeros((40, 120), dtype=bool)
    mask[16:24, :] = True
    return BinaryRaster(mask, DOT)
