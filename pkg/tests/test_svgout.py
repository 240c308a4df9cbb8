import numpy as np

from cursivecut.contour import outer_contour, trace_boundary
from cursivecut.svgout import bezier_max_deviation, fit_cubics, svg_path, write_svg
from tests.conftest import oracle_pair


def test_fit_stays_within_quarter_dot():
    img, _ = oracle_pair(seed=1, tremor=0.2)
    c = outer_contour(img)
    max_err = 0.25 * 8.0
    beziers = fit_cubics(c, max_err)
    dev = bezier_max_deviation(beziers, c.points)
    assert dev <= max_err + 1e-6


def test_svg_path_syntax():
    img, _ = oracle_pair(seed=2)
    c = outer_contour(img)
    d = svg_path(c, 2.0)
    assert d.startswith("M ") and d.endswith("Z")
    assert " C " in d


def test_write_svg_file(tmp_path):
    img, _ = oracle_pair(seed=3)
    contours = trace_boundary(img)
    path = tmp_path / "g.svg"
    write_svg(path, contours, (img.width, img.height), 8.0)
    text = path.read_text("utf-8")
    assert text.startswith("<svg ")
    assert 'fill-rule="evenodd"' in text
