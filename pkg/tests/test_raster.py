import numpy as np
import pytest

from cursivecut.errors import (EmptyImage, NoForeground, UnreadableFile,
                               UnsupportedFormat)
from cursivecut.raster import (BinaryRaster, RoleHint, connected_components,
                               estimate_baseline, load_raster, save_pbm)


def test_raster_rejects_empty_and_bad_dot():
    with pytest.raises(EmptyImage):
        BinaryRaster(np.zeros((0, 5), dtype=bool))
    with pytest.raises(ValueError):
        BinaryRaster(np.zeros((3, 3), dtype=bool), dot_px=0.0)


def test_raster_mask_is_frozen():
    img = BinaryRaster(np.ones((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        img.mask[0, 0] = False


def test_pbm_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    mask = rng.random((13, 21)) > 0.5
    img = BinaryRaster(mask)
    path = tmp_path / "x.pbm"
    save_pbm(img, path)
    back = load_raster(path)
    assert np.array_equal(back.mask, mask)


def test_load_ascii_pbm_with_comment(tmp_path):
    path = tmp_path / "a.pbm"
    path.write_text("P1\n# comment\n3 2\n1 0 1\n0 1 0\n")
    img = load_raster(path)
    assert img.mask.tolist() == [[True, False, True], [False, True, False]]


def test_load_pgm_threshold(tmp_path):
    path = tmp_path / "g.pgm"
    path.write_text("P2\n2 2\n255\n0 100 200 255\n")
    img = load_raster(path, threshold=128)
    assert img.mask.tolist() == [[True, True], [False, False]]


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.pbm"
    path.write_bytes(b"GIF89a....")
    with pytest.raises(UnsupportedFormat):
        load_raster(path)
    path2 = tmp_path / "trunc.pbm"
    path2.write_text("P1\n5")
    with pytest.raises(UnreadableFile):
        load_raster(path2)
    with pytest.raises(UnreadableFile):
        load_raster(tmp_path / "missing.pbm")


def test_components_reading_order_and_dot_hint():
    mask = np.zeros((20, 60), dtype=bool)
    mask[5:15, 40:50] = True        # rightmost body
    mask[5:15, 10:20] = True        # left body
    mask[2:4, 30:32] = True         # tiny detached mark
    img = BinaryRaster(mask, dot_px=4.0)
    comps = connected_components(img)
    assert len(comps) == 3
    # right-to-left by bounding-box max x
    assert [c.bounding_box[2] for c in comps] == [49, 31, 19]
    hints = [c.role_hint for c in comps]
    assert hints.count(RoleHint.DOT_MARK) == 1
    assert comps[1].role_hint is RoleHint.DOT_MARK


def test_components_connectivity_4_vs_8():
    mask = np.zeros((4, 4), dtype=bool)
    mask[0, 0] = mask[1, 1] = True      # diagonal touch
    img = BinaryRaster(mask)
    assert len(connected_components(img, connectivity=8)) == 1
    assert len(connected_components(img, connectivity=4)) == 2
    with pytest.raises(ValueError):
        connected_components(img, connectivity=6)


def test_component_raster_restores_pixels():
    mask = np.zeros((6, 6), dtype=bool)
    mask[2:4, 2:5] = True
    img = BinaryRaster(mask)
    comp = connected_components(img)[0]
    assert np.array_equal(comp.raster(mask.shape).mask, mask)


def test_baseline_on_plain_bar(straight_band_img):
    y = estimate_baseline(straight_band_img)
    assert 16 <= y <= 23


def test_baseline_prefers_topmost_strong_row():
    # a baseline bar plus an equally heavy dip below it: the upper row wins
    mask = np.zeros((60, 100), dtype=bool)
    mask[20:28, :] = True
    mask[40:48, 10:90] = True
    y = estimate_baseline(BinaryRaster(mask))
    assert 18 <= y <= 29


def test_baseline_requires_ink():
    with pytest.raises(NoForeground):
        estimate_baseline(BinaryRaster(np.zeros((5, 5), dtype=bool)))
