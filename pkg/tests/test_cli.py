import json

import numpy as np
import pytest

from cursivecut import serialize
from cursivecut.cli import run
from cursivecut.raster import load_raster, save_pbm
from tests.conftest import oracle_pair


SPEC = {
    "letters": [{"archetype": "tooth"}, {"archetype": "tooth"}],
    "joints": [{"shape": "concave", "length_dots": 6.0}],
    "pen_width_px": 8.0,
    "seed": 3,
}


def _write_oracle(tmp_path, name="word.pbm", **kw):
    img, gt = oracle_pair(**kw)
    save_pbm(img, tmp_path / name)
    return img, gt


def test_usage_error_exit_code(capsys):
    assert run(["segment"]) == 1
    assert "error" in capsys.readouterr().err


def test_processing_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.pbm"
    assert run(["segment", str(missing), "--letters", "بب"]) == 2
    assert "UnreadableFile" in capsys.readouterr().err


def test_segment_command_outputs(tmp_path):
    _write_oracle(tmp_path)
    out = tmp_path / "out"
    code = run(["segment", str(tmp_path / "word.pbm"), "--letters", "بب",
                "--dot", "8", "--out", str(out)])
    assert code == 0
    doc = json.loads((out / "word.joints.json").read_text("utf-8"))
    serialize.validate(doc, "joints")
    assert doc["subwords"][0]["joints"][0]["shape"] is not None
    assert (out / "word.s0.j0.right.pbm").exists()
    assert (out / "word.s0.j0.left.svg").exists()


def test_quality_and_classify_commands(tmp_path, capsys):
    _write_oracle(tmp_path, seed=2)
    out = tmp_path / "out"
    assert run(["quality", str(tmp_path / "word.pbm"), "--letters", "2",
                "--dot", "8", "--out", str(out)]) == 0
    doc = json.loads((out / "word.quality.json").read_text("utf-8"))
    serialize.validate(doc, "quality")
    assert run(["classify", str(tmp_path / "word.pbm"), "--letters", "2",
                "--dot", "8", "--out", str(out)]) == 0
    doc = json.loads((out / "word.classify.json").read_text("utf-8"))
    serialize.validate(doc, "classify")
    assert doc["bands"][0]["shape"] == "linear"


def test_synth_command_deterministic(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(SPEC), encoding="utf-8")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert run(["synth", str(spec_path), "--out", str(out1)]) == 0
    assert run(["synth", str(spec_path), "--out", str(out2)]) == 0
    assert (out1 / "spec.pbm").read_bytes() == (out2 / "spec.pbm").read_bytes()
    t1 = (out1 / "spec.truth.json").read_bytes()
    assert t1 == (out2 / "spec.truth.json").read_bytes()
    doc = json.loads(t1)
    serialize.validate(doc, "ground_truth")


def test_mean_shape_command(tmp_path):
    for seed in range(3):
        _write_oracle(tmp_path, name=f"w{seed}.pbm", seed=seed)
    out = tmp_path / "out"
    assert run(["mean-shape", str(tmp_path), "--landmarks", "32",
                "--out", str(out)]) == 0
    doc = json.loads((out / "mean_shape.json").read_text("utf-8"))
    serialize.validate(doc, "mean_shape")
    assert len(doc["landmarks"]) == 32
    assert (out / "mean_shape.svg").exists()


def test_variability_command(tmp_path, capsys):
    for seed in range(3):
        _write_oracle(tmp_path, name=f"w{seed}.pbm", seed=seed, tremor=0.2)
    out = tmp_path / "out"
    assert run(["variability", str(tmp_path), "--letters", "2",
                "--dot", "8", "--out", str(out)]) == 0
    doc = json.loads((out / "variability.json").read_text("utf-8"))
    serialize.validate(doc, "variability")
    assert "linear" in doc["classes"]


def test_diacritics_command(tmp_path):
    # a detached mark floating above a bar-shaped base
    mask = np.zeros((60, 120), dtype=bool)
    mask[30:38, 10:110] = True
    mask[10:14, 50:54] = True
    from cursivecut.raster import BinaryRaster
    save_pbm(BinaryRaster(mask), tmp_path / "m.pbm")
    base = tmp_path / "base.json"
    base.write_text(json.dumps({"baseline_y": 34.0, "input_point": [110.0, 34.0]}))
    out = tmp_path / "out"
    assert run(["diacritics", str(tmp_path / "m.pbm"), "--base", str(base),
                "--dot", "4", "--out", str(out)]) == 0
    doc = json.loads((out / "m.diacritics.json").read_text("utf-8"))
    serialize.validate(doc, "diacritics")
    assert len(doc["marks"]) == 1
    assert doc["marks"][0]["y"] > 0          # above the baseline


def test_config_file_and_env(tmp_path, monkeypatch):
    from cursivecut.config import RunConfig
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"entropy_bins": 32, "out_dir": str(tmp_path)}))
    loaded = RunConfig.load(str(cfg))
    assert loaded.entropy_bins == 32
    monkeypatch.setenv("CURSIVE_CUT_CONFIG", str(cfg))
    assert RunConfig.load().entropy_bins == 32
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    with pytest.raises(ValueError):
        RunConfig.from_file(bad)
    with pytest.raises(ValueError):
        RunConfig(entropy_bins=1)
