import json

import pytest

from cursivecut.band import ShapeClass
from cursivecut.errors import NoJoin, UnknownLetter
from cursivecut.rules import (ElongationKind, ElongationRule, LetterId,
                              Position, RuleTable, classify_cursive_shape,
                              default_table, elongation_rule,
                              interweaving_partners, letter_family)
from cursivecut.segment import locate_cursive_bands
from tests.conftest import oracle_pair


def test_families_and_singletons():
    assert letter_family("ت") == "ب"
    assert letter_family("خ") == "ح"
    assert letter_family("م") == "م"
    with pytest.raises(UnknownLetter):
        letter_family("x")


def test_non_joining_letters():
    table = default_table()
    for code in ("ا", "ر", "ز", "د", "ذ", "و"):
        assert not table.joins_forward(code)
    assert table.joins_forward("ب")


def test_letterid_position_constraint():
    LetterId("ا", Position.FINAL)
    with pytest.raises(ValueError):
        LetterId("ا", Position.MEDIAL)


def test_elongation_forbidden_beh_hah():
    for left in ("ب", "ت", "ث"):
        for right in ("ح", "ج", "خ"):
            rule = elongation_rule(left, right)
            assert rule.kind is ElongationKind.FORBIDDEN
            assert rule.default_dots == 0 and rule.max_dots == 0


def test_elongation_toothed_default_three():
    rule = elongation_rule("ب", "ن")
    assert rule.kind is ElongationKind.RECOMMENDED
    assert rule.default_dots == 3


def test_elongation_max_bounded_everywhere():
    table = default_table()
    for left in table.letters:
        if not table.joins_forward(left):
            continue
        for right in table.letters:
            assert elongation_rule(left, right).max_dots <= 13


def test_elongation_requires_joining_left():
    with pytest.raises(NoJoin):
        elongation_rule("ر", "ب")


def test_elongation_rule_validation():
    with pytest.raises(ValueError):
        ElongationRule(ElongationKind.FORBIDDEN, 1, 0)
    with pytest.raises(ValueError):
        ElongationRule(ElongationKind.ALLOWED, 2, 14)


def test_interweaving_golden():
    beh = {"ا", "ب", "ت", "ث", "ن", "س", "ل"}
    assert interweaving_partners("ب") == frozenset(beh)
    assert interweaving_partners("ث") == frozenset(beh)   # family lookup
    assert interweaving_partners("د") == frozenset({"ا"})
    assert interweaving_partners("ر") == frozenset({"ا", "و"})
    assert interweaving_partners("ن") == frozenset({"م", "ا", "ل", "ح", "ج", "خ"})
    assert interweaving_partners("ل") == frozenset({"ا", "ح", "ج", "خ", "س", "ش"})
    assert interweaving_partners("ي") == frozenset({"ا", "س", "ش"})
    assert interweaving_partners("م") == frozenset()


def test_rule_table_from_file_override(tmp_path):
    table = default_table()
    import importlib.resources as resources
    data = json.loads(resources.files("cursivecut")
                      .joinpath("data/rules.json").read_text("utf-8"))
    data["elongation"]["default_allowed_dots"] = 1
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    custom = RuleTable.from_file(path)
    assert custom.default_allowed_dots == 1
    assert table.default_allowed_dots == 2


def test_default_rules_match_schema():
    from cursivecut import serialize
    import importlib.resources as resources
    data = json.loads(resources.files("cursivecut")
                      .joinpath("data/rules.json").read_text("utf-8"))
    serialize.validate(data, "rules")


@pytest.mark.parametrize("shape", list(ShapeClass))
def test_classifier_clean_band(shape):
    img, _ = oracle_pair(shape, seed=7)
    band = locate_cursive_bands(img, 2)[0]
    assert classify_cursive_shape(band) is shape


def test_classifier_tolerates_tremor():
    errs = 0
    for shape in ShapeClass:
        for seed in range(5):
            img, _ = oracle_pair(shape, tremor=0.2, seed=seed)
            band = locate_cursive_bands(img, 2)[0]
            errs += classify_cursive_shape(band) is not shape
    assert errs <= 2
