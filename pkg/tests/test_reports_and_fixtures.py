import json
from fractions import Fraction

import numpy as np
import pytest

from tractorlab.fixture_builders import BUILDERS
from tractorlab.fixtures import FixtureExists, dump_json, fixture_dir, load_fixture, write_fixture
from tractorlab.reports import dumps, emit_report, make_report, normalize, rational_str


def test_rationals_and_nonfinite_floats():
    assert rational_str(Fraction(-6, 4)) == "-3/2"
    assert rational_str(3) == "3/1"
    assert normalize({"q": Fraction(1, 3), "a": np.array([1.5, np.inf]), "k": np.int64(4), "z": float("nan")}) == \
        {"q": "1/3", "a": [1.5, "inf"], "k": 4, "z": "nan"}
    with pytest.raises(TypeError):
        normalize(object())


def test_float_round_trip_and_key_order():
    x = 0.1 + 0.2
    text = dumps({"b": x, "a": [1, 2]})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["b"] == x


def test_empty_report_is_valid_json():
    doc = json.loads(dumps(make_report("cohomology", {}, [])))
    assert doc == {"command": "cohomology", "config": {}, "results": []}


def test_emit_report_writes_files(tmp_path):
    path = tmp_path / "r.json"
    text = emit_report(make_report("x", {"seed": 1}, [{"v": 2.5}], passed=True), path)
    assert path.read_text() == text
    assert json.loads(text)["passed"] is True


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_frozen_fixtures_equal_fresh_builds(name):
    frozen = (fixture_dir() / name).read_text(encoding="utf-8")
    assert frozen == dump_json(BUILDERS[name]())


def test_frozen_convention_constants():
    conv = load_fixture("conventions.json")
    assert conv["rho_equals_minus_schouten"]["multiple_of_schouten"] == "-1"
    assert conv["codifferential_trace_multiple"]["multiple_of_ricci"] == "1/2"
    assert conv["rho_shift_quadratic"]["ratio_to_reference"] == "-1"


def test_fixture_writes_are_guarded(fixture_override):
    write_fixture("demo.json", {"a": 1})
    with pytest.raises(FixtureExists):
        write_fixture("demo.json", {"a": 2})
    assert load_fixture("demo.json") == {"a": 1}
    write_fixture("demo.json", {"a": 2}, force=True)
    assert load_fixture("demo.json") == {"a": 2}
    # files absent from the override directory fall back to the packaged ones
    assert "metrics" in load_fixture("poly_metric.json")
