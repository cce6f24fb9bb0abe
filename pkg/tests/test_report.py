import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvelab.report import ExperimentReport, emit_csv, emit_svg, format_value, read_csv


def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(3) == "3"
    assert format_value(float("nan")) == "nan"
    assert format_value(-math.inf) == "-inf"
    assert format_value(0.1) == "0.10000000000000001"


def test_empty_report_writes_header_only(tmp_path):
    path = emit_csv(ExperimentReport(), tmp_path / "r.csv")
    assert path.read_text() == "experiment,value,fit_slope,fit_residual,pass\n"


def test_columns_union_in_first_seen_order(tmp_path):
    rep = ExperimentReport(seed=7)
    rep.add("a", {"m": 2}, 1.0, passed=True)
    rep.add("b", {"ell": 3, "m": 3}, 0.5, -0.2, 0.01, False)
    comments, header, rows = read_csv(emit_csv(rep, tmp_path / "r.csv"))
    assert comments == ["# seed=7"]
    assert header == ["experiment", "m", "ell", "value", "fit_slope", "fit_residual", "pass"]
    assert rows == [["a", "2", "", "1", "", "", "true"], ["b", "3", "3", "0.5", "-0.20000000000000001", "0.01", "false"]]
    assert [r["experiment"] for r in rep.failures()] == ["b"] and not rep.all_passed


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=20))
def test_floats_round_trip_exactly(tmp_path_factory, values):
    rep = ExperimentReport()
    for i, v in enumerate(values):
        rep.add("x", {"i": i}, v)
    path = emit_csv(rep, tmp_path_factory.mktemp("rt") / "r.csv")
    _, _, rows = read_csv(path)
    assert [float(r[2]) for r in rows] == values


def test_svg_requires_two_points(tmp_path):
    rep = ExperimentReport()
    rep.add("x", {"r": 1.0}, 2.0)
    rep.add("x", {"r": 2.0}, -1.0)
    with pytest.warns(RuntimeWarning):
        assert emit_svg(rep, tmp_path / "p.svg", "r") is None
    assert not (tmp_path / "p.svg").exists()


def test_svg_slope_and_determinism(tmp_path):
    rep = ExperimentReport()
    for r in (1.0, 10.0, 100.0):
        rep.add("x", {"r": r}, r**-0.5)
    rep.add("other", {"r": 5.0}, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = emit_svg(rep, tmp_path / "a.svg", "r", title="t", experiment="x")
        b = emit_svg(rep, tmp_path / "b.svg", "r", title="t", experiment="x")
    text = a.read_text()
    assert text == b.read_text()
    assert "slope -0.500" in text and text.count("<circle") == 3
