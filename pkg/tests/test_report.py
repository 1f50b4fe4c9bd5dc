import csv
import io
import json
import math

import numpy as np
import pytest

from secwire import ValidationError
from secwire.report import fmt_float, flatten, render_csv, render_csv_rows, render_json


def test_fmt_float_ten_significant_digits():
    assert fmt_float(1 / 3) == "0.3333333333"
    assert fmt_float(123456789012.0) == "1.23456789e+11"
    assert fmt_float(2.0) == "2"
    assert fmt_float(1e-12) == "1e-12"
    assert fmt_float(0.5) == "0.5"


def test_fmt_float_special_values():
    assert fmt_float(float("nan")) == "NaN"
    assert fmt_float(float("inf")) == "Infinity"
    assert fmt_float(float("-inf")) == "-Infinity"


def test_render_json_indented_exact():
    assert render_json({"b": 1, "a": [2, 3]}) == '{\n  "b": 1,\n  "a": [\n    2,\n    3\n  ]\n}'


def test_render_json_single_line():
    assert render_json({"b": 1, "a": [2, 3]}, indent=None) == '{"b": 1, "a": [2, 3]}'
    assert render_json({}, indent=None) == "{}"
    assert render_json([], indent=None) == "[]"


def test_render_json_scalars():
    assert render_json(None, indent=None) == "null"
    assert render_json(True, indent=None) == "true"
    assert render_json(False, indent=None) == "false"
    assert render_json("a\nb", indent=None) == json.dumps("a\nb")
    assert render_json(0.1, indent=None) == "0.1"


def test_render_json_numpy_coercion():
    doc = {"x": np.float64(0.25), "n": np.int64(3), "v": np.arange(3)}
    assert render_json(doc, indent=None) == '{"x": 0.25, "n": 3, "v": [0, 1, 2]}'


def test_render_json_special_floats_parse_back():
    text = render_json({"x": float("nan"), "y": float("inf")}, indent=None)
    assert text == '{"x": NaN, "y": Infinity}'
    parsed = json.loads(text)
    assert math.isnan(parsed["x"]) and parsed["y"] == float("inf")


def test_render_json_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        render_json({1: "a"})
    with pytest.raises(ValidationError):
        render_json({"a": {2, 3}})


def test_flatten_paths():
    doc = {"a": {"b": 1, "c": [2.5, {"d": None}]}, "e": True}
    assert flatten(doc) == [
        ("a.b", 1),
        ("a.c[0]", "2.5"),
        ("a.c[1].d", ""),
        ("e", "true"),
    ]
    assert flatten([1, 2]) == [("[0]", 1), ("[1]", 2)]


def test_render_csv_single_row():
    assert render_csv({"a": 1, "b": 0.5, "s": "hi,x"}) == 'a,b,s\n1,0.5,"hi,x"\n'


def test_render_csv_rows_union_header():
    text = render_csv_rows([{"a": 1}, {"b": 2.0, "a": 3}], common={"run": 1})
    assert text == "run,a,b\n1,1,\n1,3,2\n"


def _sample_reports():
    return [
        {
            "command": "capacity",
            "config": {"main": "m.ch", "grid-step": 0.02},
            "results": {"c_s": 0.3577507789, "certificate": {"gap": 1.25e-11, "iters": 40}},
        },
        {
            "command": "bound",
            "results": {"terms": [0.25, 1 / 3, 0.0721264155], "ell": 4, "ok": True, "note": None},
        },
        {
            "command": "wyner",
            "results": {
                "leakage_bits": 0.069314718,
                "bins": 4,
                "rows": [{"n": 4, "e": 0.05}, {"n": 6, "e": 0.041}],
            },
        },
    ]


def test_json_round_trip_preserves_flattened_values():
    for doc in _sample_reports():
        reparsed = json.loads(render_json(doc))
        assert flatten(reparsed) == flatten(doc)


def test_csv_agrees_with_flatten():
    for doc in _sample_reports():
        header, row = list(csv.reader(io.StringIO(render_csv(doc))))
        pairs = flatten(doc)
        assert header == [k for k, _ in pairs]
        assert row == [str(v) for _, v in pairs]


def test_renderings_are_deterministic():
    for doc in _sample_reports():
        assert render_json(doc) == render_json(doc)
        assert render_csv(doc) == render_csv(doc)
