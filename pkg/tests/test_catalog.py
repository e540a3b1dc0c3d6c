import json

import pytest

from thetarho.catalog import (
    MapDefinitionError,
    claimed_values,
    classify_case,
    example3,
    load_map,
    map_from_dict,
)
from thetarho.metric import FinitePoints, Interval, MaxOutsideMetric

MAXO = MaxOutsideMetric()


def test_case_classification():
    assert classify_case(MAXO, 0.5, 0) == 1
    assert classify_case(MAXO, 0, 2) == 1
    assert classify_case(MAXO, 4, 0) == 2
    assert classify_case(MAXO, 0, 10) == 3
    assert classify_case(MAXO, 4, 1.5) == 4
    assert classify_case(MAXO, 12, 0.1) == 5
    assert classify_case(MAXO, 8, 6) == 6
    assert classify_case(MAXO, 0.5, 1.5) is None
    assert classify_case(MAXO, 6, 6) is None


def test_claimed_values():
    assert claimed_values(1, 0.5, 0) == (1 / 9, None)
    assert claimed_values(2, 4, 0) == (10 / 9, 4.0)
    assert claimed_values(4, 4, 1) == (1.0, 4.0)
    for case, pair in ((3, (10, 0)), (5, (10, 1)), (6, (10, 8))):
        assert claimed_values(case, *pair) == (8, 10)


def test_bundled_example_map():
    ex = example3()
    assert ex.T.name == "evens-ladder"
    assert ex.T(0) == FinitePoints([8 / 9])
    assert ex.T(2) == Interval(0, 1)
    assert ex.domain["evens_ceiling"] == 100


def test_map_definitions(tmp_path):
    doc = {
        "name": "table",
        "metric": {"kind": "custom-table", "carrier": [0, 1], "matrix": [[0, 1], [1, 0]]},
        "map": {"kind": "finite-table", "table": {"0": [0], "1": [0, 1]}},
    }
    d = map_from_dict(doc)
    assert d.T(1.0) == FinitePoints([0, 1])
    single = map_from_dict({"metric": {"kind": "absolute-difference"}, "map": {"kind": "singleton-affine", "slope": "1/2"}})
    assert single.T(3.0) == FinitePoints([1.5])
    for bad in (
        {"metric": {"kind": "nope"}, "map": {"kind": "evens-ladder"}},
        {"metric": {"kind": "absolute-difference"}, "map": {"kind": "evens-ladder"}},
        {"metric": {"kind": "absolute-difference"}, "map": {"kind": "spiral"}},
        {"metric": {"kind": "absolute-difference"}},
        {"metric": {"kind": "absolute-difference"}, "map": {"kind": "singleton-affine", "slope": "x"}},
    ):
        with pytest.raises(MapDefinitionError):
            map_from_dict(bad)
    f = tmp_path / "m.json"
    f.write_text("[]")
    with pytest.raises(MapDefinitionError):
        load_map(f)
    f.write_text("{")
    with pytest.raises(MapDefinitionError):
        load_map(f)
    f.write_text(json.dumps(doc))
    assert load_map(f).name == "table"
