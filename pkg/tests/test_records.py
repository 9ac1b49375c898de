import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from grouprand.records import MatrixRecord, from_jsonl, parse, serialize, table, to_jsonl

ints = st.integers(-(2**62), 2**62)
floats = st.floats(allow_nan=False, allow_infinity=False)
meta = st.dictionaries(st.text(min_size=1, max_size=8), st.one_of(ints, floats, st.text(max_size=10)), max_size=3)


@st.composite
def records(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 3))
    entry = draw(st.sampled_from([ints, floats]))
    mat = [[draw(entry) for _ in range(m)] for _ in range(n)]
    norm_sq = draw(st.one_of(st.none(), st.integers(0, 10**12)))
    return MatrixRecord(draw(st.text(min_size=1, max_size=12)), mat, draw(meta), norm_sq)


@given(st.lists(records(), max_size=4), st.sampled_from(["jsonl", "csv"]))
@settings(suppress_health_check=[HealthCheck.too_slow])
def test_roundtrip_exact(recs, fmt):
    back = parse(serialize(recs, fmt), fmt)
    assert back == recs
    for a, b in zip(recs, back):
        for ra, rb in zip(a.matrix, b.matrix):
            assert [type(v) for v in ra] == [type(v) for v in rb]


def test_numpy_inputs_become_plain():
    r = MatrixRecord("SL2Z", np.array([[1, 0], [0, 1]]), {"k": np.int64(3)}, 2)
    assert r.matrix == [[1, 0], [0, 1]] and type(r.matrix[0][0]) is int
    assert to_jsonl([r]) == '{"group":"SL2Z","matrix":[[1,0],[0,1]],"norm_sq":2,"meta":{"k":3},"schema":1}\n'


def test_key_order_stable():
    r = MatrixRecord("g", [[1]], {})
    assert list(r.to_dict()) == ["group", "matrix", "meta", "schema"]


def test_parse_errors():
    with pytest.raises(ValueError):
        from_jsonl('{"group": "x"}\n')
    with pytest.raises(ValueError):
        from_jsonl('{"group": "x", "matrix": [[1]], "schema": 99}\n')
    with pytest.raises(ValueError):
        parse("a,b\n1,2\n", "csv")
    with pytest.raises(ValueError):
        serialize([], "xml")
    with pytest.raises(ValueError):
        serialize([MatrixRecord("g", [[float("nan")]])], "jsonl")


def test_table():
    rows = [{"q": 1, "count": 4}, {"q": 5, "count": 8}]
    assert table(rows, "csv") == "q,count\n1,4\n5,8\n"
    assert table(rows, "jsonl") == '{"q":1,"count":4}\n{"q":5,"count":8}\n'
    assert table([], "csv") == ""
