import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gdof import (ChannelMatrix, IndexRangeError, NetworkFormatError, classify, delta,
                  format_rational, parse_network, parse_rational)


def test_parse_rational_forms():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("0.25") == F(1, 4)
    assert parse_rational("-2/6") == F(-1, 3)
    assert parse_rational(" 7 ") == 7
    for bad in ("1e3", "abc", "1/0", "1/2/3", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(ValueError):
        parse_rational(0.5)


def test_format_rational_decimal_annotation():
    assert format_rational(F(5, 3)) == "5/3"
    assert format_rational(F(5, 3), decimal=True) == "5/3 (≈1.666667)"
    assert format_rational(F(-1, 3), decimal=True) == "-1/3 (≈-0.333333)"
    assert format_rational(F(2), decimal=True) == "2 (≈2.000000)"


def test_parse_network_roundtrip(fig1):
    text = fig1.dumps()
    m = parse_network(text)
    assert m == fig1
    assert m.name == "fig1"
    assert m[3, 1] == F(1, 10)
    assert parse_network(text.encode()) == fig1


def test_parse_network_accepts_decimals():
    m = parse_network('{"alpha": [["1", "0.5"], ["0.25", "1"]]}')
    assert m.alpha == ((1, F(1, 2)), (F(1, 4), 1))


@pytest.mark.parametrize("text, where", [
    ('{"alpha": [["1", "1/2"], ["1/2"]]}', "row 2"),
    ('{"alpha": [["1", "-1/2"], ["1/2", "1"]]}', "row 1, col 2"),
    ('{"alpha": [["1", 0.5], ["1/2", "1"]]}', "row 1, col 2"),
    ('{"alpha": [["1", "x"], ["1/2", "1"]]}', "row 1, col 2"),
    ('{"alpha": [["1"]], "K": 2}', '"K"'),
    ('{"beta": []}', "alpha"),
    ('[1, 2]', "alpha"),
    ('{"alpha": [', "malformed JSON"),
    ('{"alpha": []}', "non-empty"),
])
def test_parse_network_errors(text, where):
    with pytest.raises(NetworkFormatError) as e:
        parse_network(text)
    assert where in str(e.value)


def test_entry_position_attributes():
    with pytest.raises(NetworkFormatError) as e:
        parse_network('{"alpha": [["1", "1"], ["1", "q"]]}')
    assert (e.value.row, e.value.col) == (2, 2)


def test_indexing_is_one_based(fig1):
    assert fig1[1, 1] == 2
    assert fig1[2, 3] == F(1, 2)
    with pytest.raises(IndexRangeError):
        fig1[0, 1]
    with pytest.raises(IndexRangeError):
        fig1[1, 4]


def test_scaled_matrix(fig1):
    A, D = fig1.scaled
    assert D == 10
    assert A == ((20, 2, 10), (5, 10, 5), (1, 5, 15))


def test_delta_values(fig1):
    assert delta(fig1, 1, 2) == F(3, 2)
    assert delta(fig1, 2, 2) == 0
    assert delta(fig1, 3, 1) == F(3, 2) - 1


def test_classify_fig1(fig1):
    r = classify(fig1)
    assert (r.in_tin, r.in_ctin, r.in_sls, r.in_strict_sls) == (True, True, True, True)
    assert r.violations == ()
    # alpha_22 = alpha_23 + alpha_32 sits exactly on the boundary
    assert fig1[2, 2] == fig1[2, 3] + fig1[3, 2]


def test_classify_cyclic3(cyclic3):
    r = classify(cyclic3)
    assert not r.in_tin and r.in_ctin and r.in_sls and not r.in_strict_sls
    w = r.witness("TIN")
    assert w.indices == (1, 3, 2)
    assert (w.lhs, w.rhs) == (3, 4)
    assert r.render().startswith("TIN ✗ (witness i=1,l=3,m=2: α11 = 3 < α13 + α21 = 4) CTIN ✓ SLS ✓")


def test_classify_allones(allones):
    r = classify(allones)
    assert not r.in_ctin and r.in_sls and not r.in_strict_sls
    assert "CTIN ✗" in r.render() and "SLS ✓" in r.render()
    assert r.witness("CTIN").indices == (1, 2, 2)


def test_classify_single_user():
    r = classify(ChannelMatrix.from_rows([[F(1, 3)]]))
    assert r.in_tin and r.in_ctin and r.in_sls and r.in_strict_sls


def test_classify_not_sls():
    m = ChannelMatrix.from_rows([[1, 2], [0, 1]])
    r = classify(m)
    assert not r.in_sls
    assert r.witness("SLS").indices == (1, 2, 2)


def test_report_json_flags_quantifier(cyclic3):
    j = classify(cyclic3).to_json()
    assert j["quantifier"] == "i not in {j,k}; j = k admitted"
    assert j["violations"][0] == {"regime": "TIN", "indices": [1, 3, 2], "lhs": "3", "rhs": "4",
                                  "inequality": "α11 = 3 < α13 + α21 = 4"}


def test_two_digit_labels():
    m = ChannelMatrix.from_rows([[1 if i == j else (2 if (i, j) == (0, 10) else 0)
                                  for j in range(11)] for i in range(11)])
    assert "α1,11" in classify(m).render()


entries = st.integers(0, 8).map(lambda n: F(n, 4))


@st.composite
def matrices(draw, lo=1, hi=4):
    K = draw(st.integers(lo, hi))
    return ChannelMatrix.from_rows([[draw(entries) for _ in range(K)] for _ in range(K)])


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_regime_nesting_and_purity(m):
    r = classify(m)
    assert r == classify(m)
    assert not r.in_tin or r.in_ctin
    assert not r.in_ctin or r.in_sls
    assert not r.in_strict_sls or r.in_sls


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_json_roundtrip(m):
    assert parse_network(json.dumps(m.to_json())) == m
