from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gdof import InfeasibleError
from gdof.simplex import UnboundedError, maximize


def test_textbook_lp():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
    s = maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert s.value == 36
    assert s.x == (2, 6)
    assert s.duals == (0, F(3, 2), 1)


def test_rational_data():
    s = maximize([1, 1], [[F(1, 2), 1], [1, F(1, 3)]], [F(3, 2), 1])
    assert s.value == sum(s.x)
    assert s.x == (F(3, 5), F(6, 5))


def test_phase_one_and_infeasible():
    # x + y <= 2 and -x <= -1 forces x >= 1
    s = maximize([0, 1], [[1, 1], [-1, 0]], [2, -1])
    assert s.value == 1 and s.x == (1, 1)
    with pytest.raises(InfeasibleError):
        maximize([1], [[1], [-1]], [1, -2])


def test_unbounded():
    with pytest.raises(UnboundedError):
        maximize([1, 1], [[1, -1]], [1])


def test_degenerate_cycling_instance():
    # a classic cycling example for naive pivot rules; Bland terminates
    c = [F(3, 4), -150, F(1, 50), -6]
    A = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    s = maximize(c, A, [0, 0, 1])
    assert s.value == F(1, 20)


lp = st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 5), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=1, max_size=5),
    st.data()))


@settings(max_examples=120, deadline=None)
@given(lp)
def test_strong_duality(args):
    c, A, data = args
    n = len(c)
    # every column gets a positive entry so the LP stays bounded
    A = [row[:] for row in A] + [[1] * n]
    b = data.draw(st.lists(st.integers(0, 9), min_size=len(A), max_size=len(A)))
    s = maximize(c, A, b)
    assert all(x >= 0 for x in s.x) and all(y >= 0 for y in s.duals)
    for row, bi in zip(A, b):
        assert sum(a * x for a, x in zip(row, s.x)) <= bi
    for j in range(n):
        assert sum(A[i][j] * s.duals[i] for i in range(len(A))) >= c[j]
    assert s.value == sum(ci * x for ci, x in zip(c, s.x)) == sum(bi * y for bi, y in zip(b, s.duals))
