from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gdof import (CapExceeded, ChannelMatrix, Cycle, CycleError, GdofPoint, InfeasibleError,
                  classify, ctin_cyclic_network, cycle_delta, enumerate_partitions, ptin_check,
                  ptin_sum, ptin_sum_oracle, tina_sum, tina_sum_oracle, tree_network)
from gdof.cycles import partition_delta
from gdof.tin import solve_lp1


def test_fig1_full_set(fig1):
    r = ptin_sum(fig1)
    assert r.value == F(5, 2)
    assert str(r.partition) == "{(1→2→3)}"
    assert r.sls_certified
    assert r.to_json() == {"value": "5/2", "partition": "{(1→2→3)}", "sls_certified": True,
                           "lambdas": [["(1→2→3)", "1"]]}
    assert ptin_sum_oracle(fig1, [1, 2, 3]) == F(5, 2)


@pytest.mark.parametrize("K", range(2, 7))
def test_cyclic_full_set_is_K(K):
    m = ctin_cyclic_network(K)
    assert ptin_sum(m).value == K
    assert ptin_sum_oracle(m) == K


def test_allones_non_monotone(allones):
    both = ptin_sum(allones, {1, 2})
    assert both.value == 0 and str(both.partition) == "{(1→2)}"
    assert ptin_sum(allones, {1}).value == 1
    assert ptin_sum_oracle(allones, [1, 2]) == 0


def test_tree2_oracle():
    m = tree_network(2)
    assert ptin_sum_oracle(m, [1, 2, 3, 4]) == 1
    assert ptin_sum(m).value == 1
    assert str(ptin_sum(m).partition) == "{(1→2),(3→4)}"


def test_single_user(fig1):
    for k in (1, 2, 3):
        assert ptin_sum(fig1, [k]).value == fig1[k, k]
        assert ptin_sum_oracle(fig1, [k]) == fig1[k, k]


def test_certificate_equality_mode(fig1):
    cert = ptin_sum(fig1, [1, 3]).certificate
    assert cert.cover_mode == "equality"
    assert cert.coverage() == {1: 1, 3: 1}


def test_ptin_errors(fig1):
    with pytest.raises(CycleError):
        ptin_sum(fig1, [])
    with pytest.raises(IndexError):
        ptin_sum(fig1, [1, 4])
    with pytest.raises(CapExceeded):
        ptin_sum_oracle(tree_network(4), range(1, 10))


def test_not_sls_flagged():
    m = ChannelMatrix.from_rows([[1, 2], [0, 1]])
    r = ptin_sum(m)
    assert not r.sls_certified
    assert r.value >= ptin_sum_oracle(m)


def test_empty_region_outside_sls():
    # cycle weight beats the direct links, so Delta of (1→2) is negative
    m = ChannelMatrix.from_rows([[1, 3], [3, 1]])
    with pytest.raises(InfeasibleError):
        ptin_sum_oracle(m)
    assert ptin_sum(m).value == -4
    assert tina_sum(m).value == 1
    assert tina_sum_oracle(m).value == 1


def test_ptin_check_examples():
    m = tree_network(2)
    v = ptin_check(m, [1, 2, 3, 4], [F(1, 2)] * 4)
    assert not v.feasible
    assert v.cycle == Cycle((1, 2)) and v.bound == F(1, 2) and v.slack == F(-1, 2)
    assert ptin_check(m, [1, 3], {1: F(1, 2), 3: F(1, 2)}).feasible
    assert ptin_check(m, [1, 2, 3, 4], [0, 0, 0, 0]).feasible
    with pytest.raises(ValueError):
        ptin_check(m, [1, 3], {2: F(1, 4)})
    with pytest.raises(ValueError):
        ptin_check(m, [1, 3], {1: F(-1, 4)})


def test_tina_examples(cyclic3, allones, fig1):
    r = tina_sum(cyclic3)
    assert r.value == 3 and r.best_subset == (1,)
    r = tina_sum(allones)
    assert r.value == 1 and r.best_subset == (1,)
    r = tina_sum(fig1)
    assert r.value == F(5, 2) and r.best_subset == (1, 2, 3)
    assert str(r.result.partition) == "{(1→2→3)}"


def test_tina_tree2_beats_pair_bounds():
    m = tree_network(2)
    r = tina_sum(m)
    assert r.value == F(5, 4) and r.best_subset == (1, 2, 3)
    assert tina_sum_oracle(m).value == F(5, 4)
    # d = (1/4, 1/4, 3/4) meets every cycle bound on {1,2,3}
    assert ptin_check(m, [1, 2, 3], {1: F(1, 4), 2: F(1, 4), 3: F(3, 4)}).feasible


def test_tina_tree3_matches_oracle():
    m = tree_network(3)
    r = tina_sum(m)
    assert r.value == F(11, 8) and r.best_subset == (1, 2, 3, 4, 5)
    assert tina_sum_oracle(m).value == F(11, 8)


def test_tina_cap():
    m = ChannelMatrix.from_rows([[1 if i == j else 0 for j in range(21)] for i in range(21)])
    with pytest.raises(CapExceeded):
        tina_sum(m)


def test_lp1_solution_is_feasible_and_dual_matches(fig1):
    sol = solve_lp1(fig1)
    assert sol.point.total() == sol.value == F(5, 2)
    assert ptin_check(fig1, [1, 2, 3], sol.point).feasible
    dual = sum(lam * cycle_delta(fig1, c) for c, lam in sol.lambdas)
    assert dual == sol.value


def test_gdof_point():
    p = GdofPoint.from_sequence([F(1, 2), 0, 1])
    assert p[1] == F(1, 2) and p[4] == 0 and p.total() == F(3, 2)


def sls_matrices():
    K = st.integers(2, 4)
    return K.flatmap(lambda k: st.lists(st.lists(st.integers(0, 8), min_size=k, max_size=k),
                                        min_size=k, max_size=k)).map(
        lambda rows: ChannelMatrix.from_rows(
            [[F(8 + x, 8) if i == j else F(x, 16) for j, x in enumerate(r)] for i, r in enumerate(rows)]))


@settings(max_examples=80, deadline=None)
@given(sls_matrices())
def test_assignment_is_minimum_partition(m):
    # cross entries <= 1/2 < direct strengths, so every draw is SLS
    assert classify(m).in_sls
    r = ptin_sum(m)
    assert r.value == partition_delta(m, r.partition)
    best = min(partition_delta(m, p) for p in enumerate_partitions(range(1, m.K + 1)))
    assert r.value == best == ptin_sum_oracle(m)
