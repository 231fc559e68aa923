from fractions import Fraction as F

import pytest

from gdof import (CapExceeded, ChannelMatrix, Cycle, CycleError, LayeredScheme, Message, RegimeError, bc_cycle_bound,
                  bc_partition_bound, bc_sum_upper, ctin_bc_scheme, ctin_cyclic_network,
                  iterative_bound, parse_cycle, parse_partition, ratio_report, tree_bc_scheme,
                  tree_network)
from gdof.bc import iterative_stages
from gdof.theorems import within_log_ceiling


@pytest.mark.parametrize("cycle, value", [
    ("(1→2→3)", 3), ("(1→2)", F(5, 2)), ("(1→3)", F(5, 2)), ("(2→3)", 2),
    ("(1)", 2), ("(1→3→2)", F(9, 2) - F(4, 5) + F(1, 10)),
])
def test_fig1_cycle_bounds(fig1, cycle, value):
    assert bc_cycle_bound(fig1, parse_cycle(cycle)) == value


@pytest.mark.parametrize("K", range(2, 8))
def test_cyclic_hamiltonian_bound(K):
    m = ctin_cyclic_network(K)
    assert bc_cycle_bound(m, Cycle(tuple(range(1, K + 1)))) == 2 * K - 1


def test_partition_bounds(fig1, halfcross):
    assert bc_partition_bound(fig1, parse_partition("{(1→2→3)}")) == 3
    assert bc_partition_bound(fig1, parse_partition("{(1),(2→3)}")) == 4
    assert bc_partition_bound(halfcross, parse_partition("{(1→2)}")) == F(3, 2)
    with pytest.raises(CycleError):
        bc_partition_bound(fig1, parse_partition("{(1→2)}"))


def test_sum_upper_examples(fig1, cyclic3):
    r = bc_sum_upper(cyclic3)
    assert (r.value, r.method, str(r.witness)) == (5, "partition", "{(1→2→3)}")
    r = bc_sum_upper(tree_network(2))
    assert r.value == 2 and str(r.witness) == "{(1→2→3→4)}"
    r = bc_sum_upper(fig1)
    assert r.value == 3 and str(r.witness) == "{(1→2→3)}"


def test_iterative_examples(cyclic3, halfcross):
    r = iterative_bound(cyclic3)
    assert r.value == 6 and r.extras["Lambda"] == 0
    assert r.to_json()["trace"] == [{"stage": 0, "S": [1, 2, 3], "partition": "{(1→2→3)}",
                                     "combined": "{(1→2→3)}", "N": 1}]
    assert iterative_bound(halfcross).value == 2
    assert iterative_bound(ChannelMatrix.from_rows([[F(7, 3)]])).value == F(7, 3)


def test_iterative_multi_stage():
    # isolated users: every stage pairs cycles up through their heads
    m = ChannelMatrix.from_rows([[1 if i == j else 0 for j in range(5)] for i in range(5)])
    stages = iterative_stages(m)
    assert [s.N for s in stages] == [1]
    m = tree_network(3)
    r = iterative_bound(m)
    ns = [s.N for s in r.trace]
    assert all(2 * b <= a + 1 for a, b in zip(ns, ns[1:]))
    assert len(r.witness) == 8
    assert bc_sum_upper(m).value <= r.value


def test_refuses_non_sls():
    m = ChannelMatrix.from_rows([[1, 2], [0, 1]])
    for fn in (bc_sum_upper, iterative_bound):
        with pytest.raises(RegimeError) as e:
            fn(m)
        assert e.value.report is not None and not e.value.report.in_sls
    with pytest.raises(RegimeError):
        bc_cycle_bound(m, Cycle((1, 2)))
    with pytest.raises(RegimeError):
        bc_partition_bound(m, parse_partition("{(1→2)}"))


def test_iterative_cap():
    m = ChannelMatrix.from_rows([[1 if i == j else 0 for j in range(21)] for i in range(21)])
    with pytest.raises(CapExceeded):
        iterative_bound(m)
    assert bc_sum_upper(m).value == 21


def test_ratio_reports(halfcross):
    for K in (2, 3, 4):
        r = ratio_report(ctin_cyclic_network(K), ctin_bc_scheme(K))
        assert r.upper == r.lower == 2 - F(1, K)
    r = ratio_report(halfcross, tree_bc_scheme(1))
    assert r.upper == r.lower == F(3, 2)
    r = ratio_report(tree_network(3), tree_bc_scheme(3))
    assert r.tina == F(11, 8) and r.verified_total == F(5, 2)
    assert r.lower >= F(5, 4) and r.lower == r.upper == F(20, 11)
    assert ratio_report(halfcross).lower is None


def test_ratio_with_failing_scheme(cyclic3):
    # a two-user scheme is still valid on users 1 and 2 of a larger network
    r = ratio_report(cyclic3, tree_bc_scheme(1))
    assert r.lower == F(1, 2)
    s = ctin_bc_scheme(3)
    msgs = tuple(Message(x.id, x.antennas, x.power, 3 if x.id == "U" else x.gdof, x.audience)
                 for x in s.messages)
    r = ratio_report(cyclic3, LayeredScheme(msgs, s.decode_order))
    assert r.lower is None and r.upper == F(5, 3)


def test_degenerate_ratio():
    with pytest.raises(ValueError):
        ratio_report(ChannelMatrix.from_rows([[0, 0], [0, 0]]))


def test_log_ceiling_exact():
    assert within_log_ceiling(F(2), 2)
    assert not within_log_ceiling(F(2) + F(1, 10**6), 2)
    assert within_log_ceiling(F(3), 3)
    assert within_log_ceiling(F(5, 2), 3)  # 2 + log2(2) = 3
    assert within_log_ceiling(F(7, 2), 5)  # 2^(3/2) ~ 2.83 <= 4
    assert not within_log_ceiling(F(9, 2), 5)  # 2^(5/2) ~ 5.66 > 4
