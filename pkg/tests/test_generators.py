from fractions import Fraction as F

import numpy as np
import pytest

from gdof import (ChannelMatrix, GdofError, TreeSpec, classify, ctin_cyclic_network, fig1_network,
                  half_cross_network, random_in_regime, symmetric_network, tina_sum,
                  tree_network)
from gdof.generators import REGIMES, _Screen, _membership


def test_symmetric():
    m = symmetric_network(3, F(1, 2))
    assert m.alpha == ((1, F(1, 2), F(1, 2)), (F(1, 2), 1, F(1, 2)), (F(1, 2), F(1, 2), 1))
    r = classify(m)
    assert r.in_tin and r.in_ctin
    assert symmetric_network(2, 0).alpha == ((1, 0), (0, 1))
    r = classify(symmetric_network(3, 1))
    assert r.in_sls and not r.in_ctin
    with pytest.raises(ValueError):
        symmetric_network(2, -1)


def test_cyclic():
    assert ctin_cyclic_network(3).alpha == ((3, 1, 2), (2, 3, 1), (1, 2, 3))
    assert ctin_cyclic_network(2).alpha == ((2, 1), (1, 2))
    assert ctin_cyclic_network(4).alpha[0] == (4, 1, 2, 3)
    with pytest.raises(ValueError):
        ctin_cyclic_network(1)


@pytest.mark.parametrize("K", range(2, 9))
def test_cyclic_membership_computations(K):
    m = ctin_cyclic_network(K)
    assert all(m[1, j] + m[j, 1] == K for j in range(2, K + 1))
    assert all(((k - j) % K) - (k - j) >= 0 for j in range(1, K + 1) for k in range(1, K + 1))
    assert classify(m).in_ctin


def test_tree_values():
    t = TreeSpec(3, 1)
    assert t.delta(1, 4) == t.delta(4, 1) == F(1, 4)
    assert t.delta(3, 7) == t.delta(7, 3) == F(1, 2)
    assert t.delta(5, 6) == F(1, 8)
    assert tree_network(1).alpha == ((1, F(1, 2)), (F(1, 2), 1))
    assert tree_network(2, F(1, 2))[1, 3] == 1 - F(1, 4)
    with pytest.raises(ValueError):
        tree_network(2, F(3, 2))
    with pytest.raises(ValueError):
        tree_network(0)


@pytest.mark.parametrize("n", range(2, 5))
@pytest.mark.parametrize("nu", [F(1), F(1, 2), F(2, 3)])
def test_tree_halves_are_smaller_trees(n, nu):
    t = tree_network(n, nu)
    h = 2 ** (n - 1)
    half = tree_network(n - 1, nu / 2)
    assert t.submatrix(range(1, h + 1)).alpha == half.alpha
    assert t.submatrix(range(h + 1, 2 * h + 1)).alpha == half.alpha
    assert classify(t).in_sls


@pytest.mark.parametrize("n, value", [(1, 1), (2, F(5, 4)), (3, F(11, 8))])
def test_tree_tina_at_most_two(n, value):
    assert tina_sum(tree_network(n)).value == value <= 2


def test_fig1():
    m = fig1_network()
    assert m.alpha == ((2, F(1, 5), 1), (F(1, 2), 1, F(1, 2)), (F(1, 10), F(1, 2), F(3, 2)))
    assert classify(m).in_tin


def test_half_cross():
    assert half_cross_network().alpha == ((1, F(1, 2)), (F(1, 2), 1))
    m = half_cross_network(4)
    assert m[1, 2] == m[2, 1] == F(1, 2) and m[3, 4] == 0 and m[4, 4] == 1
    assert classify(m).in_tin


def test_random_frozen_values():
    m = random_in_regime(3, "TIN", 1)
    assert [[str(x) for x in r] for r in m.alpha] == [
        ["1", "131/512", "387/1024"], ["487/1024", "1", "73/1024"], ["211/512", "243/512", "1"]]
    assert classify(m).in_tin
    m = random_in_regime(4, "strict-SLS", 7)
    assert m[1, 4] == F(893, 1024) and m[4, 1] == F(613, 1024)
    assert classify(m).in_strict_sls


@pytest.mark.parametrize("regime", REGIMES)
@pytest.mark.parametrize("K", [2, 3, 5])
def test_random_membership_and_determinism(K, regime):
    for seed in range(15):
        m = random_in_regime(K, regime, seed)
        assert _membership(m, regime)
        assert m == random_in_regime(K, regime, seed)
        assert all(x.denominator <= 1024 and 1024 % x.denominator == 0 for r in m.alpha for x in r)
        assert all(m[i, i] == 1 for i in range(1, K + 1))


def test_random_errors():
    with pytest.raises(GdofError):
        random_in_regime(3, "MAC", 0)
    with pytest.raises(ValueError):
        random_in_regime(1, "TIN", 0)
    with pytest.raises(ValueError):
        random_in_regime(3, "TIN", -1)


@pytest.mark.parametrize("K", [2, 3, 4])
def test_vector_screen_agrees_with_classify(K):
    rng = np.random.Generator(np.random.PCG64(99))
    A = rng.integers(0, 1025, size=(300, K, K))
    A[:, np.eye(K, dtype=bool)] = 1024
    screen = _Screen(K)
    for regime in REGIMES:
        got = screen(A, regime)
        for b in range(len(A)):
            m = ChannelMatrix.from_rows([[F(int(x), 1024) for x in row] for row in A[b]])
            assert bool(got[b]) == _membership(m, regime)
