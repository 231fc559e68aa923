"""Exact Hungarian algorithm for the square assignment problem.

Costs are Python integers, so the solver is exact for any rational input
once it has been scaled to a common denominator.  The solver is
incremental: ``add(k)`` inserts row ``k`` and column ``k`` into a solved
instance and restores optimality with a single augmenting phase, which
makes a depth-first scan over all subsets of users cost O(n^2) per subset.
"""

from __future__ import annotations

from typing import Iterator, Sequence


class HungarianState:
    """Min-cost perfect matching between active rows and active columns.

    ``cost`` is a full K x K integer matrix indexed by global user index
    (0-based); only the rows and columns that have been added take part.
    """

    __slots__ = ("cost", "active", "u", "v", "row_of", "col_of")

    def __init__(self, cost: Sequence[Sequence[int]]):
        K = len(cost)
        self.cost = cost
        self.active: list[int] = []
        self.u = [0] * K
        self.v = [0] * K
        self.row_of: list[int | None] = [None] * K
        self.col_of: list[int | None] = [None] * K

    def copy(self) -> "HungarianState":
        new = HungarianState.__new__(HungarianState)
        new.cost = self.cost
        new.active = self.active[:]
        new.u = self.u[:]
        new.v = self.v[:]
        new.row_of = self.row_of[:]
        new.col_of = self.col_of[:]
        return new

    def add(self, k: int) -> None:
        cost, u = self.cost, self.u
        if self.active:
            self.v[k] = min(cost[i][k] - u[i] for i in self.active)
        else:
            self.v[k] = 0
        self.u[k] = 0
        self.active.append(k)
        self._augment(k)

    def _augment(self, r: int) -> None:
        cost, u, v, row_of = self.cost, self.u, self.v, self.row_of
        cols = self.active
        minv: dict[int, int] = {}
        way: dict[int, int] = {}
        used: list[int] = [-1]
        used_set = {-1}
        j0 = -1
        i0 = r
        while True:
            delta = None
            j1 = -1
            ci = cost[i0]
            ui = u[i0]
            for j in cols:
                if j in used_set:
                    continue
                cur = ci[j] - ui - v[j]
                mj = minv.get(j)
                if mj is None or cur < mj:
                    minv[j] = mj = cur
                    way[j] = j0
                if delta is None or mj < delta:
                    delta = mj
                    j1 = j
            for j in used:
                if j == -1:
                    u[r] += delta
                else:
                    u[row_of[j]] += delta
                    v[j] -= delta
            for j in cols:
                if j not in used_set:
                    minv[j] -= delta
            j0 = j1
            used.append(j0)
            used_set.add(j0)
            if row_of[j0] is None:
                break
            i0 = row_of[j0]
        while True:
            j1 = way[j0]
            if j1 == -1:
                row_of[j0] = r
                self.col_of[r] = j0
                break
            row = row_of[j1]
            row_of[j0] = row
            self.col_of[row] = j0
            j0 = j1

    def total(self) -> int:
        return sum(self.cost[i][self.col_of[i]] for i in self.active)

    def assignment(self) -> dict[int, int]:
        return {i: self.col_of[i] for i in self.active}


def solve_min(cost: Sequence[Sequence[int]], rows: Sequence[int] | None = None):
    """Minimum-cost assignment over ``rows`` (default: all indices).

    Returns ``(total, assignment)`` with ``assignment[row] = column``.
    """
    st = HungarianState(cost)
    for k in (range(len(cost)) if rows is None else rows):
        st.add(k)
    return st.total(), st.assignment()


def lex_tiebreak_cost(gain: Sequence[Sequence[int]]):
    """Costs whose minimum is the max-gain assignment, ties to lex-smallest.

    A permutation is compared by the sequence of columns it assigns to rows
    in increasing row order.  The penalty ``j * K**(K-1-i)`` separates those
    sequences lexicographically and stays below ``W = K**K``, so scaling the
    gains by ``W`` keeps every gain difference dominant.  Returns
    ``(cost, W)``.
    """
    K = len(gain)
    W = K ** K
    cost = [[-W * gain[i][j] + j * K ** (K - 1 - i) for j in range(K)] for i in range(K)]
    return cost, W


def iter_subset_min_costs(cost: Sequence[Sequence[int]]) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(subset, min assignment cost)`` for every nonempty subset.

    Subsets are 0-based tuples visited depth-first in lexicographic order;
    each child reuses its parent's solved state.
    """
    K = len(cost)

    def dfs(state: HungarianState, last: int, prefix: tuple[int, ...]):
        for k in range(last + 1, K):
            child = state.copy()
            child.add(k)
            sub = prefix + (k,)
            yield sub, child.total()
            yield from dfs(child, k, sub)

    yield from dfs(HungarianState(cost), -1, ())
