"""Exact primal simplex for ``max c.x  s.t.  A x <= b, x >= 0``.

The dictionary is kept as an integer matrix with one shared denominator
(fraction-free, Bareiss-style pivoting): every entry of the represented
rational tableau is ``T[r][c] / det``, and each pivot divides exactly by the
previous determinant.  Bland's rule guarantees termination.  Rows with a
negative right-hand side trigger a phase 1 with one auxiliary variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleError


class UnboundedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    x: tuple[Fraction, ...]
    duals: tuple[Fraction, ...]
    pivots: int


def _row_scale(row: Sequence[Fraction], rhs: Fraction) -> tuple[list[int], int]:
    L = math.lcm(*(Fraction(a).denominator for a in row), Fraction(rhs).denominator)
    return [int(Fraction(a) * L) for a in row], int(Fraction(rhs) * L)


class _Tableau:
    """Compact tableau: rows are basic variables, columns nonbasic ones.

    Variables ``0..n-1`` are structural, ``n..n+m-1`` slacks and ``n+m``
    the phase-1 auxiliary.  Row ``r`` reads
    ``x_basis[r] + sum_c T[r][c]/det * x_nonbasis[c] = T[r][-1]/det`` and
    the objective row reads ``z + sum_c obj[c]/det * x_nonbasis[c] = obj[-1]/det``.
    """

    def __init__(self, A: list[list[int]], b: list[int]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        self.T = [row[:] + [bi] for row, bi in zip(A, b)]
        self.basis = list(range(self.n, self.n + self.m))
        self.nonbasis = list(range(self.n))
        self.det = 1
        self.obj: list[int] = [0] * (self.n + 1)
        self.pivots = 0

    def pivot(self, p: int, q: int) -> None:
        T, det = self.T, self.det
        prow = T[p]
        a = prow[q]
        sign = 1 if a > 0 else -1
        width = len(prow)
        rows = T + [self.obj]
        for r, row in enumerate(rows):
            if r == p:
                continue
            f = row[q]
            if f == 0:
                for c in range(width):
                    if c != q:
                        row[c] = row[c] * a // det
                row[q] = 0
            else:
                for c in range(width):
                    if c != q:
                        row[c] = (row[c] * a - f * prow[c]) // det
                row[q] = -f
            if sign < 0:
                for c in range(width):
                    row[c] = -row[c]
        prow[q] = det
        if sign < 0:
            for c in range(width):
                prow[c] = -prow[c]
        self.det = a * sign
        self.basis[p], self.nonbasis[q] = self.nonbasis[q], self.basis[p]
        self.pivots += 1

    def entering(self) -> int | None:
        """Bland: smallest-index nonbasic variable with a negative reduced cost."""
        best = None
        for c, var in enumerate(self.nonbasis):
            if self.obj[c] < 0 and (best is None or var < self.nonbasis[best]):
                best = c
        return best

    def leaving(self, q: int) -> int | None:
        best = None
        for r, row in enumerate(self.T):
            a = row[q]
            if a <= 0:
                continue
            if best is None:
                best = r
                continue
            # compare row[-1]/a with T[best][-1]/T[best][q]; det cancels
            lhs = row[-1] * self.T[best][q]
            rhs = self.T[best][-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[r] < self.basis[best]):
                best = r
        return best

    def optimize(self) -> None:
        while True:
            q = self.entering()
            if q is None:
                return
            p = self.leaving(q)
            if p is None:
                raise UnboundedError("objective is unbounded")
            self.pivot(p, q)

    def set_objective(self, c: list[int]) -> None:
        """Objective row for ``max c.x`` expressed in the current nonbasis."""
        det = self.det
        obj = [0] * (len(self.nonbasis) + 1)
        for col, var in enumerate(self.nonbasis):
            if var < self.n:
                obj[col] -= c[var] * det
        for r, var in enumerate(self.basis):
            if var < self.n and c[var]:
                row = self.T[r]
                for col in range(len(obj)):
                    obj[col] += c[var] * row[col]
        self.obj = obj


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPSolution:
    """Solve ``max c.x`` subject to ``A x <= b`` and ``x >= 0`` exactly.

    Raises InfeasibleError or UnboundedError.  ``duals`` are the optimal
    multipliers of the ``A x <= b`` rows.
    """
    m = len(A)
    n = len(c)
    rows, rhs = [], []
    for row, bi in zip(A, b):
        if len(row) != n:
            raise ValueError("constraint row length does not match objective")
        ir, ib = _row_scale(row, bi)
        rows.append(ir)
        rhs.append(ib)
    cL = math.lcm(*(Fraction(x).denominator for x in c)) if n else 1
    ci = [int(Fraction(x) * cL) for x in c]

    tab = _Tableau(rows, rhs)
    if any(bi < 0 for bi in rhs):
        _phase_one(tab)
    tab.set_objective(ci)
    tab.optimize()

    det = tab.det
    x = [Fraction(0)] * n
    for r, var in enumerate(tab.basis):
        if var < n:
            x[var] = Fraction(tab.T[r][-1], det)
    y = [Fraction(0)] * m
    for col, var in enumerate(tab.nonbasis):
        if n <= var < n + m:
            y[var - n] = Fraction(tab.obj[col], det * cL)
    # row scaling multiplied constraint i by L_i; undo it on the duals
    for i in range(m):
        L = math.lcm(*(Fraction(a).denominator for a in A[i]), Fraction(b[i]).denominator)
        y[i] *= L
    value = Fraction(tab.obj[-1], det * cL)
    return LPSolution(value, tuple(x), tuple(y), tab.pivots)


def _phase_one(tab: _Tableau) -> None:
    aux = tab.n + tab.m
    for row in tab.T:
        row.insert(-1, -1)
    tab.nonbasis.append(aux)
    q = len(tab.nonbasis) - 1
    # the most negative right-hand side leaves; ties to the smallest variable
    p = min(range(tab.m), key=lambda r: (tab.T[r][-1], tab.basis[r]))
    tab.obj = [0] * (len(tab.nonbasis) + 1)
    tab.obj[q] = 1  # max -aux
    tab.pivot(p, q)
    tab.optimize()
    if tab.obj[-1] < 0:
        raise InfeasibleError("constraints admit no nonnegative solution")
    if aux in tab.basis:
        r = tab.basis.index(aux)
        # aux sits at zero; swap it for any nonbasic column with a nonzero entry
        for col, var in enumerate(tab.nonbasis):
            if var != aux and tab.T[r][col] != 0:
                tab.pivot(r, col)
                break
        else:
            # redundant row: every remaining coefficient is zero
            del tab.T[r]
            del tab.basis[r]
            tab.m -= 1
    q = tab.nonbasis.index(aux)
    for row in tab.T:
        del row[q]
    del tab.nonbasis[q]
