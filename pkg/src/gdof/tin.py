"""Polyhedral-TIN and TINA sum-GDoF.

``ptin_sum`` solves the cycle-cover dual as an assignment problem: the
cheapest cyclic partition of S minimizes ``sum(alpha_kk) - cover weight``,
which is the best cycle-bound sum any partition can give.  In the SLS
regime that value is exactly the polyhedral-TIN optimum.
``ptin_sum_oracle`` solves the primal LP directly over every cycle bound and
is the independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import assignment, simplex
from .cycles import (Cycle, CyclicPartition, enumerate_cycles, iter_cycles,
                     scaled_delta)
from .errors import CapExceeded, CycleError, InfeasibleError
from .network import ChannelMatrix, classify

ORACLE_CAP = 8
CHECK_CAP = 10
TINA_CAP = 20


@dataclass(frozen=True)
class GdofPoint:
    d: Mapping[int, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "d", {int(k): Fraction(v) for k, v in dict(self.d).items()})

    @classmethod
    def from_sequence(cls, values: Sequence) -> "GdofPoint":
        return cls({k: Fraction(v) for k, v in enumerate(values, 1)})

    def __getitem__(self, k: int) -> Fraction:
        return self.d.get(k, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.d.values(), Fraction(0))


@dataclass(frozen=True)
class DualCertificate:
    lambdas: tuple[tuple[Cycle, Fraction], ...]
    cover_mode: str = "equality"

    def coverage(self) -> dict[int, Fraction]:
        cov: dict[int, Fraction] = {}
        for c, lam in self.lambdas:
            for u in c.users:
                cov[u] = cov.get(u, Fraction(0)) + lam
        return cov


@dataclass(frozen=True)
class PtinResult:
    value: Fraction
    partition: CyclicPartition
    certificate: DualCertificate
    sls_certified: bool

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "partition": str(self.partition),
            "sls_certified": self.sls_certified,
            "lambdas": [[str(c), str(lam)] for c, lam in self.certificate.lambdas],
        }


def _subset(m: ChannelMatrix, S: Iterable[int] | None) -> list[int]:
    users = sorted(set(range(1, m.K + 1) if S is None else S))
    if not users:
        raise CycleError("user set must be nonempty")
    for u in users:
        m.check_index(u)
    return users


def _gain(m: ChannelMatrix) -> list[list[int]]:
    """``gain[i][j]`` = scaled strength of link i→j when j follows i in a cycle."""
    A, _ = m.scaled
    K = m.K
    return [[0 if i == j else A[j][i] for j in range(K)] for i in range(K)]


@lru_cache(maxsize=256)
def _lex_cost(m: ChannelMatrix):
    return assignment.lex_tiebreak_cost(_gain(m))


def _cycles_of(successor: Mapping[int, int]) -> list[Cycle]:
    seen: set[int] = set()
    cycles = []
    for start in sorted(successor):
        if start in seen:
            continue
        users = [start]
        seen.add(start)
        nxt = successor[start]
        while nxt != start:
            users.append(nxt)
            seen.add(nxt)
            nxt = successor[nxt]
        cycles.append(Cycle(tuple(u + 1 for u in users)))
    return cycles


def min_partition(m: ChannelMatrix, S: Iterable[int] | None = None) -> CyclicPartition:
    """The cyclic partition of S with the smallest total Delta.

    Among optimal assignments the lexicographically smallest successor
    permutation is chosen.
    """
    users = _subset(m, S)
    cost, _ = _lex_cost(m)
    _, succ = assignment.solve_min(cost, [u - 1 for u in users])
    return CyclicPartition.of(_cycles_of(succ))


def ptin_sum(m: ChannelMatrix, S: Iterable[int] | None = None,
             sls: bool | None = None) -> PtinResult:
    """Polyhedral-TIN sum-GDoF of S via the minimum-Delta cyclic partition.

    Exact in the SLS regime (``sls_certified``); elsewhere the value is only
    an upper bound on the LP optimum.  ``sls`` may be passed to skip the
    regime test when the caller already knows the answer.
    """
    part = min_partition(m, S)
    A, D = m.scaled
    value = Fraction(sum(scaled_delta(A, c.users) for c in part.cycles), D)
    if sls is None:
        sls = classify(m).in_sls
    cert = DualCertificate(tuple((c, Fraction(1)) for c in part.ordered()))
    return PtinResult(value, part, cert, bool(sls))


@dataclass(frozen=True)
class OracleSolution:
    value: Fraction
    point: GdofPoint
    lambdas: tuple[tuple[Cycle, Fraction], ...]


def solve_lp1(m: ChannelMatrix, S: Iterable[int] | None = None,
              cap: int = ORACLE_CAP) -> OracleSolution:
    """Maximize the sum of d over S subject to every cycle bound, by simplex."""
    users = _subset(m, S)
    if len(users) > cap:
        raise CapExceeded(f"{len(users)} users exceed the LP oracle cap of {cap}")
    A, D = m.scaled
    cycles = enumerate_cycles(users)
    pos = {u: t for t, u in enumerate(users)}
    rows = []
    rhs = []
    for c in cycles:
        row = [0] * len(users)
        for u in c.users:
            row[pos[u]] = 1
        rows.append(row)
        rhs.append(scaled_delta(A, c.users))
    sol = simplex.maximize([1] * len(users), rows, rhs)
    point = GdofPoint({u: sol.x[pos[u]] / D for u in users})
    lambdas = tuple((c, y) for c, y in zip(cycles, sol.duals) if y != 0)
    return OracleSolution(sol.value / D, point, lambdas)


def ptin_sum_oracle(m: ChannelMatrix, S: Iterable[int] | None = None) -> Fraction:
    """Polyhedral-TIN sum-GDoF of S by exact simplex; valid in every regime.

    Raises InfeasibleError when some cycle has a negative Delta, since the
    polyhedral region of S is then empty.
    """
    return solve_lp1(m, S).value


@dataclass(frozen=True)
class CheckResult:
    feasible: bool
    cycle: Cycle | None = None
    bound: Fraction | None = None
    load: Fraction | None = None

    @property
    def slack(self) -> Fraction | None:
        return None if self.cycle is None else self.bound - self.load


def ptin_check(m: ChannelMatrix, S: Iterable[int], d) -> CheckResult:
    """Test d against every cycle bound over S; report the first violation."""
    users = _subset(m, S)
    if len(users) > CHECK_CAP:
        raise CapExceeded(f"{len(users)} users exceed the cycle-check cap of {CHECK_CAP}")
    point = d if isinstance(d, GdofPoint) else (
        GdofPoint(d) if isinstance(d, Mapping) else GdofPoint.from_sequence(d))
    inside = set(users)
    for k, v in point.d.items():
        m.check_index(k)
        if v < 0:
            raise ValueError(f"negative GDoF {v} for user {k}")
        if v > 0 and k not in inside:
            raise ValueError(f"user {k} is outside S but has GDoF {v}")
    A, D = m.scaled
    for c in iter_cycles(users):
        load = sum((point[u] for u in c.users), Fraction(0))
        bound = Fraction(scaled_delta(A, c.users), D)
        if load > bound:
            return CheckResult(False, c, bound, load)
    return CheckResult(True)


def _subset_values(m: ChannelMatrix) -> list[tuple[tuple[int, ...], int]]:
    """Scaled assignment value of every nonempty subset (1-based tuples)."""
    A, _ = m.scaled
    K = m.K
    gain = _gain(m)
    cost = [[-g for g in row] for row in gain]
    diag = [A[i][i] for i in range(K)]
    out = []
    for sub, total in assignment.iter_subset_min_costs(cost):
        # total = -max cover weight
        out.append((tuple(k + 1 for k in sub), sum(diag[k] for k in sub) + total))
    return out


@dataclass(frozen=True)
class TinaResult:
    value: Fraction
    best_subset: tuple[int, ...]
    result: PtinResult

    def to_json(self) -> dict:
        return {"value": str(self.value), "best_subset": list(self.best_subset),
                "ptin": self.result.to_json()}


def tina_sum(m: ChannelMatrix, sls: bool | None = None) -> TinaResult:
    """Largest polyhedral-TIN sum over all nonempty user subsets.

    Outside the SLS regime, subsets of up to ORACLE_CAP users are evaluated
    with the simplex oracle, larger ones with the assignment upper bound.
    Ties go to the smallest subset, then the lexicographically first.
    """
    if m.K > TINA_CAP:
        raise CapExceeded(f"K={m.K} exceeds the TINA subset-scan cap of {TINA_CAP}")
    if sls is None:
        sls = classify(m).in_sls
    _, D = m.scaled
    values = _subset_values(m)
    best_key = None
    best = None
    for sub, v in values:
        val = Fraction(v, D)
        if not sls and len(sub) <= ORACLE_CAP:
            try:
                val = ptin_sum_oracle(m, sub)
            except InfeasibleError:
                # empty region; singletons never are, so some subset survives
                continue
        key = (-val, len(sub), sub)
        if best_key is None or key < best_key:
            best_key, best = key, (val, sub)
    val, sub = best
    return TinaResult(val, sub, ptin_sum(m, sub, sls=sls))


@lru_cache(maxsize=4096)
def tina_value(m: ChannelMatrix) -> Fraction:
    """Cached TINA sum-GDoF value (SLS inputs use the assignment scan)."""
    return tina_sum(m).value


def tina_sum_oracle(m: ChannelMatrix) -> TinaResult:
    """TINA by solving the LP of every subset with the simplex oracle.

    Valid in every regime; needs K <= ORACLE_CAP.  Subsets with an empty
    region are skipped.
    """
    if m.K > ORACLE_CAP:
        raise CapExceeded(f"K={m.K} exceeds the LP oracle cap of {ORACLE_CAP}")
    best_key = None
    best = None
    for size in range(1, m.K + 1):
        for sub in itertools.combinations(range(1, m.K + 1), size):
            try:
                val = ptin_sum_oracle(m, sub)
            except InfeasibleError:
                continue
            key = (-val, len(sub), sub)
            if best_key is None or key < best_key:
                best_key, best = key, (val, sub)
    val, sub = best
    return TinaResult(val, sub, ptin_sum(m, sub))
