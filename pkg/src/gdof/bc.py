"""Sum-GDoF upper bounds for the cooperative (MISO broadcast) channel.

Every bound here needs the SLS regime and refuses other inputs.  A cycle
gives ``Delta + alpha`` over any one of its interfering links; a cyclic
partition of all users gives the sum of its cycle bounds; the staged
procedure builds one spanning cycle whose Delta grows by at most the TINA
value per stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cycles import (Cycle, CyclicPartition, combine, iter_cycles,
                     merge_trivial, scaled_delta)
from .errors import CapExceeded, CycleError, RegimeError
from .network import ChannelMatrix, classify
from .tin import TINA_CAP, min_partition, tina_value

EXHAUSTIVE_CAP = 9
METHOD_ORDER = ("partition", "hamiltonian-scan", "iterative", "cycle")


def require_sls(m: ChannelMatrix) -> None:
    report = classify(m)
    if not report.in_sls:
        w = report.witness("SLS")
        raise RegimeError(f"matrix is not in the SLS regime: {w.text}", report)


def _scaled_cycle_bound(A, users) -> int:
    n = len(users)
    if n == 1:
        u = users[0] - 1
        return A[u][u]
    cross = min(A[users[(t + 1) % n] - 1][users[t] - 1] for t in range(n))
    return scaled_delta(A, users) + cross


def bc_cycle_bound(m: ChannelMatrix, c: Cycle, checked: bool = False) -> Fraction:
    """``Delta + min alpha`` over the cycle's interfering links; ``alpha_ii`` if trivial."""
    for u in c.users:
        m.check_index(u)
    if not checked:
        require_sls(m)
    A, D = m.scaled
    return Fraction(_scaled_cycle_bound(A, c.users), D)


def _check_full(m: ChannelMatrix, p: CyclicPartition) -> None:
    if p.ground_set != frozenset(range(1, m.K + 1)):
        raise CycleError(f"{p} is not a cyclic partition of all {m.K} users")


def bc_partition_bound(m: ChannelMatrix, p: CyclicPartition, checked: bool = False) -> Fraction:
    """Sum of the cycle bounds of a cyclic partition of all users."""
    _check_full(m, p)
    if not checked:
        require_sls(m)
    A, D = m.scaled
    return Fraction(sum(_scaled_cycle_bound(A, c.users) for c in p.cycles), D)


@dataclass(frozen=True)
class Stage:
    index: int
    S: tuple[int, ...]
    partition: CyclicPartition
    combined: CyclicPartition

    @property
    def N(self) -> int:
        return len(self.partition)

    def to_json(self) -> dict:
        return {"stage": self.index, "S": list(self.S), "partition": str(self.partition),
                "combined": str(self.combined), "N": self.N}


@dataclass(frozen=True)
class BcBoundReport:
    value: Fraction
    method: str
    witness: Cycle | CyclicPartition
    trace: tuple[Stage, ...] = ()
    extras: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        out = {"value": str(self.value), "method": self.method, "witness": str(self.witness),
               "trace": [s.to_json() for s in self.trace]}
        for k, v in self.extras.items():
            out[k] = str(v) if isinstance(v, Fraction) else v
        return out


def p_optimal_partition(m: ChannelMatrix, S) -> CyclicPartition:
    """Minimum-Delta cyclic partition of S with its trivial cycles fused."""
    return merge_trivial(min_partition(m, S))


def iterative_stages(m: ChannelMatrix) -> list[Stage]:
    """Run the staged cycle-combining procedure until one cycle spans all users."""
    K = m.K
    S = tuple(range(1, K + 1))
    part = p_optimal_partition(m, S)
    stages = [Stage(0, S, part, part)]
    current = part
    while len(current) > 1:
        by_head = {c.head: c for c in current.cycles}
        S = tuple(sorted(by_head))
        sub = p_optimal_partition(m, S)
        combined = []
        for c in sub.ordered():
            if c.trivial:
                combined.append(by_head[c.head])
            else:
                combined.append(combine([by_head[h] for h in c.users]))
        current = CyclicPartition.of(combined)
        assert 2 * len(sub) <= len(S) + 1, "stage did not halve the cycle count"
        stages.append(Stage(len(stages), S, sub, current))
    return stages


def iterative_bound(m: ChannelMatrix, checked: bool = False) -> BcBoundReport:
    """Delta of the final spanning cycle plus the TINA sum-GDoF.

    The trace holds every stage.  ``extras`` records the stage count
    ``Lambda`` and the looser ``(Lambda + 2) * TINA`` chain constant.
    """
    if not checked:
        require_sls(m)
    if m.K > TINA_CAP:
        raise CapExceeded(f"K={m.K} exceeds the TINA cap of {TINA_CAP} needed by the iterative bound")
    stages = iterative_stages(m)
    final = next(iter(stages[-1].combined.cycles))
    A, D = m.scaled
    lam = len(stages) - 1
    if m.K >= 2:
        assert 2 ** lam <= m.K - 1, "stage count exceeds log2(K-1)"
    tina = tina_value(m)
    if final.trivial:
        value = Fraction(_scaled_cycle_bound(A, final.users), D)
    else:
        value = Fraction(scaled_delta(A, final.users), D) + tina
    extras = {"Lambda": lam, "final_delta": Fraction(scaled_delta(A, final.users), D),
              "tina": tina, "chain_bound": (lam + 2) * tina}
    return BcBoundReport(value, "iterative", final, tuple(stages), extras)


def _exhaustive(m: ChannelMatrix) -> tuple[int, CyclicPartition]:
    """Minimum partition bound over all cyclic partitions, by subset DP.

    ``best[mask]`` is the cheapest partition of the users in ``mask``; the
    lowest user of a mask always heads one cycle, so each partition is
    reached exactly once.
    """
    A, _ = m.scaled
    K = m.K
    per_set: dict[int, tuple[int, Cycle]] = {}
    for c in iter_cycles(range(1, K + 1)):
        mask = 0
        for u in c.users:
            mask |= 1 << (u - 1)
        b = _scaled_cycle_bound(A, c.users)
        old = per_set.get(mask)
        if old is None or b < old[0]:
            per_set[mask] = (b, c)
    full = (1 << K) - 1
    best: list[tuple[int, tuple[Cycle, ...]] | None] = [None] * (full + 1)
    best[0] = (0, ())
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        cand = None
        sub = rest
        while True:
            cm = sub | low
            b, c = per_set[cm]
            prev = best[mask ^ cm]
            key = (b + prev[0], tuple(sorted((c,) + prev[1], key=lambda x: x.head)))
            if cand is None or key[0] < cand[0] or (
                    key[0] == cand[0] and [x.users for x in key[1]] < [x.users for x in cand[1]]):
                cand = key
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = cand
    value, cycles = best[full]
    return value, CyclicPartition.of(cycles)


def hamiltonian_candidates(m: ChannelMatrix, stages=None) -> list[Cycle]:
    K = m.K
    cands = [Cycle(tuple(range(1, K + 1)))]
    if stages:
        final = next(iter(stages[-1].combined.cycles))
        if final not in cands:
            cands.append(final)
    return cands


def bc_sum_upper(m: ChannelMatrix) -> BcBoundReport:
    """Smallest bound among all implemented generators.

    Generators: every cyclic partition (K <= 9), the minimum-Delta
    partition, spanning cycles (natural order and the staged procedure's
    final cycle) and the staged bound itself (K <= 20).  Ties prefer
    the method order partition, hamiltonian-scan, iterative.
    """
    require_sls(m)
    A, D = m.scaled
    candidates: list[tuple[Fraction, int, str, object, BcBoundReport | None]] = []

    def add(value, method, witness, report=None):
        candidates.append((value, METHOD_ORDER.index(method), method, witness, report))

    if m.K <= EXHAUSTIVE_CAP:
        v, p = _exhaustive(m)
        add(Fraction(v, D), "partition", p)
    p = p_optimal_partition(m, range(1, m.K + 1))
    add(bc_partition_bound(m, p, checked=True), "partition", p)
    stages = None
    if m.K <= TINA_CAP:
        it = iterative_bound(m, checked=True)
        stages = it.trace
        add(it.value, "iterative", it.witness, it)
    for c in hamiltonian_candidates(m, stages):
        add(bc_cycle_bound(m, c, checked=True), "hamiltonian-scan", c)
    candidates.sort(key=lambda t: (t[0], t[1]))
    value, _, method, witness, report = candidates[0]
    if report is not None:
        return report
    return BcBoundReport(value, method, witness)


@dataclass(frozen=True)
class RatioReport:
    upper: Fraction
    lower: Fraction | None
    bc_upper: BcBoundReport
    tina: Fraction
    verified_total: Fraction | None = None

    def to_json(self) -> dict:
        return {"upper": str(self.upper),
                "lower": None if self.lower is None else str(self.lower),
                "tina": str(self.tina), "bc_upper": self.bc_upper.to_json(),
                "verified_total": None if self.verified_total is None else str(self.verified_total)}


def ratio_report(m: ChannelMatrix, scheme=None) -> RatioReport:
    """Bracket the cooperation gain BC/TINA for one network.

    ``lower`` is present only when ``scheme`` verifies at every receiver.
    """
    from .schemes import verify_scheme

    require_sls(m)
    tina = tina_value(m)
    if tina == 0:
        raise ValueError("degenerate network: TINA sum-GDoF is zero")
    up = bc_sum_upper(m)
    lower = total = None
    if scheme is not None:
        verdict = verify_scheme(m, scheme)
        if verdict.ok:
            total = verdict.total
            lower = total / tina
    return RatioReport(up.value / tina, lower, up, tina, total)


def log2_ceiling(K: int) -> float:
    return 2 + math.log2(K - 1)
