"""Executable property suites over seeded random corpora.

Each suite checks one structural fact or ratio ceiling on a corpus of
matrices and reports how many items it checked, every failure (with the
offending matrix) and, for ratio suites, the largest ratio observed.
Sample seeds are derived with numpy's SeedSequence from
``(seed, K, corpus tag, index)``, so any single sample can be regenerated.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bc, schemes
from .cycles import (Cycle, combine, enumerate_cycles, enumerate_partitions,
                     heads_cycle, merge_trivial, scaled_delta)
from .generators import (DENOMINATOR, REGIMES, ctin_cyclic_network, half_cross_network,
                         random_in_regime, symmetric_network, tree_network)
from .errors import InfeasibleError
from .network import ChannelMatrix, classify, delta
from .tin import (DualCertificate, GdofPoint, ptin_check, ptin_sum,
                  ptin_sum_oracle, solve_lp1, tina_value)

ORACLE_K_CAP = 6
SUBSETS_PER_SAMPLE = 10
_TAGS = {"generic": 0, "TIN": 1, "CTIN": 2, "SLS": 3, "strict-SLS": 4, "non-SLS": 5, "subsets": 6}


@dataclass(frozen=True)
class Failure:
    message: str
    matrix: ChannelMatrix | None = None

    def to_json(self) -> dict:
        return {"message": self.message,
                "matrix": None if self.matrix is None else self.matrix.to_json()}


@dataclass
class SuiteResult:
    name: str
    K: int
    checked: int = 0
    failures: list[Failure] = field(default_factory=list)
    observed: Fraction | None = None
    ceiling: str | None = None
    skipped: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.name, "K": self.K, "checked": self.checked, "ok": self.ok,
                "observed_max": None if self.observed is None else str(self.observed),
                "ceiling": self.ceiling, "skipped": self.skipped,
                "failures": [f.to_json() for f in self.failures]}


def worker_count() -> int:
    try:
        n = int(os.environ.get("GDOF_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def sample_seed(seed: int, K: int, tag: str, index: int) -> int:
    ss = np.random.SeedSequence([seed, K, _TAGS[tag], index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def random_matrix(K: int, seed: int) -> ChannelMatrix:
    """Unconstrained matrix: diagonal in [1/2, 2], cross entries in [0, 1]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    A = rng.integers(0, DENOMINATOR + 1, size=(K, K))
    d = rng.integers(DENOMINATOR // 2, 2 * DENOMINATOR + 1, size=K)
    rows = [[Fraction(int(d[i] if i == j else A[i, j]), DENOMINATOR) for j in range(K)]
            for i in range(K)]
    return ChannelMatrix.from_rows(rows, name=f"random(K={K}, seed={seed})")


def corpus(K: int, tag: str, samples: int, seed: int) -> list[ChannelMatrix]:
    """Seeded corpus for one regime tag, extremal networks first.

    TIN corpora carry the half-cross network, CTIN corpora the cyclic
    network and SLS corpora the tree network when K is a power of two.
    """
    out: list[ChannelMatrix] = []
    if tag == "TIN":
        out.append(half_cross_network(K))
    elif tag == "CTIN":
        out.append(ctin_cyclic_network(K))
    elif tag == "SLS" and K & (K - 1) == 0:
        out.append(tree_network(K.bit_length() - 1))
    for i in range(samples):
        s = sample_seed(seed, K, tag, i)
        if tag == "generic":
            out.append(random_matrix(K, s))
        elif tag == "non-SLS":
            # the first unconstrained draw in a seed chain that leaves SLS
            j = 0
            while True:
                m = random_matrix(K, sample_seed(s, K, "non-SLS", j))
                if not classify(m).in_sls:
                    out.append(m)
                    break
                j += 1
        else:
            out.append(random_in_regime(K, tag, s))
    return out


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _collect(name: str, K: int, items: Sequence, check: Callable, threads: int,
             ceiling: str | None = None) -> SuiteResult:
    """Run ``check(item) -> (checked, failures, observed)`` over items in order."""
    res = SuiteResult(name, K, ceiling=ceiling)
    for checked, failures, observed in _map(check, items, threads):
        res.checked += checked
        res.failures.extend(failures)
        if observed is not None and (res.observed is None or observed > res.observed):
            res.observed = observed
    return res


# network

def regime_nesting(K, samples, seed, threads=1) -> SuiteResult:
    def check(m):
        r = classify(m)
        bad = []
        if r != classify(m):
            bad.append(Failure("classify is not deterministic", m))
        if r.in_tin and not r.in_ctin:
            bad.append(Failure("TIN member outside CTIN", m))
        if r.in_ctin and not r.in_sls:
            bad.append(Failure("CTIN member outside SLS", m))
        if r.in_strict_sls and not r.in_sls:
            bad.append(Failure("strict-SLS member outside SLS", m))
        return 1, bad, None
    items = corpus(K, "generic", samples, seed)
    for tag in REGIMES:
        items += corpus(K, tag, max(1, samples // 10), seed)
    return _collect("regime-nesting", K, items, check, threads)


def delta_triangle(K, samples, seed, threads=1) -> SuiteResult:
    """In SLS, ``delta(k,i) + delta(i,j) >= delta(k,j)`` for every triple."""
    def check(m):
        bad = []
        n = 0
        for k, i, j in itertools.product(range(1, K + 1), repeat=3):
            n += 1
            if delta(m, k, i) + delta(m, i, j) < delta(m, k, j):
                bad.append(Failure(f"delta triangle fails at k={k}, i={i}, j={j}", m))
                break
        return n, bad, None
    return _collect("delta-triangle", K, corpus(K, "SLS", samples, seed), check, threads)


# cycles

def cycle_identity(K, samples, seed, threads=1) -> SuiteResult:
    """Sum of direct strengths minus cycle weight equals the cycle's Delta."""
    cycles = enumerate_cycles(range(1, K + 1))

    def check(m):
        A, D = m.scaled
        bad = []
        for c in cycles:
            if c.trivial:
                continue
            diag = sum(m[u, u] for u in c.users)
            w = sum(m[b, a] for a, b in c.links())
            if diag - w != Fraction(scaled_delta(A, c.users), D):
                bad.append(Failure(f"identity fails on {c}", m))
                break
        return len(cycles), bad, None
    return _collect("cycle-identity", K, corpus(K, "generic", samples, seed), check, threads)


def _disjoint_groups(cycles: list[Cycle], size: int) -> Iterable[tuple[Cycle, ...]]:
    """Ordered groups of disjoint cycles, one per distinct cyclic order."""
    masks = [sum(1 << u for u in c.users) for c in cycles]

    def extend(start: int, used: int, group: tuple[Cycle, ...]):
        if len(group) == size:
            first, rest = group[0], group[1:]
            for perm in itertools.permutations(rest):
                yield (first,) + perm
            return
        for t in range(start, len(cycles)):
            if not masks[t] & used:
                yield from extend(t + 1, used | masks[t], group + (cycles[t],))

    yield from extend(0, 0, ())


def combination_inequality(K, samples, seed, threads=1) -> SuiteResult:
    """Delta of a combined cycle <= sum of parts' Deltas + Delta of the heads cycle."""
    cycles = enumerate_cycles(range(1, K + 1))
    groups = [g for size in (2, 3) if size <= K for g in _disjoint_groups(cycles, size)]
    prepared = [(combine(g).users, [c.users for c in g], heads_cycle(g).users) for g in groups]

    def check(m):
        A, _ = m.scaled
        for comb, parts, heads in prepared:
            lhs = scaled_delta(A, comb)
            rhs = sum(scaled_delta(A, p) for p in parts) + scaled_delta(A, heads)
            if lhs > rhs:
                names = ", ".join(str(Cycle(p)) for p in parts)
                return len(prepared), [Failure(f"combination inequality fails for {names}", m)], None
        return len(prepared), [], None
    return _collect("combination-inequality", K, corpus(K, "SLS", samples, seed), check, threads)


def ctin_floor(K, samples, seed, threads=1) -> SuiteResult:
    """In CTIN every cycle's Delta is at least its largest direct strength."""
    cycles = [c.users for c in enumerate_cycles(range(1, K + 1))]

    def check(m):
        A, _ = m.scaled
        for users in cycles:
            if scaled_delta(A, users) < max(A[u - 1][u - 1] for u in users):
                return len(cycles), [Failure(f"Delta below max direct strength on {Cycle(users)}", m)], None
        return len(cycles), [], None
    return _collect("ctin-floor", K, corpus(K, "CTIN", samples, seed), check, threads)


def partition_count(K, samples=0, seed=0, threads=1) -> SuiteResult:
    res = SuiteResult("partition-count", K)
    for n in range(1, min(K, 6) + 1):
        res.checked += 1
        got = sum(1 for _ in enumerate_partitions(range(1, n + 1)))
        if got != math.factorial(n):
            res.failures.append(Failure(f"{got} cyclic partitions of {n} users, expected {n}!"))
    return res


# polyhedral TIN

def _random_subsets(K: int, seed: int, count: int) -> list[tuple[int, ...]]:
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for _ in range(count):
        mask = 0
        while mask == 0:
            mask = int(rng.integers(1, 2 ** K))
        out.append(tuple(u + 1 for u in range(K) if mask >> u & 1))
    return out


def oracle_equivalence(K, samples, seed, threads=1) -> SuiteResult:
    """Assignment value equals the simplex optimum on [K] and random subsets."""
    if K > ORACLE_K_CAP:
        return SuiteResult("oracle-equivalence", K, skipped=f"K > {ORACLE_K_CAP}")
    items = list(enumerate(corpus(K, "strict-SLS", samples, seed)))

    def check(item):
        i, m = item
        sets = [tuple(range(1, K + 1))] + _random_subsets(
            K, sample_seed(seed, K, "subsets", i), SUBSETS_PER_SAMPLE)
        for S in sets:
            a, b = ptin_sum(m, S, sls=True).value, ptin_sum_oracle(m, S)
            if a != b:
                return len(sets), [Failure(f"S={list(S)}: assignment {a} != simplex {b}", m)], None
        return len(sets), [], None
    return _collect("oracle-equivalence", K, items, check, threads)


def partition_attainment(K, samples, seed, threads=1) -> SuiteResult:
    """The returned partition sums to the value and an LP optimum attains it."""
    if K > ORACLE_K_CAP:
        return SuiteResult("partition-attainment", K, skipped=f"K > {ORACLE_K_CAP}")

    def check(m):
        r = ptin_sum(m, sls=True)
        A, D = m.scaled
        bad = []
        if Fraction(sum(scaled_delta(A, c.users) for c in r.partition.cycles), D) != r.value:
            bad.append(Failure("partition Deltas do not sum to the value", m))
        sol = solve_lp1(m)
        if sol.point.total() != r.value or not ptin_check(m, range(1, K + 1), sol.point).feasible:
            bad.append(Failure("no feasible GDoF point attains the value", m))
        return 1, bad, None
    return _collect("partition-attainment", K, corpus(K, "SLS", samples, seed), check, threads)


def outside_sls_direction(K, samples, seed, threads=1) -> SuiteResult:
    """Outside SLS the assignment value still bounds the LP optimum from above."""
    if K > ORACLE_K_CAP:
        return SuiteResult("outside-sls-direction", K, skipped=f"K > {ORACLE_K_CAP}")

    def check(m):
        a = ptin_sum(m, sls=False).value
        try:
            b = ptin_sum_oracle(m)
        except InfeasibleError:
            # empty region: the optimum is minus infinity
            return 1, [], None
        if a < b:
            return 1, [Failure(f"assignment {a} below simplex {b}", m)], None
        return 1, [], None
    return _collect("outside-sls-direction", K, corpus(K, "non-SLS", samples, seed), check, threads)


def trivial_merge(K, samples, seed, threads=1) -> SuiteResult:
    """Fusing trivial cycles leaves at most one and keeps the Delta sum."""
    def check(m):
        r = ptin_sum(m, sls=True)
        merged = merge_trivial(r.partition)
        A, D = m.scaled
        total = Fraction(sum(scaled_delta(A, c.users) for c in merged.cycles), D)
        bad = []
        if sum(1 for c in merged.cycles if c.trivial) > 1:
            bad.append(Failure(f"{merged} keeps several trivial cycles", m))
        if total != r.value:
            bad.append(Failure(f"merge changed the Delta sum from {r.value} to {total}", m))
        return 1, bad, None
    return _collect("trivial-merge", K, corpus(K, "SLS", samples, seed), check, threads)


def slackness(K, samples, seed, threads=1) -> SuiteResult:
    """Complementary slackness between LP optima and cycle duals.

    Over-covered users get zero GDoF and every cycle with positive weight
    is tight, both for the simplex duals and for the assignment partition.
    """
    if K > ORACLE_K_CAP:
        return SuiteResult("slackness", K, skipped=f"K > {ORACLE_K_CAP}")

    def check(m):
        sol = solve_lp1(m)
        A, D = m.scaled
        bad = []
        certs = [("simplex", DualCertificate(sol.lambdas)),
                 ("assignment", ptin_sum(m, sls=True).certificate)]
        for label, cert in certs:
            for u, cov in cert.coverage().items():
                if cov > 1 and sol.point[u] != 0:
                    bad.append(Failure(f"{label}: user {u} over-covered but d={sol.point[u]}", m))
            for c, lam in cert.lambdas:
                load = sum(sol.point[u] for u in c.users)
                if lam > 0 and load != Fraction(scaled_delta(A, c.users), D):
                    bad.append(Failure(f"{label}: cycle {c} has weight {lam} but is slack", m))
        return 1, bad[:1], None
    return _collect("slackness", K, corpus(K, "strict-SLS", samples, seed), check, threads)


def covering_equality(K, samples, seed, threads=1) -> SuiteResult:
    """The covering dual's optimum equals the exact-cover (assignment) optimum."""
    if K > ORACLE_K_CAP:
        return SuiteResult("covering-equality", K, skipped=f"K > {ORACLE_K_CAP}")

    def check(m):
        sol = solve_lp1(m)
        A, D = m.scaled
        cert = DualCertificate(sol.lambdas)
        lp2 = sum((lam * Fraction(scaled_delta(A, c.users), D) for c, lam in sol.lambdas), Fraction(0))
        cov = cert.coverage()
        bad = []
        if any(cov.get(u, 0) < 1 for u in range(1, K + 1)):
            bad.append(Failure("simplex duals do not cover every user", m))
        if lp2 != ptin_sum(m, sls=True).value:
            bad.append(Failure(f"covering optimum {lp2} differs from exact cover optimum", m))
        return 1, bad, None
    return _collect("covering-equality", K, corpus(K, "strict-SLS", samples, seed), check, threads)


def non_monotone_witness(K=2, samples=0, seed=0, threads=1) -> SuiteResult:
    res = SuiteResult("non-monotone-witness", K, checked=1)
    ones = symmetric_network(2, 1)
    one, both = ptin_sum(ones, [1]).value, ptin_sum(ones, [1, 2]).value
    if not (one == 1 and both == 0):
        res.failures.append(Failure(f"expected P-TIN({{1}})=1 > P-TIN({{1,2}})=0, got {one}, {both}", ones))
    return res


# broadcast ratios

def _ratio_suite(name: str, tag: str, ceiling: Fraction, label: str):
    def suite(K, samples, seed, threads=1) -> SuiteResult:
        def check(m):
            r = bc.bc_sum_upper(m).value / tina_value(m)
            if r > ceiling:
                return 1, [Failure(f"ratio {r} exceeds {label}", m)], r
            return 1, [], r
        return _collect(name, K, corpus(K, tag, samples, seed), check, threads, label)
    return suite


def ratio_tin(K, samples, seed, threads=1) -> SuiteResult:
    return _ratio_suite("ratio-tin", "TIN", Fraction(3, 2), "3/2")(K, samples, seed, threads)


def ratio_ctin(K, samples, seed, threads=1) -> SuiteResult:
    c = 2 - Fraction(1, K)
    return _ratio_suite("ratio-ctin", "CTIN", c, str(c))(K, samples, seed, threads)


def within_log_ceiling(r: Fraction, K: int) -> bool:
    """Exact test of ``r <= 2 + log2(K - 1)``, i.e. ``2**(r - 2) <= K - 1``."""
    e = r - 2
    if e <= 0:
        return True
    return 2 ** e.numerator <= (K - 1) ** e.denominator


def ratio_sls(K, samples, seed, threads=1) -> SuiteResult:
    """Staged bound over TINA stays within ``2 + log2(K-1)``; the minimum never exceeds it."""
    label = f"2+log2({K - 1})"

    def check(m):
        it = bc.iterative_bound(m)
        up = bc.bc_sum_upper(m)
        tina = tina_value(m)
        r = it.value / tina
        bad = []
        if not within_log_ceiling(r, K):
            bad.append(Failure(f"staged ratio {r} exceeds {label}", m))
        if not within_log_ceiling(it.extras["chain_bound"] / tina, K):
            bad.append(Failure("chain constant exceeds the logarithmic ceiling", m))
        if up.value > it.value:
            bad.append(Failure(f"minimum bound {up.value} above staged bound {it.value}", m))
        ns = [s.N for s in it.trace]
        for a, b in zip(ns, ns[1:]):
            if 2 * b > a + 1:
                bad.append(Failure(f"stage sizes {ns} do not halve", m))
        return 1, bad, r
    return _collect("ratio-sls", K, corpus(K, "SLS", samples, seed), check, threads, label)


# schemes and generator families

def _companions(K: int) -> list[tuple[ChannelMatrix, schemes.LayeredScheme]]:
    pairs = [(ctin_cyclic_network(K), schemes.ctin_bc_scheme(K))]
    for a in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
        pairs.append((symmetric_network(K, a), schemes.symmetric_bc_scheme(K, a)))
    if K & (K - 1) == 0:
        n = K.bit_length() - 1
        pairs.append((tree_network(n), schemes.tree_bc_scheme(n)))
    return pairs


def scheme_soundness(K, samples=0, seed=0, threads=1) -> SuiteResult:
    """Generated schemes verify, never beat the converse, and behave monotonically."""
    res = SuiteResult("scheme-soundness", K)
    for m, s in _companions(K):
        res.checked += 1
        v = schemes.verify_scheme(m, s)
        if not v.ok:
            res.failures.append(Failure(f"{s.name} does not verify", m))
            continue
        up = bc.bc_sum_upper(m).value
        if v.total > up:
            res.failures.append(Failure(f"{s.name} total {v.total} exceeds bound {up}", m))
        for f in _monotone_failures(m, s, v):
            res.failures.append(Failure(f"{s.name}: {f}", m))
    return res


def _with_gdof(s: schemes.LayeredScheme, mid: str, g: Fraction) -> schemes.LayeredScheme:
    msgs = tuple(schemes.Message(x.id, x.antennas, x.power, g, x.audience) if x.id == mid else x
                 for x in s.messages)
    return schemes.LayeredScheme(msgs, s.decode_order, s.name)


def _monotone_failures(m, s, v) -> list[str]:
    out = []
    for msg in s.messages:
        if msg.gdof > 0:
            if not schemes.verify_scheme(m, _with_gdof(s, msg.id, msg.gdof / 2)).ok:
                out.append(f"lowering {msg.id} broke the scheme")
        slacks = {r.receiver: min((st.slack for st in r.steps if st.message == msg.id), default=None)
                  for r in v.receivers}
        slacks = {k: x for k, x in slacks.items() if x is not None}
        if not slacks:
            continue
        ordered = sorted(set(slacks.values()))
        lowest = ordered[0]
        # step past the minimum slack but stay below the next one
        eps = (ordered[1] - lowest) / 2 if len(ordered) > 1 else Fraction(1)
        bumped = schemes.verify_scheme(m, _with_gdof(s, msg.id, msg.gdof + lowest + eps))
        broken = {r.receiver for r in bumped.receivers if not r.ok}
        expected = {k for k, x in slacks.items() if x == lowest}
        if broken != expected:
            out.append(f"raising {msg.id} broke receivers {sorted(broken)}, expected {sorted(expected)}")
    return out


def cyclic_membership(K, samples=0, seed=0, threads=1) -> SuiteResult:
    res = SuiteResult("cyclic-membership", K)
    m = ctin_cyclic_network(K)
    for j in range(2, K + 1):
        res.checked += 1
        if m[1, j] + m[j, 1] != K:
            res.failures.append(Failure(f"alpha_1{j} + alpha_{j}1 != K", m))
    for j, k in itertools.product(range(1, K + 1), repeat=2):
        res.checked += 1
        if ((k - j) % K) - (k - j) < 0:
            res.failures.append(Failure(f"modular inequality fails at j={j}, k={k}", m))
    res.checked += 1
    if not classify(m).in_ctin:
        res.failures.append(Failure("cyclic network is not CTIN", m))
    return res


def tree_recursion(K, samples=0, seed=0, threads=1) -> SuiteResult:
    """Both halves of tree(n, nu) equal tree(n-1, nu/2)."""
    res = SuiteResult("tree-recursion", K)
    for n in range(2, max(2, K.bit_length()) + 1):
        for nu in (Fraction(1), Fraction(1, 2), Fraction(1, 3)):
            t, half = tree_network(n, nu), tree_network(n - 1, nu / 2)
            h = 2 ** (n - 1)
            for base in (0, h):
                res.checked += 1
                sub = t.submatrix(range(base + 1, base + h + 1))
                if sub.alpha != half.alpha:
                    res.failures.append(Failure(f"half of tree({n},{nu}) differs from tree({n - 1},{nu / 2})", t))
            res.checked += 1
            if not classify(t).in_sls:
                res.failures.append(Failure(f"tree({n},{nu}) is not SLS", t))
    return res


SUITES: list[tuple[str, Callable]] = [
    ("regime-nesting", regime_nesting),
    ("delta-triangle", delta_triangle),
    ("cycle-identity", cycle_identity),
    ("combination-inequality", combination_inequality),
    ("ctin-floor", ctin_floor),
    ("partition-count", partition_count),
    ("oracle-equivalence", oracle_equivalence),
    ("partition-attainment", partition_attainment),
    ("outside-sls-direction", outside_sls_direction),
    ("trivial-merge", trivial_merge),
    ("slackness", slackness),
    ("covering-equality", covering_equality),
    ("non-monotone-witness", non_monotone_witness),
    ("ratio-tin", ratio_tin),
    ("ratio-ctin", ratio_ctin),
    ("ratio-sls", ratio_sls),
    ("scheme-soundness", scheme_soundness),
    ("cyclic-membership", cyclic_membership),
    ("tree-recursion", tree_recursion),
]

# suites whose per-sample cost grows fast enough to deserve a smaller corpus
_LIGHT = {"combination-inequality": 10}


def run_suites(Ks: Iterable[int], samples: int, seed: int, threads: int | None = None,
               only: Iterable[str] | None = None) -> list[SuiteResult]:
    threads = worker_count() if threads is None else threads
    wanted = None if only is None else set(only)
    out = []
    for K in Ks:
        for name, fn in SUITES:
            if wanted is not None and name not in wanted:
                continue
            n = max(1, samples // _LIGHT[name]) if name in _LIGHT else samples
            out.append(fn(K, n, seed, threads))
    return out


def summary_table(results: Sequence[SuiteResult]) -> str:
    rows = [("suite", "K", "checked", "status", "max ratio", "ceiling")]
    for r in results:
        status = "skipped" if r.skipped else ("pass" if r.ok else f"FAIL ({len(r.failures)})")
        rows.append((r.name, str(r.K), str(r.checked), status,
                     "" if r.observed is None else str(r.observed), r.ceiling or ""))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows)
