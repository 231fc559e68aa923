"""Cycles of users, their weights and Delta values, and cyclic partitions.

A cycle ``(i1→i2→…→iM)`` contains the desired links of its users and the
interfering links ``i_m → i_{m+1}`` (transmitter ``i_m`` heard at receiver
``i_{m+1}``), wrapping around.  Cycles are stored rotated so that the
smallest user leads; direction is significant.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, CycleError
from .network import ChannelMatrix

PARTITION_CAP = 10


@dataclass(frozen=True, order=True)
class Cycle:
    users: tuple[int, ...]

    def __post_init__(self):
        users = tuple(self.users)
        if not users:
            raise CycleError("a cycle needs at least one user")
        if len(set(users)) != len(users):
            raise CycleError(f"repeated user in cycle {users}")
        if any(not isinstance(u, int) or u < 1 for u in users):
            raise CycleError(f"user indices must be positive integers: {users}")
        h = users.index(min(users))
        object.__setattr__(self, "users", users[h:] + users[:h])

    @classmethod
    def of(cls, *users: int) -> "Cycle":
        return cls(tuple(users))

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self) -> Iterator[int]:
        return iter(self.users)

    @property
    def head(self) -> int:
        return self.users[0]

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.users)

    @property
    def trivial(self) -> bool:
        return len(self.users) == 1

    def links(self) -> Iterator[tuple[int, int]]:
        """Interfering links as (transmitter, receiver) pairs."""
        u = self.users
        if len(u) == 1:
            return iter(())
        return zip(u, u[1:] + u[:1])

    def sort_key(self):
        return (len(self.users), self.users)

    def __str__(self) -> str:
        return "(" + "→".join(map(str, self.users)) + ")"


@dataclass(frozen=True)
class CyclicPartition:
    cycles: frozenset[Cycle]
    ground_set: frozenset[int]

    def __post_init__(self):
        cycles = frozenset(self.cycles)
        seen: set[int] = set()
        for c in cycles:
            if seen & c.members:
                raise CycleError(f"cycles overlap on {sorted(seen & c.members)}")
            seen |= c.members
        ground = frozenset(self.ground_set)
        if seen != ground:
            raise CycleError(
                f"cycles cover {sorted(seen)} but the ground set is {sorted(ground)}")
        object.__setattr__(self, "cycles", cycles)
        object.__setattr__(self, "ground_set", ground)

    @classmethod
    def of(cls, cycles: Iterable[Cycle]) -> "CyclicPartition":
        cycles = list(cycles)
        return cls(frozenset(cycles), frozenset(u for c in cycles for u in c.users))

    def ordered(self) -> list[Cycle]:
        """Cycles sorted by head."""
        return sorted(self.cycles, key=lambda c: c.head)

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self) -> Iterator[Cycle]:
        return iter(self.ordered())

    def __str__(self) -> str:
        return "{" + ",".join(str(c) for c in self.ordered()) + "}"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")
_ARROW_RE = re.compile(r"\s*(?:→|->)\s*")


def parse_cycle(text: str) -> Cycle:
    """Inverse of ``str(cycle)``; ``->`` is accepted as an ASCII arrow."""
    s = text.strip()
    m = _CYCLE_RE.fullmatch(s)
    if not m:
        raise CycleError(f"not a cycle: {text!r}")
    parts = [p for p in _ARROW_RE.split(m.group(1).strip())]
    try:
        return Cycle(tuple(int(p) for p in parts))
    except ValueError:
        raise CycleError(f"not a cycle: {text!r}") from None


def parse_partition(text: str) -> CyclicPartition:
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise CycleError(f"not a partition: {text!r}")
    inner = s[1:-1]
    cycles = [parse_cycle(m.group(0)) for m in _CYCLE_RE.finditer(inner)]
    leftover = _CYCLE_RE.sub("", inner).replace(",", "").strip()
    if leftover or not cycles:
        raise CycleError(f"not a partition: {text!r}")
    return CyclicPartition.of(cycles)


def _check(m: ChannelMatrix, c: Cycle) -> None:
    for u in c.users:
        m.check_index(u)


def scaled_weight(A, users: Sequence[int]) -> int:
    """Cycle weight on an integer matrix; users are 1-based."""
    n = len(users)
    if n == 1:
        return 0
    return sum(A[users[(t + 1) % n] - 1][users[t] - 1] for t in range(n))


def scaled_delta(A, users: Sequence[int]) -> int:
    n = len(users)
    if n == 1:
        u = users[0] - 1
        return A[u][u]
    return sum(A[u - 1][u - 1] for u in users) - scaled_weight(A, users)


def weight(m: ChannelMatrix, c: Cycle) -> Fraction:
    """Sum of the interfering-link strengths around the cycle."""
    _check(m, c)
    A, D = m.scaled
    return Fraction(scaled_weight(A, c.users), D)


def cycle_delta(m: ChannelMatrix, c: Cycle) -> Fraction:
    """Sum of ``delta(i_m, i_{m+1})`` around the cycle; ``alpha_ii`` if trivial."""
    _check(m, c)
    A, D = m.scaled
    return Fraction(scaled_delta(A, c.users), D)


@dataclass(frozen=True)
class CycleStats:
    weight: Fraction
    delta: Fraction


def cycle_stats(m: ChannelMatrix, c: Cycle) -> CycleStats:
    return CycleStats(weight(m, c), cycle_delta(m, c))


def combine(cs: Sequence[Cycle]) -> Cycle:
    """Concatenate disjoint cycles, each read from its head, into one cycle."""
    cs = list(cs)
    if len(cs) < 2:
        raise CycleError("combining needs at least two cycles")
    seen: set[int] = set()
    users: list[int] = []
    for c in cs:
        if seen & c.members:
            raise CycleError(f"cycles overlap on {sorted(seen & c.members)}")
        seen |= c.members
        users.extend(c.users)
    return Cycle(tuple(users))


def heads_cycle(cs: Sequence[Cycle]) -> Cycle:
    return Cycle(tuple(c.head for c in cs))


def _normalize_set(S: Iterable[int]) -> list[int]:
    users = sorted(set(S))
    if not users:
        raise CycleError("user set must be nonempty")
    return users


def iter_cycles(S: Iterable[int]) -> Iterator[Cycle]:
    """Cycles on subsets of S, by length then lexicographic."""
    users = _normalize_set(S)
    for M in range(1, len(users) + 1):
        batch = []
        for combo in itertools.combinations(users, M):
            head, rest = combo[0], combo[1:]
            for perm in itertools.permutations(rest):
                batch.append((head,) + perm)
        batch.sort()
        for t in batch:
            yield Cycle(t)


def enumerate_cycles(S: Iterable[int]) -> list[Cycle]:
    """Every cycle whose users lie in S, trivial cycles included."""
    return list(iter_cycles(S))


def count_cycles(n: int) -> int:
    return sum(math.comb(n, M) * math.factorial(M - 1) for M in range(1, n + 1))


class PartitionEnumeration:
    """Restartable sequence of all cyclic partitions of a user set.

    Partitions are produced recursively: the smallest remaining user heads
    a cycle whose tail is chosen in lexicographic order, and the rest of the
    set is partitioned the same way.
    """

    def __init__(self, S: Iterable[int], cap: int = PARTITION_CAP):
        self.users = tuple(_normalize_set(S))
        if len(self.users) > cap:
            raise CapExceeded(
                f"{len(self.users)} users exceed the partition enumeration cap of {cap}")

    def __len__(self) -> int:
        return math.factorial(len(self.users))

    def __iter__(self) -> Iterator[CyclicPartition]:
        ground = frozenset(self.users)
        for cycles in self._gen(self.users):
            yield CyclicPartition(frozenset(cycles), ground)

    def _gen(self, remaining: tuple[int, ...]):
        if not remaining:
            yield []
            return
        head, others = remaining[0], remaining[1:]
        for M in range(0, len(others) + 1):
            for combo in itertools.combinations(others, M):
                rest = tuple(u for u in others if u not in combo)
                for perm in itertools.permutations(combo):
                    c = Cycle((head,) + perm)
                    for tail in self._gen(rest):
                        yield [c] + tail


def enumerate_partitions(S: Iterable[int], cap: int = PARTITION_CAP) -> PartitionEnumeration:
    return PartitionEnumeration(S, cap)


def partition_delta(m: ChannelMatrix, p: CyclicPartition) -> Fraction:
    return sum((cycle_delta(m, c) for c in p.cycles), Fraction(0))


def merge_trivial(p: CyclicPartition) -> CyclicPartition:
    """Fuse all trivial cycles into one combined cycle (ascending users).

    With at most one trivial cycle the partition is returned unchanged.
    """
    trivial = sorted((c for c in p.cycles if c.trivial), key=lambda c: c.head)
    if len(trivial) <= 1:
        return p
    rest = [c for c in p.cycles if not c.trivial]
    return CyclicPartition(frozenset(rest + [combine(trivial)]), p.ground_set)
