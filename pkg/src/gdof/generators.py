"""Network families and seeded random networks inside a requested regime.

Random matrices come from numpy's PCG64 bit generator seeded with the
caller's 64-bit seed.  Cross entries are integers over the denominator
1024, drawn uniformly from a box; the diagonal is 1.  Boxes are screened in
vectorized batches and the first hit is confirmed by ``classify``.  This
is rejection from a box, not uniform sampling of the regime polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GdofError
from .network import ChannelMatrix, classify

DENOMINATOR = 1024
REJECTION_LIMIT = 10_000
REGIMES = ("TIN", "CTIN", "SLS", "strict-SLS")


def _rows(K: int, f) -> list[list[Fraction]]:
    return [[Fraction(f(i, j)) for j in range(1, K + 1)] for i in range(1, K + 1)]


def symmetric_network(K: int, a) -> ChannelMatrix:
    """Unit direct links and every cross link at strength ``a``."""
    a = Fraction(a)
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if a < 0:
        raise ValueError(f"cross strength must be nonnegative, got {a}")
    return ChannelMatrix.from_rows(_rows(K, lambda i, j: 1 if i == j else a),
                                   name=f"symmetric(K={K}, a={a})")


def ctin_cyclic_network(K: int) -> ChannelMatrix:
    """Direct strength K; receiver i hears transmitter j at ``(j - i) mod K``."""
    if K < 2:
        raise ValueError(f"the cyclic network needs K >= 2, got {K}")
    return ChannelMatrix.from_rows(_rows(K, lambda i, j: K if i == j else (j - i) % K),
                                   name=f"cyclic(K={K})")


@dataclass(frozen=True)
class TreeSpec:
    n: int
    nu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.n < 1:
            raise ValueError(f"tree depth must be at least 1, got {self.n}")
        if not 0 <= self.nu <= 1:
            raise ValueError(f"nu must lie in [0, 1], got {self.nu}")

    @property
    def K(self) -> int:
        return 2 ** self.n

    def ancestor_height(self, i: int, j: int) -> int:
        """Levels up to the closest common ancestor of leaves i and j (1-based)."""
        return ((i - 1) ^ (j - 1)).bit_length()

    def delta(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        p = self.ancestor_height(i, j)
        return Fraction(2 ** (p - 1), self.K) * self.nu


def tree_network(n: int, nu=1) -> ChannelMatrix:
    """Binary-tree network on ``2**n`` users: ``alpha_ij = 1 - delta_ij``."""
    spec = TreeSpec(n, nu)
    return ChannelMatrix.from_rows(
        _rows(spec.K, lambda i, j: 1 - spec.delta(i, j)),
        name=f"tree(n={n}, nu={spec.nu})")


def fig1_network() -> ChannelMatrix:
    """The three-user TIN example with a 20% cooperation gain."""
    F = Fraction
    return ChannelMatrix.from_rows(
        [[F(2), F(1, 5), F(1)], [F(1, 2), F(1), F(1, 2)], [F(1, 10), F(1, 2), F(3, 2)]],
        name="fig1")


def half_cross_network(K: int = 2) -> ChannelMatrix:
    """Users 1 and 2 cross at 1/2; any further users are isolated unit links."""
    if K < 2:
        raise ValueError(f"the half-cross network needs K >= 2, got {K}")
    half = Fraction(1, 2)

    def entry(i, j):
        if i == j:
            return 1
        return half if {i, j} == {1, 2} else 0

    return ChannelMatrix.from_rows(_rows(K, entry), name=f"half-cross(K={K})")


class _Screen:
    """Vectorized regime tests on a batch of integer matrices (B, K, K)."""

    def __init__(self, K: int):
        idx = [(i, j, k) for i in range(K) for j in range(K) for k in range(K)
               if j != i and k != i]
        self.I, self.J, self.Kk = (np.array(t, dtype=np.intp) for t in zip(*idx))

    def __call__(self, A: np.ndarray, regime: str) -> np.ndarray:
        I, J, Kk = self.I, self.J, self.Kk
        aii = A[:, I, I]
        aij, aji = A[:, I, J], A[:, J, I]
        aik, aki, ajk = A[:, I, Kk], A[:, Kk, I], A[:, J, Kk]
        if regime == "TIN":
            ok = aii >= aij + aki
        elif regime == "CTIN":
            ok = (aii >= aij + aji) & (aii >= aik + aji - ajk)
        else:
            cross = aik + aji - ajk
            if regime == "SLS":
                ok = (aii >= aij) & (aii >= aki) & (aii >= cross)
            else:
                ok = (aii > aij) & (aii > aki) & (aii > cross)
        return ok.all(axis=1)


def _membership(m: ChannelMatrix, regime: str) -> bool:
    r = classify(m)
    return {"TIN": r.in_tin, "CTIN": r.in_ctin, "SLS": r.in_sls,
            "strict-SLS": r.in_strict_sls}[regime]


def random_in_regime(K: int, regime: str, seed: int) -> ChannelMatrix:
    """Seeded random matrix in ``regime`` with cross entries in multiples of 1/1024.

    TIN draws come from [0, 1/2] and always qualify.  The other regimes
    draw from [0, 1] and reject; after every 10,000 rejections the box
    halves.  Once it reaches [0, 1/2] every draw is in TIN and hence in
    CTIN and SLS; strict-SLS can only fail there on boundary draws, and
    never once the box is below 1/2.  So the loop always terminates.
    """
    if regime not in REGIMES:
        raise GdofError(f"unsupported regime {regime!r}; expected one of {', '.join(REGIMES)}")
    if K < 2:
        raise ValueError(f"random networks need K >= 2, got {K}")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    hi = DENOMINATOR // 2 if regime == "TIN" else DENOMINATOR
    screen = _Screen(K)
    diag = np.eye(K, dtype=bool)
    rejected = 0
    batch = 16
    while True:
        size = min(batch, REJECTION_LIMIT - rejected)
        A = rng.integers(0, hi + 1, size=(size, K, K), dtype=np.int64)
        A[:, diag] = DENOMINATOR
        hits = np.flatnonzero(screen(A, regime))
        for h in hits:
            rows = [[Fraction(int(x), DENOMINATOR) for x in row] for row in A[h]]
            m = ChannelMatrix.from_rows(rows, name=f"random(K={K}, regime={regime}, seed={seed})")
            if _membership(m, regime):
                return m
        rejected += size
        batch = min(batch * 4, 4096)
        if rejected >= REJECTION_LIMIT:
            rejected = 0
            batch = 16
            hi = max(hi // 2, 1)
