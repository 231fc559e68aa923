"""Channel-strength matrices, the delta calculus and regime classification.

Every value is an exact :class:`fractions.Fraction`.  User indices in the
public API are 1-based, matching the usual ``alpha[i][j]`` notation where
``alpha[i][j]`` is the strength from transmitter ``j`` to receiver ``i``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import IndexRangeError, NetworkFormatError

Rational = Fraction

QUANTIFIER_READING = "i not in {j,k}; j = k admitted"

_FRACTION_RE = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a finite decimal such as ``"0.25"`` exactly."""
    if not isinstance(text, str):
        raise ValueError(f"expected a number string, got {type(text).__name__}")
    s = text.strip()
    if _FRACTION_RE.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    if _DECIMAL_RE.match(s):
        return Fraction(s)
    raise ValueError(f"not a fraction or finite decimal: {text!r}")


def format_rational(x: Fraction, decimal: bool = False) -> str:
    x = Fraction(x)
    s = str(x)
    if decimal:
        # round half away from zero at 6 digits, without leaving Fraction
        q = abs(x) * 10 ** 6
        r = int(q + Fraction(1, 2))
        sign = "-" if x < 0 and r else ""
        s += f" (≈{sign}{r // 10 ** 6}.{r % 10 ** 6:06d})"
    return s


def _label(i: int, j: int) -> str:
    # 1-based; a separator is needed once indices reach two digits
    if i < 10 and j < 10:
        return f"α{i}{j}"
    return f"α{i},{j}"


@dataclass(frozen=True)
class ChannelMatrix:
    """K x K matrix of channel-strength exponents, all entries >= 0."""

    alpha: tuple[tuple[Fraction, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.alpha)
        K = len(rows)
        if K == 0:
            raise NetworkFormatError("matrix must have at least one row")
        for r, row in enumerate(rows, 1):
            if len(row) != K:
                raise NetworkFormatError(
                    f"expected {K} entries, found {len(row)}", row=r)
            for c, x in enumerate(row, 1):
                if x < 0:
                    raise NetworkFormatError(f"negative entry {x}", row=r, col=c)
        object.__setattr__(self, "alpha", rows)

    @classmethod
    def from_rows(cls, rows, name=None) -> "ChannelMatrix":
        """Build from nested sequences of ints, Fractions or number strings."""
        conv = [[parse_rational(x) if isinstance(x, str) else Fraction(x)
                 for x in row] for row in rows]
        return cls(tuple(tuple(r) for r in conv), name=name)

    @property
    def K(self) -> int:
        return len(self.alpha)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        self.check_index(i)
        self.check_index(j)
        return self.alpha[i - 1][j - 1]

    def check_index(self, i: int) -> None:
        if not isinstance(i, int) or not 1 <= i <= self.K:
            raise IndexRangeError(f"user index {i!r} outside 1..{self.K}")

    @cached_property
    def scaled(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        """Integer matrix ``A`` and denominator ``D`` with ``alpha = A / D``.

        Every quantity the solvers compute is linear in alpha, so the hot
        paths run on these integers and divide by ``D`` once at the end.
        """
        D = 1
        for row in self.alpha:
            for x in row:
                D = math.lcm(D, x.denominator)
        A = tuple(tuple(x.numerator * (D // x.denominator) for x in row)
                  for row in self.alpha)
        return A, D

    def submatrix(self, users) -> "ChannelMatrix":
        """Restriction to ``users`` (1-based, in the given order)."""
        idx = [u - 1 for u in users]
        for u in users:
            self.check_index(u)
        return ChannelMatrix(tuple(tuple(self.alpha[i][j] for j in idx) for i in idx))

    def to_json(self) -> dict:
        out = {}
        if self.name is not None:
            out["name"] = self.name
        out["K"] = self.K
        out["alpha"] = [[str(x) for x in row] for row in self.alpha]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)


def parse_network(text) -> ChannelMatrix:
    """Parse the canonical JSON network format (bytes or str)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NetworkFormatError(f"input is not UTF-8: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict) or "alpha" not in obj:
        raise NetworkFormatError('expected an object with key "alpha"')
    rows = obj["alpha"]
    if not isinstance(rows, list) or not rows:
        raise NetworkFormatError('"alpha" must be a non-empty array of rows')
    K = len(rows)
    alpha = []
    for r, row in enumerate(rows, 1):
        if not isinstance(row, list):
            raise NetworkFormatError("row is not an array", row=r)
        if len(row) != K:
            raise NetworkFormatError(
                f"matrix is not square: {len(row)} entries, expected {K}", row=r)
        parsed = []
        for c, x in enumerate(row, 1):
            if not isinstance(x, str):
                raise NetworkFormatError(
                    "entries must be strings such as \"1/2\" or \"0.25\"", row=r, col=c)
            try:
                v = parse_rational(x)
            except ValueError as exc:
                raise NetworkFormatError(str(exc), row=r, col=c) from None
            if v < 0:
                raise NetworkFormatError(f"negative entry {x!r}", row=r, col=c)
            parsed.append(v)
        alpha.append(tuple(parsed))
    if "K" in obj and obj["K"] != K:
        raise NetworkFormatError(f'"K" is {obj["K"]!r} but alpha has {K} rows')
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise NetworkFormatError('"name" must be a string')
    return ChannelMatrix(tuple(alpha), name=name)


def delta(m: ChannelMatrix, i: int, j: int) -> Fraction:
    """``alpha_ii - alpha_ji`` for ``i != j`` and 0 on the diagonal."""
    m.check_index(i)
    m.check_index(j)
    if i == j:
        return Fraction(0)
    return m.alpha[i - 1][i - 1] - m.alpha[j - 1][i - 1]


@dataclass(frozen=True)
class Violation:
    regime: str
    indices: tuple[int, int, int]
    lhs: Fraction
    rhs: Fraction
    text: str


@dataclass(frozen=True)
class RegimeReport:
    in_tin: bool
    in_ctin: bool
    in_sls: bool
    in_strict_sls: bool
    violations: tuple[Violation, ...]
    quantifier: str = QUANTIFIER_READING

    def witness(self, regime: str) -> Violation | None:
        for v in self.violations:
            if v.regime == regime:
                return v
        return None

    def render(self) -> str:
        parts = []
        for tag, flag, names in (("TIN", self.in_tin, "ilm"),
                                 ("CTIN", self.in_ctin, "ijk"),
                                 ("SLS", self.in_sls, "ijk"),
                                 ("strict-SLS", self.in_strict_sls, "ijk")):
            if flag:
                parts.append(f"{tag} ✓")
            else:
                w = self.witness(tag)
                idx = ",".join(f"{n}={v}" for n, v in zip(names, w.indices))
                parts.append(f"{tag} ✗ (witness {idx}: {w.text})")
        return " ".join(parts)

    def to_json(self) -> dict:
        return {
            "in_tin": self.in_tin,
            "in_ctin": self.in_ctin,
            "in_sls": self.in_sls,
            "in_strict_sls": self.in_strict_sls,
            "quantifier": self.quantifier,
            "violations": [
                {"regime": v.regime, "indices": list(v.indices),
                 "lhs": str(v.lhs), "rhs": str(v.rhs), "inequality": v.text}
                for v in self.violations
            ],
        }


def classify(m: ChannelMatrix) -> RegimeReport:
    """Evaluate the TIN, CTIN, SLS and strict-SLS membership conditions.

    Triples are scanned in lexicographic order, so each reported witness is
    the smallest offending one for its regime.
    """
    A, D = m.scaled
    K = m.K
    found: dict[str, Violation] = {}

    def record(regime, i, j, k, lhs, rhs, terms, strict):
        if regime in found:
            return
        op = "≤" if strict else "<"
        text = f"{_label(i + 1, i + 1)} = {Fraction(lhs, D)} {op} {terms} = {Fraction(rhs, D)}"
        found[regime] = Violation(regime, (i + 1, j + 1, k + 1),
                                  Fraction(lhs, D), Fraction(rhs, D), text)

    for i in range(K):
        aii = A[i][i]
        Ai = A[i]
        for j in range(K):
            if j == i:
                continue
            aij, aji = Ai[j], A[j][i]
            for k in range(K):
                if k == i:
                    continue
                aik, aki, ajk = Ai[k], A[k][i], A[j][k]
                if "TIN" not in found:
                    rhs = aij + aki
                    if aii < rhs:
                        record("TIN", i, j, k, aii, rhs,
                               f"{_label(i+1, j+1)} + {_label(k+1, i+1)}", False)
                cross = aik + aji - ajk
                cross_terms = f"{_label(i+1, k+1)} + {_label(j+1, i+1)} - {_label(j+1, k+1)}"
                if "CTIN" not in found:
                    pair = aij + aji
                    if aii < pair:
                        record("CTIN", i, j, k, aii, pair,
                               f"{_label(i+1, j+1)} + {_label(j+1, i+1)}", False)
                    elif aii < cross:
                        record("CTIN", i, j, k, aii, cross, cross_terms, False)
                for regime, strict in (("SLS", False), ("strict-SLS", True)):
                    if regime in found:
                        continue
                    for rhs, terms in ((aij, _label(i+1, j+1)),
                                       (aki, _label(k+1, i+1)),
                                       (cross, cross_terms)):
                        if aii < rhs or (strict and aii == rhs):
                            record(regime, i, j, k, aii, rhs, terms, strict)
                            break
        if len(found) == 4:
            break
    order = ("TIN", "CTIN", "SLS", "strict-SLS")
    return RegimeReport(
        in_tin="TIN" not in found,
        in_ctin="CTIN" not in found,
        in_sls="SLS" not in found,
        in_strict_sls="strict-SLS" not in found,
        violations=tuple(found[r] for r in order if r in found),
    )
