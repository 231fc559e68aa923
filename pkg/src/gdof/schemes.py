"""Layered superposition broadcast schemes and their successive-decoding check.

Power accounting is on the GDoF scale: a message sent at exponent ``gamma``
from antenna ``i`` reaches receiver ``k`` at level ``alpha_ki + gamma``.
A message sent from several antennas is heard at the strongest of those
levels, since finite-precision CSIT gives no coherent combining gain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import SchemeError
from .network import ChannelMatrix, format_rational, parse_rational


@dataclass(frozen=True)
class Message:
    id: str
    antennas: frozenset[int]
    power: Fraction
    gdof: Fraction
    audience: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "antennas", frozenset(self.antennas))
        object.__setattr__(self, "audience", frozenset(self.audience))
        object.__setattr__(self, "power", Fraction(self.power))
        object.__setattr__(self, "gdof", Fraction(self.gdof))
        if not self.antennas:
            raise SchemeError(f"message {self.id!r} has no transmitting antenna")
        if self.power > 0:
            raise SchemeError(f"message {self.id!r} has power exponent {self.power} > 0")
        if self.gdof < 0:
            raise SchemeError(f"message {self.id!r} has negative GDoF {self.gdof}")

    def to_json(self) -> dict:
        return {"id": self.id, "antennas": sorted(self.antennas), "power": str(self.power),
                "gdof": str(self.gdof), "audience": sorted(self.audience)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Message":
        try:
            return cls(str(obj["id"]), frozenset(int(a) for a in obj["antennas"]),
                       parse_rational(str(obj["power"])), parse_rational(str(obj["gdof"])),
                       frozenset(int(a) for a in obj.get("audience", ())))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemeError(f"malformed message {obj!r}: {e}") from None


@dataclass(frozen=True)
class LayeredScheme:
    messages: tuple[Message, ...]
    decode_order: Mapping[int, tuple[str, ...]]
    name: str = ""

    def __post_init__(self):
        msgs = tuple(self.messages)
        order = {int(k): tuple(v) for k, v in dict(self.decode_order).items()}
        object.__setattr__(self, "messages", msgs)
        object.__setattr__(self, "decode_order", order)
        ids = [msg.id for msg in msgs]
        if len(set(ids)) != len(ids):
            raise SchemeError("duplicate message ids")
        known = set(ids)
        for k, seq in order.items():
            if len(set(seq)) != len(seq):
                raise SchemeError(f"receiver {k} decodes a message twice")
            for mid in seq:
                if mid not in known:
                    raise SchemeError(f"receiver {k} decodes unknown message {mid!r}")
        for msg in msgs:
            for k in msg.audience:
                if msg.id not in order.get(k, ()):
                    raise SchemeError(
                        f"receiver {k} is in the audience of {msg.id!r} but never decodes it")

    def message(self, mid: str) -> Message:
        for msg in self.messages:
            if msg.id == mid:
                return msg
        raise SchemeError(f"unknown message {mid!r}")

    def to_json(self) -> dict:
        out = {"messages": [msg.to_json() for msg in self.messages],
               "decode_order": {str(k): list(v) for k, v in sorted(self.decode_order.items())}}
        if self.name:
            out["name"] = self.name
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: Mapping) -> "LayeredScheme":
        if not isinstance(obj, Mapping) or "messages" not in obj:
            raise SchemeError("scheme JSON needs a 'messages' list")
        msgs = tuple(Message.from_json(o) for o in obj["messages"])
        try:
            order = {int(k): tuple(str(x) for x in v)
                     for k, v in dict(obj.get("decode_order", {})).items()}
        except (TypeError, ValueError) as e:
            raise SchemeError(f"malformed decode order: {e}") from None
        return cls(msgs, order, str(obj.get("name", "")))

    @classmethod
    def loads(cls, text: str | bytes) -> "LayeredScheme":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemeError(f"invalid scheme JSON: {e}") from None
        return cls.from_json(obj)


@dataclass(frozen=True)
class Step:
    message: str
    level: Fraction
    floor: Fraction
    gdof: Fraction

    @property
    def slack(self) -> Fraction:
        return self.level - self.floor - self.gdof

    @property
    def ok(self) -> bool:
        return self.slack >= 0

    def to_json(self) -> dict:
        return {"message": self.message, "level": str(self.level), "floor": str(self.floor),
                "gdof": str(self.gdof), "slack": str(self.slack), "ok": self.ok}


@dataclass(frozen=True)
class ReceiverVerdict:
    receiver: int
    steps: tuple[Step, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    @property
    def failed(self) -> Step | None:
        for s in self.steps:
            if not s.ok:
                return s
        return None

    @property
    def decoded(self) -> frozenset[str]:
        return frozenset(s.message for s in self.steps if s.ok)

    def to_json(self) -> dict:
        f = self.failed
        return {"receiver": self.receiver, "ok": self.ok,
                "steps": [s.to_json() for s in self.steps],
                "failed": None if f is None else f.to_json()}


@dataclass(frozen=True)
class SchemeVerdict:
    receivers: tuple[ReceiverVerdict, ...]
    total: Fraction

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.receivers)

    def receiver(self, k: int) -> ReceiverVerdict:
        return self.receivers[k - 1]

    def min_slack(self) -> Fraction | None:
        slacks = [s.slack for r in self.receivers for s in r.steps]
        return min(slacks) if slacks else None

    def to_json(self) -> dict:
        return {"ok": self.ok, "total": str(self.total),
                "receivers": [r.to_json() for r in self.receivers]}


def received_level(m: ChannelMatrix, k: int, msg: Message) -> Fraction:
    return max(m[k, i] for i in msg.antennas) + msg.power


def _walk(m: ChannelMatrix, s: LayeredScheme, k: int) -> ReceiverVerdict:
    levels = {msg.id: received_level(m, k, msg) for msg in s.messages}
    pending = dict(levels)
    steps = []
    for mid in s.decode_order.get(k, ()):
        lvl = pending.pop(mid)
        floor = max([Fraction(0), *pending.values()])
        step = Step(mid, lvl, floor, s.message(mid).gdof)
        steps.append(step)
        if not step.ok:
            break
    return ReceiverVerdict(k, tuple(steps))


def verify_scheme(m: ChannelMatrix, s: LayeredScheme) -> SchemeVerdict:
    """Walk every receiver's decode order and total the delivered GDoF.

    A step decodes ``d`` GDoF iff ``d <= level - floor``, where the floor is
    the strongest message not yet decoded at that receiver (at least the
    noise level 0).  A receiver stops at its first failing step.  A message
    counts toward the total once its whole audience has decoded it.
    """
    for msg in s.messages:
        for i in msg.antennas:
            m.check_index(i)
        for k in msg.audience:
            m.check_index(k)
    for k in s.decode_order:
        m.check_index(k)
    verdicts = tuple(_walk(m, s, k) for k in range(1, m.K + 1))
    total = Fraction(0)
    for msg in s.messages:
        if msg.audience and all(msg.id in verdicts[k - 1].decoded for k in msg.audience):
            total += msg.gdof
    return SchemeVerdict(verdicts, total)


def _by_level_order(K: int, msgs: Sequence[Message], receivers_of) -> dict[int, tuple[str, ...]]:
    order: dict[int, list[str]] = {k: [] for k in range(1, K + 1)}
    for msg in msgs:
        for k in receivers_of(msg):
            order[k].append(msg.id)
    return {k: tuple(v) for k, v in order.items()}


def ctin_bc_scheme(K: int) -> LayeredScheme:
    """Common codeword U from every antenna plus one weak private per user."""
    if K < 2:
        raise SchemeError(f"the cyclic scheme needs K >= 2, got {K}")
    everyone = frozenset(range(1, K + 1))
    msgs = [Message("U", everyone, Fraction(0), Fraction(K - 1), everyone)]
    msgs += [Message(f"V{i}", {i}, Fraction(-(K - 1)), Fraction(1), {i}) for i in range(1, K + 1)]
    order = _by_level_order(K, msgs, lambda msg: msg.audience)
    return LayeredScheme(tuple(msgs), order, f"ctin_bc_scheme(K={K})")


def tree_bc_scheme(n: int) -> LayeredScheme:
    """One common message per subtree plus a private per user.

    A subtree at depth ``i`` (there are ``2**i`` of them) sends its common
    message from its own users at exponent ``-1 + 2**-i`` with load
    ``2**-(i+1)``; privates sit at ``-1 + 2**-n`` with load ``2**-n``.
    Receivers decode from the root down.
    """
    if n < 1:
        raise SchemeError(f"the tree scheme needs n >= 1, got {n}")
    K = 2 ** n
    msgs = []
    for i in range(n):
        size = K >> i
        for b in range(2 ** i):
            users = frozenset(range(b * size + 1, (b + 1) * size + 1))
            msgs.append(Message(f"C{i}.{b + 1}", users, Fraction(-1) + Fraction(1, 2 ** i),
                                Fraction(1, 2 ** (i + 1)), users))
    for k in range(1, K + 1):
        msgs.append(Message(f"P{k}", {k}, Fraction(-1) + Fraction(1, K), Fraction(1, K), {k}))
    order = _by_level_order(K, msgs, lambda msg: msg.audience)
    return LayeredScheme(tuple(msgs), order, f"tree_bc_scheme(n={n})")


def symmetric_bc_scheme(K: int, a) -> LayeredScheme:
    """Common message at exponent 0 carrying ``a``; privates at ``-a`` carrying ``1 - a``."""
    a = Fraction(a)
    if K < 2:
        raise SchemeError(f"the symmetric scheme needs K >= 2, got {K}")
    if not 0 <= a <= 1:
        raise SchemeError(f"cross strength must lie in [0, 1], got {a}")
    everyone = frozenset(range(1, K + 1))
    msgs = [Message("C", everyone, Fraction(0), a, everyone)]
    msgs += [Message(f"P{i}", {i}, -a, 1 - a, {i}) for i in range(1, K + 1)]
    order = _by_level_order(K, msgs, lambda msg: msg.audience)
    return LayeredScheme(tuple(msgs), order, f"symmetric_bc_scheme(K={K}, a={format_rational(a)})")


def empty_scheme() -> LayeredScheme:
    return LayeredScheme((), {})
