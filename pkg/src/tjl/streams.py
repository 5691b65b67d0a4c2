"""Ultimately periodic boolean streams.

A stream is a finite prefix followed by a loop repeated forever.  Every
operation returns the normalized form: shortest loop period, then the
shortest prefix.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd


class UPB:
    __slots__ = ("prefix", "loop", "_norm")

    def __init__(self, prefix=(), loop=(False,)):
        prefix = tuple(bool(b) for b in prefix)
        loop = tuple(bool(b) for b in loop)
        if not loop:
            raise ValueError("loop must be non-empty")
        self.prefix = prefix
        self.loop = loop
        self._norm = None

    def at(self, n: int) -> bool:
        p = len(self.prefix)
        if n < p:
            return self.prefix[n]
        return self.loop[(n - p) % len(self.loop)]

    def normalize(self) -> "UPB":
        if self._norm is None:
            pre, loop = _normalize(self.prefix, self.loop)
            if pre == self.prefix and loop == self.loop:
                self._norm = self
            else:
                out = UPB.__new__(UPB)
                out.prefix, out.loop = pre, loop
                out._norm = out
                self._norm = out
        return self._norm

    def __eq__(self, other):
        if not isinstance(other, UPB):
            return NotImplemented
        a, b = self.normalize(), other.normalize()
        return a.prefix == b.prefix and a.loop == b.loop

    def __hash__(self):
        n = self.normalize()
        return hash((n.prefix, n.loop))

    def __repr__(self):
        n = self.normalize()
        bits = lambda xs: "".join("1" if x else "0" for x in xs)
        return f"UPB({bits(n.prefix)}|{bits(n.loop)})"

    def __invert__(self):
        return not_(self)

    def __and__(self, other):
        return and_(self, other)

    def __or__(self, other):
        return or_(self, other)

    @property
    def is_true(self) -> bool:
        n = self.normalize()
        return not n.prefix and n.loop == (True,)

    @property
    def is_false(self) -> bool:
        n = self.normalize()
        return not n.prefix and n.loop == (False,)

    def horizon(self) -> int:
        """Positions 0..horizon-1 cover the prefix and one loop."""
        return len(self.prefix) + len(self.loop)

    def to_json(self):
        n = self.normalize()
        return {"prefix": [int(b) for b in n.prefix], "loop": [int(b) for b in n.loop]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj.get("prefix", []), obj["loop"])


def _raw(prefix, loop) -> UPB:
    out = UPB.__new__(UPB)
    out.prefix, out.loop = prefix, loop
    out._norm = None
    return out


@lru_cache(maxsize=100_000)
def _normalize(prefix: tuple, loop: tuple):
    q = len(loop)
    for d in range(1, q + 1):
        if q % d == 0 and all(loop[k] == loop[k % d] for k in range(d, q)):
            loop = loop[:d]
            break
    while prefix and prefix[-1] == loop[-1]:
        loop = loop[-1:] + loop[:-1]
        prefix = prefix[:-1]
    return prefix, loop


def _make(prefix, loop) -> UPB:
    pre, lp = _normalize(tuple(prefix), tuple(loop))
    out = _raw(pre, lp)
    out._norm = out
    return out


TRUE = _make((), (True,))
FALSE = _make((), (False,))


def const(value: bool) -> UPB:
    return TRUE if value else FALSE


def at(s: UPB, n: int) -> bool:
    return s.at(n)


def normalize(s: UPB) -> UPB:
    return s.normalize()


def equals(s: UPB, t: UPB) -> bool:
    return s == t


def _lcm(a, b):
    return a * b // gcd(a, b)


def _align(s: UPB, P: int, Q: int):
    p, q = len(s.prefix), len(s.loop)
    if p == P and q == Q:
        return s.prefix, s.loop
    at_ = s.at
    return tuple(at_(n) for n in range(P)), tuple(at_(P + k) for k in range(Q))


def _shape(*streams):
    P = max(len(s.prefix) for s in streams)
    Q = 1
    for s in streams:
        Q = _lcm(Q, len(s.loop))
    return P, Q


# ---------------------------------------------------------------- pointwise

def not_(s: UPB) -> UPB:
    s = s.normalize()
    return _make(tuple(not b for b in s.prefix), tuple(not b for b in s.loop))


def _pointwise(op, s: UPB, t: UPB) -> UPB:
    s, t = s.normalize(), t.normalize()
    P, Q = _shape(s, t)
    sp, sl = _align(s, P, Q)
    tp, tl = _align(t, P, Q)
    return _make(tuple(map(op, sp, tp)), tuple(map(op, sl, tl)))


def and_(s: UPB, t: UPB) -> UPB:
    if s.is_false or t.is_true:
        return s.normalize()
    if t.is_false or s.is_true:
        return t.normalize()
    return _pointwise(lambda a, b: a and b, s, t)


def or_(s: UPB, t: UPB) -> UPB:
    if s.is_true or t.is_false:
        return s.normalize()
    if t.is_true or s.is_false:
        return t.normalize()
    return _pointwise(lambda a, b: a or b, s, t)


def imp(s: UPB, t: UPB) -> UPB:
    return or_(not_(s), t)


def any_of(streams) -> UPB:
    out = FALSE
    for s in streams:
        out = or_(out, s)
    return out


def all_of(streams) -> UPB:
    out = TRUE
    for s in streams:
        out = and_(out, s)
    return out


def leq(s: UPB, t: UPB) -> bool:
    """Pointwise s <= t."""
    return imp(s, t).is_true


# ---------------------------------------------------------------- shifts

def next_(s: UPB) -> UPB:
    s = s.normalize()
    if s.prefix:
        return _make(s.prefix[1:], s.loop)
    return _make((), s.loop[1:] + s.loop[:1])


def wprev(s: UPB) -> UPB:
    s = s.normalize()
    return _make((True,) + s.prefix, s.loop)


def sprev(s: UPB) -> UPB:
    s = s.normalize()
    return _make((False,) + s.prefix, s.loop)


# ---------------------------------------------------------------- until / since

def until(a: UPB, b: UPB) -> UPB:
    a, b = a.normalize(), b.normalize()
    if b.is_false:
        return FALSE
    P, Q = _shape(a, b)
    ap, al = _align(a, P, Q)
    bp, bl = _align(b, P, Q)
    u = [False] * Q
    for _ in range(Q + 1):
        changed = False
        for i in range(Q - 1, -1, -1):
            v = bl[i] or (al[i] and u[(i + 1) % Q])
            if v != u[i]:
                u[i] = v
                changed = True
        if not changed:
            break
    pre = [False] * P
    nxt = u[0]
    for n in range(P - 1, -1, -1):
        nxt = bp[n] or (ap[n] and nxt)
        pre[n] = nxt
    return _make(pre, u)


def since(a: UPB, b: UPB) -> UPB:
    a, b = a.normalize(), b.normalize()
    if b.is_false:
        return FALSE
    P, Q = _shape(a, b)
    ap, al = _align(a, P, Q)
    bp, bl = _align(b, P, Q)
    values = []
    prev = False
    for n in range(P):
        prev = bp[n] or (ap[n] and prev)
        values.append(prev)
    seen = {}
    idx = 0
    while (idx, prev) not in seen:
        seen[(idx, prev)] = len(values)
        prev = bl[idx] or (al[idx] and prev)
        values.append(prev)
        idx = (idx + 1) % Q
    m = seen[(idx, prev)]
    return _make(values[:m], values[m:])


def diamond(s: UPB) -> UPB:
    return until(TRUE, s)


def box(s: UPB) -> UPB:
    return not_(diamond(not_(s)))


def diamondminus(s: UPB) -> UPB:
    return since(TRUE, s)


def boxminus(s: UPB) -> UPB:
    return not_(diamondminus(not_(s)))


def from_positions(flags_prefix, flags_loop) -> UPB:
    return _make(tuple(flags_prefix), tuple(flags_loop))
