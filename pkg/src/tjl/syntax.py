"""Terms, formulas, concrete syntax and subformula closures.

Only the core connectives exist as classes.  Negation, truth, conjunction,
disjunction, equivalence, strong previous and the four derived modalities
are built by helper functions and recognized again by the printer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotInProfile(ValueError):
    """A term constructor or connective is not available in the active profile."""


def _cached_hash(self):
    h = self._hash
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._fields))
        object.__setattr__(self, "_hash", h)
    return h


# ---------------------------------------------------------------- terms

class Term:
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Const(Term):
    name: str
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("name",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("name",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Bang(Term):
    term: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("term",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Sum(Term):
    left: Term
    right: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class App(Term):
    left: Term
    right: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class AppIdx(Term):
    """Application indexed by the formula whose implication it discharges."""
    left: Term
    index: "Formula"
    right: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "index", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Unary(Term):
    op: str
    term: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("op", "term")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Binary(Term):
    """The two-place operators pr (since window) and nl (until window)."""
    op: str
    left: Term
    right: Term
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("op", "left", "right")
    __hash__ = _cached_hash


# concrete name -> axiom that licenses the operator
UNARY_OPS = {
    "gen": "generalize",
    "acc": "box-access",
    "accx": "next-access",
    "shr": "next-right",
    "shl": "next-left",
    "genp": "boxminus-generalize",
    "accp": "boxminus-access",
    "accxp": "wprev-access",
    "rp": "wprev-right",
    "shrp": "sprev-right",
    "shlp": "sprev-left",
    "bar": "bar",
}
BINARY_OPS = {"pr": "jpr", "nl": "jnl"}


# ---------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Prop(Formula):
    name: str
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("name",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Bot(Formula):
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ()
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Imp(Formula):
    left: Formula
    right: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Next(Formula):
    body: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("body",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class WPrev(Formula):
    body: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("body",)
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Until(Formula):
    left: Formula
    right: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Since(Formula):
    left: Formula
    right: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True, eq=True)
class Just(Formula):
    agent: int
    term: Term
    body: Formula
    _hash: int | None = field(default=None, compare=False, repr=False)
    _fields = ("agent", "term", "body")
    __hash__ = _cached_hash


BOT = Bot()


def neg(a):
    return Imp(a, BOT)


TOP = neg(BOT)


def disj(a, b):
    return Imp(neg(a), b)


def conj(a, b):
    return neg(disj(neg(a), neg(b)))


def iff(a, b):
    return conj(Imp(a, b), Imp(b, a))


def sprev(a):
    return neg(WPrev(neg(a)))


def eventually(a):
    return Until(TOP, a)


def always(a):
    return neg(eventually(neg(a)))


def once(a):
    return Since(TOP, a)


def historically(a):
    return neg(once(neg(a)))


def big_conj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for x in items[1:]:
        out = conj(out, x)
    return out


# pattern recognizers used by the printer, closures and the evidence engine

def as_neg(f):
    if isinstance(f, Imp) and isinstance(f.right, Bot):
        return f.left
    return None


def as_sprev(f):
    inner = as_neg(f)
    if isinstance(inner, WPrev):
        return as_neg(inner.body)
    return None


def as_eventually(f):
    if isinstance(f, Until) and f.left == TOP:
        return f.right
    return None


def as_always(f):
    inner = as_eventually(as_neg(f))
    return as_neg(inner) if inner is not None else None


def as_once(f):
    if isinstance(f, Since) and f.left == TOP:
        return f.right
    return None


def as_historically(f):
    inner = as_once(as_neg(f))
    return as_neg(inner) if inner is not None else None


def as_disj(f):
    if isinstance(f, Imp):
        a = as_neg(f.left)
        if a is not None:
            return a, f.right
    return None


def as_conj(f):
    d = as_disj(as_neg(f)) if as_neg(f) is not None else None
    if d is None:
        return None
    a, b = as_neg(d[0]), as_neg(d[1])
    if a is None or b is None:
        return None
    return a, b


def as_iff(f):
    c = as_conj(f)
    if c is None:
        return None
    l, r = c
    if isinstance(l, Imp) and isinstance(r, Imp) and l.left == r.right and l.right == r.left:
        return l.left, l.right
    return None


# ---------------------------------------------------------------- traversal

def children(f: Formula) -> tuple:
    if isinstance(f, (Imp, Until, Since)):
        return (f.left, f.right)
    if isinstance(f, (Next, WPrev, Just)):
        return (f.body,)
    return ()


def term_children(t: Term) -> tuple:
    if isinstance(t, (Bang, Unary)):
        return (t.term,)
    if isinstance(t, (Sum, App, Binary)):
        return (t.left, t.right)
    if isinstance(t, AppIdx):
        return (t.left, t.right)
    return ()


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in term_children(t))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in term_children(t):
        yield from subterms(c)


def walk(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences, including formulas inside indexed terms."""
    yield f
    for c in children(f):
        yield from walk(c)
    if isinstance(f, Just):
        for s in subterms(f.term):
            if isinstance(s, AppIdx):
                yield from walk(s.index)


def props(f: Formula) -> set[str]:
    return {g.name for g in walk(f) if isinstance(g, Prop)}


def terms_of(f: Formula) -> Iterator[Term]:
    for g in walk(f):
        if isinstance(g, Just):
            yield from subterms(g.term)


# ---------------------------------------------------------------- ordering

_FTAG = {Bot: 0, Prop: 1, Imp: 2, Next: 3, WPrev: 4, Until: 5, Since: 6, Just: 7}
_TTAG = {Const: 0, Var: 1, Bang: 2, Sum: 3, App: 4, AppIdx: 5, Unary: 6, Binary: 7}


@lru_cache(maxsize=200_000)
def formula_key(f: Formula) -> tuple:
    """Canonical total order: constructor tag first, then the fields left to right."""
    tag = _FTAG[type(f)]
    if isinstance(f, Prop):
        return (tag, f.name)
    if isinstance(f, Just):
        return (tag, f.agent, term_key(f.term), formula_key(f.body))
    return (tag,) + tuple(formula_key(c) for c in children(f))


@lru_cache(maxsize=200_000)
def term_key(t: Term) -> tuple:
    tag = _TTAG[type(t)]
    if isinstance(t, (Const, Var)):
        return (tag, t.name)
    if isinstance(t, Unary):
        return (tag, t.op, term_key(t.term))
    if isinstance(t, Binary):
        return (tag, t.op, term_key(t.left), term_key(t.right))
    if isinstance(t, AppIdx):
        return (tag, term_key(t.left), formula_key(t.index), term_key(t.right))
    return (tag,) + tuple(term_key(c) for c in term_children(t))


def canonical(items: Iterable[Formula]) -> list[Formula]:
    return sorted(set(items), key=formula_key)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<sym><->|->|\*\{|\]_|[()\[\]{}|&~!+*,])|(?P<nat>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)
_KEYWORDS = {"U", "S", "X", "Yw", "Ys", "G", "F", "H", "O", "true", "false"}
_PREFIX = {"~", "X", "Yw", "Ys", "G", "F", "H", "O"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "ident" and value in _KEYWORDS:
            kind = "sym"
        out.append((kind, value, start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value):
        kind, v, _ = self.peek()
        return kind == "sym" and v == value

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.peek()
        if kind != "sym" or v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)
        return self.take()

    def done(self):
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {v!r}", pos)

    # formulas
    def formula(self):
        left = self.imp()
        if self.at("<->"):
            self.take()
            left = iff(left, self.imp())
        return left

    def imp(self):
        left = self.tmp()
        if self.at("->"):
            self.take()
            return Imp(left, self.imp())
        return left

    def tmp(self):
        left = self.disj()
        if self.at("U"):
            self.take()
            return Until(left, self.tmp())
        if self.at("S"):
            self.take()
            return Since(left, self.tmp())
        return left

    def disj(self):
        left = self.conj()
        while self.at("|"):
            self.take()
            left = disj(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.at("&"):
            self.take()
            left = conj(left, self.unary())
        return left

    def unary(self):
        kind, v, pos = self.peek()
        if kind == "sym" and v in _PREFIX:
            self.take()
            body = self.unary()
            return {
                "~": neg, "X": Next, "Yw": WPrev, "Ys": sprev,
                "G": always, "F": eventually, "H": historically, "O": once,
            }[v](body)
        if kind == "sym" and v == "[":
            self.take()
            t = self.term()
            self.expect("]_")
            kind, num, npos = self.take()
            if kind != "nat":
                raise ParseError("expected agent number after ']_'", npos)
            agent = int(num)
            if agent < 1:
                raise ParseError("agent numbers start at 1", npos)
            return Just(agent, t, self.unary())
        return self.prim()

    def prim(self):
        kind, v, pos = self.take()
        if kind == "sym" and v == "true":
            return TOP
        if kind == "sym" and v == "false":
            return BOT
        if kind == "ident":
            return Prop(v)
        if kind == "sym" and v == "(":
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)

    # terms
    def term(self):
        left = self.tprod()
        while self.at("+"):
            self.take()
            left = Sum(left, self.tprod())
        return left

    def tprod(self):
        left = self.tbase()
        while True:
            if self.at("*"):
                self.take()
                left = App(left, self.tbase())
            elif self.at("*{"):
                self.take()
                idx = self.formula()
                self.expect("}")
                left = AppIdx(left, idx, self.tbase())
            else:
                return left

    def tbase(self):
        kind, v, pos = self.take()
        if kind == "sym" and v == "!":
            return Bang(self.tbase())
        if kind == "sym" and v == "(":
            t = self.term()
            self.expect(")")
            return t
        if kind == "ident":
            nxt = self.peek()
            if v in UNARY_OPS and nxt[0] == "sym" and nxt[1] == "(":
                self.take()
                t = self.term()
                self.expect(")")
                return Unary(v, t)
            if v in BINARY_OPS and nxt[0] == "sym" and nxt[1] == "(":
                self.take()
                a = self.term()
                self.expect(",")
                b = self.term()
                self.expect(")")
                return Binary(v, a, b)
            return Const(v) if v.startswith("c") else Var(v)
        raise ParseError(f"expected a term, found {v or 'end of input'!r}", pos)


def parse_formula(text: str, profile=None) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    if profile is not None:
        profile.require(f)
    return f


def parse_term(text: str, profile=None) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    if profile is not None:
        profile.require(Just(1, t, BOT))
    return t


# ---------------------------------------------------------------- printer

# binding strength: iff 1, imp 2, U/S 3, or 4, and 5, prefix 6, atom 7
def _wrap(text: str, level: int, need: int) -> str:
    return f"({text})" if level < need else text


def _show(f: Formula) -> tuple[str, int]:
    if isinstance(f, Bot):
        return "false", 7
    if f == TOP:
        return "true", 7
    if isinstance(f, Prop):
        return f.name, 7
    pair = as_iff(f)
    if pair is not None:
        return f"{_at(pair[0], 2)} <-> {_at(pair[1], 2)}", 1
    pair = as_conj(f)
    if pair is not None:
        return f"{_at(pair[0], 5)} & {_at(pair[1], 6)}", 5
    for recog, sym in ((as_always, "G"), (as_historically, "H"), (as_sprev, "Ys")):
        body = recog(f)
        if body is not None:
            return f"{sym} {_at(body, 6)}", 6
    body = as_neg(f)
    if body is not None:
        return f"~{_at(body, 6)}", 6
    pair = as_disj(f)
    if pair is not None and not any(r(f.left) is not None
                                    for r in (as_always, as_historically, as_sprev)):
        return f"{_at(pair[0], 4)} | {_at(pair[1], 5)}", 4
    if isinstance(f, Imp):
        return f"{_at(f.left, 3)} -> {_at(f.right, 2)}", 2
    for recog, sym in ((as_eventually, "F"), (as_once, "O")):
        body = recog(f)
        if body is not None:
            return f"{sym} {_at(body, 6)}", 6
    if isinstance(f, Until):
        return f"{_at(f.left, 4)} U {_at(f.right, 3)}", 3
    if isinstance(f, Since):
        return f"{_at(f.left, 4)} S {_at(f.right, 3)}", 3
    if isinstance(f, Next):
        return f"X {_at(f.body, 6)}", 6
    if isinstance(f, WPrev):
        return f"Yw {_at(f.body, 6)}", 6
    if isinstance(f, Just):
        return f"[{print_term(f.term)}]_{f.agent} {_at(f.body, 6)}", 6
    raise TypeError(f"not a formula: {f!r}")


def _at(f: Formula, need: int) -> str:
    text, level = _show(f)
    return _wrap(text, level, need)


def print_formula(f: Formula) -> str:
    return _show(f)[0]


def _tshow(t: Term) -> tuple[str, int]:
    # levels: sum 1, product 2, base 3
    if isinstance(t, (Const, Var)):
        return t.name, 3
    if isinstance(t, Bang):
        return "!" + _tat(t.term, 3), 3
    if isinstance(t, Unary):
        return f"{t.op}({print_term(t.term)})", 3
    if isinstance(t, Binary):
        return f"{t.op}({print_term(t.left)}, {print_term(t.right)})", 3
    if isinstance(t, Sum):
        return f"{_tat(t.left, 1)}+{_tat(t.right, 2)}", 1
    if isinstance(t, App):
        return f"{_tat(t.left, 2)}*{_tat(t.right, 3)}", 2
    if isinstance(t, AppIdx):
        return f"{_tat(t.left, 2)}*{{{print_formula(t.index)}}}{_tat(t.right, 3)}", 2
    raise TypeError(f"not a term: {t!r}")


def _tat(t: Term, need: int) -> str:
    text, level = _tshow(t)
    return _wrap(text, level, need)


def print_term(t: Term) -> str:
    return _tshow(t)[0]


def show(f) -> str:
    return print_term(f) if isinstance(f, Term) else print_formula(f)


# ---------------------------------------------------------------- closures

class ClosureSet:
    """Distinct formulas in canonical order with an index map.

    ``positive`` is the subformula-closed part; ``formulas`` adds negations.
    """

    def __init__(self, positive: Iterable[Formula], with_negations: bool = True):
        pos = canonical(positive)
        self.positive = tuple(pos)
        everything = set(pos)
        if with_negations:
            everything.update(neg(f) for f in pos)
        self.formulas = tuple(canonical(everything))
        self.index = {f: i for i, f in enumerate(self.formulas)}

    def __contains__(self, f):
        return f in self.index

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __repr__(self):
        return "ClosureSet({" + ", ".join(print_formula(f) for f in self.formulas) + "})"


def sub(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(children(g))
    return out


SEED = once(WPrev(BOT))


def subformulas(f: Formula) -> ClosureSet:
    return ClosureSet(sub(f), with_negations=False)


def closure(chi: Formula) -> ClosureSet:
    return ClosureSet(sub(chi) | sub(SEED))


def _subf(f: Formula, out: set[Formula]) -> None:
    if f in out:
        return
    out.add(f)
    if not isinstance(f, Just):
        for c in children(f):
            _subf(c, out)
        return
    t, body, i = f.term, f.body, f.agent
    if isinstance(t, App):
        raise NotInProfile("non-indexed application in an indexed closure")
    if isinstance(t, Sum):
        _subf(Just(i, t.left, body), out)
        _subf(Just(i, t.right, body), out)
    elif isinstance(t, AppIdx):
        _subf(Just(i, t.left, Imp(t.index, body)), out)
        _subf(Just(i, t.right, t.index), out)
    elif isinstance(t, Unary) and t.op == "gen" and as_always(body) is not None:
        _subf(neg(Just(i, t.term, as_always(body))), out)
    else:
        _subf(body, out)


def subf(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    _subf(f, out)
    return out


def closure_indexed(chi: Formula) -> ClosureSet:
    base = subf(chi)
    extra: set[Formula] = set()
    for g in base:
        if isinstance(g, Just) and isinstance(g.term, Unary) and g.term.op == "gen":
            inner = as_always(g.body)
            if inner is not None:
                extra |= subf(eventually(neg(Just(g.agent, g.term.term, inner))))
    return ClosureSet(base | subf(SEED) | extra)
