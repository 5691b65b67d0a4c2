"""Axiom schemas as patterns, schema matching, instantiation and the tautology check."""

from __future__ import annotations

from dataclasses import dataclass

from .profiles import FP, LP, LPLTL, LPLTL_I, LogicProfile
from .syntax import (
    App, AppIdx, BOT, Bang, Binary, Bot, Formula, Imp, Just, Next, Since, Sum, Term, Unary,
    Until, WPrev, always, conj, disj, eventually, historically, iff, neg, once, sprev,
)


class MF(Formula):
    """Formula metavariable."""
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"?{self.name}"


class MT(Term):
    """Term metavariable."""
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"?{self.name}"


PHI, PSI = MF("phi"), MF("psi")
T, S = MT("t"), MT("s")
AGENT = "i"


def _j(t, f):
    return Just(AGENT, t, f)


@dataclass(frozen=True)
class Schema:
    id: str
    shapes: tuple
    group: str


SCHEMAS = (
    # future
    Schema("next-K", (Imp(Next(Imp(PHI, PSI)), Imp(Next(PHI), Next(PSI))),), "future"),
    Schema("always-K", (Imp(always(Imp(PHI, PSI)), Imp(always(PHI), always(PSI))),), "future"),
    Schema("fun", (iff(Next(neg(PHI)), neg(Next(PHI))),), "future"),
    Schema("ind", (Imp(always(Imp(PHI, Next(PHI))), Imp(PHI, always(PHI))),), "future"),
    Schema("U1", (Imp(Until(PHI, PSI), eventually(PSI)),), "future"),
    Schema("U2", (iff(Until(PHI, PSI), disj(PSI, conj(PHI, Next(Until(PHI, PSI))))),), "future"),
    # past
    Schema("boxminus-K", (Imp(historically(Imp(PHI, PSI)),
                              Imp(historically(PHI), historically(PSI))),), "past"),
    Schema("wprev-K", (Imp(WPrev(Imp(PHI, PSI)), Imp(WPrev(PHI), WPrev(PSI))),), "past"),
    Schema("sw", (Imp(sprev(PHI), WPrev(PHI)),), "past"),
    Schema("FP", (Imp(PHI, Next(sprev(PHI))),), "past"),
    Schema("PF", (Imp(PHI, WPrev(Next(PHI))),), "past"),
    Schema("initial", (once(WPrev(BOT)),), "past"),
    Schema("boxminus-ind", (Imp(historically(Imp(PHI, WPrev(PHI))),
                                Imp(PHI, historically(PHI))),), "past"),
    Schema("S1", (Imp(Since(PHI, PSI), once(PSI)),), "past"),
    Schema("S2", (iff(Since(PHI, PSI), disj(PSI, conj(PHI, sprev(Since(PHI, PSI))))),), "past"),
    # justification core
    Schema("application", (Imp(_j(T, Imp(PHI, PSI)), Imp(_j(S, PHI), _j(App(T, S), PSI))),),
           "application"),
    Schema("indexed-application",
           (Imp(_j(T, Imp(PHI, PSI)), Imp(_j(S, PHI), _j(AppIdx(T, PHI, S), PSI))),),
           "indexed-application"),
    Schema("sum", (Imp(_j(T, PHI), _j(Sum(T, S), PHI)), Imp(_j(S, PHI), _j(Sum(T, S), PHI))),
           "lp"),
    Schema("reflexivity", (Imp(_j(T, PHI), PHI),), "core"),
    Schema("positive-introspection", (Imp(_j(T, PHI), _j(Bang(T), _j(T, PHI))),), "lp"),
    Schema("FP-application",
           (Imp(_j(T, Imp(PHI, PSI)), Imp(_j(S, PHI), Next(_j(App(T, S), sprev(PSI))))),), "fp"),
    Schema("FP-sum", (Imp(_j(T, PHI), Next(_j(Sum(T, S), sprev(PHI)))),
                      Imp(_j(S, PHI), Next(_j(Sum(T, S), sprev(PHI))))), "fp"),
    Schema("FP-positive-introspection",
           (Imp(_j(T, PHI), Next(_j(Bang(T), sprev(_j(T, PHI))))),), "fp"),
    # connecting principles
    Schema("generalize", (Imp(always(_j(T, PHI)), _j(Unary("gen", T), always(PHI))),), "ax"),
    Schema("box-access", (Imp(_j(T, always(PHI)), always(_j(Unary("acc", T), PHI))),), "ax"),
    Schema("next-access", (Imp(_j(T, always(PHI)), _j(Unary("accx", T), Next(PHI))),), "ax"),
    Schema("next-right", (Imp(_j(T, Next(PHI)), Next(_j(Unary("shr", T), PHI))),), "ax"),
    Schema("next-left", (Imp(Next(_j(T, PHI)), _j(Unary("shl", T), Next(PHI))),), "ax"),
    Schema("boxminus-generalize",
           (Imp(historically(_j(T, PHI)), _j(Unary("genp", T), historically(PHI))),), "ax"),
    Schema("boxminus-access",
           (Imp(_j(T, historically(PHI)), historically(_j(Unary("accp", T), PHI))),), "ax"),
    Schema("wprev-access",
           (Imp(_j(T, historically(PHI)), _j(Unary("accxp", T), WPrev(PHI))),), "ax"),
    Schema("wprev-right", (Imp(_j(T, WPrev(PHI)), WPrev(_j(Unary("rp", T), PHI))),), "ax"),
    Schema("sprev-right", (Imp(_j(T, sprev(PHI)), sprev(_j(Unary("shrp", T), PHI))),), "ax"),
    Schema("sprev-left", (Imp(sprev(_j(T, PHI)), _j(Unary("shlp", T), sprev(PHI))),), "ax"),
    Schema("mix1", (Imp(always(PHI), Next(PHI)),), "ax"),
    Schema("mix2", (Imp(historically(PHI), WPrev(PHI)),), "ax"),
    Schema("jpr", (Imp(Since(_j(T, PHI), _j(S, PSI)),
                       _j(Binary("pr", T, S), Since(_j(T, PHI), _j(S, PSI)))),), "ax"),
    Schema("jnl", (Imp(Until(_j(T, PHI), _j(S, PSI)),
                       _j(Binary("nl", T, S), Until(_j(T, PHI), _j(S, PSI)))),), "ax"),
    Schema("bar", (Imp(_j(T, PHI), Next(_j(Unary("bar", T), sprev(PHI)))),), "ax"),
)
SCHEMA_BY_ID = {s.id: s for s in SCHEMAS}
SCHEMA_IDS = tuple(s.id for s in SCHEMAS) + ("Taut",)


def enabled(schema: Schema, profile: LogicProfile) -> bool:
    g = schema.group
    if g == "future" or g == "core":
        return True
    if g == "past":
        return profile.base != LPLTL
    if g == "lp":
        return profile.core == LP
    if g == "application":
        return profile.core == LP and profile.base != LPLTL_I
    if g == "indexed-application":
        return profile.core == LP and profile.base == LPLTL_I
    if g == "fp":
        return profile.core == FP
    return schema.id in profile.axioms


def enabled_schemas(profile: LogicProfile) -> list[Schema]:
    return [s for s in SCHEMAS if enabled(s, profile)]


# ---------------------------------------------------------------- matching

def _match(pat, obj, b: dict) -> bool:
    if isinstance(pat, (MF, MT)):
        if isinstance(pat, MF) and not isinstance(obj, Formula):
            return False
        if isinstance(pat, MT) and not isinstance(obj, Term):
            return False
        prev = b.get(pat.name)
        if prev is None:
            b[pat.name] = obj
            return True
        return prev == obj
    if type(pat) is not type(obj):
        return False
    if isinstance(pat, Just):
        if isinstance(pat.agent, str):
            prev = b.get(pat.agent)
            if prev is None:
                b[pat.agent] = obj.agent
            elif prev != obj.agent:
                return False
        elif pat.agent != obj.agent:
            return False
        return _match(pat.term, obj.term, b) and _match(pat.body, obj.body, b)
    for name in pat._fields:
        pv, ov = getattr(pat, name), getattr(obj, name)
        if isinstance(pv, (Formula, Term)):
            if not _match(pv, ov, b):
                return False
        elif pv != ov:
            return False
    return True


def match_schema(schema: Schema, f: Formula):
    for shape in schema.shapes:
        b: dict = {}
        if _match(shape, f, b):
            return b
    return None


def match_axiom(f: Formula, profile: LogicProfile, only: str | None = None):
    """First enabled schema matching ``f`` as ``(schema_id, bindings)``, else None."""
    for schema in SCHEMAS:
        if only is not None and schema.id != only:
            continue
        if not enabled(schema, profile):
            continue
        b = match_schema(schema, f)
        if b is not None:
            return schema.id, b
    if only in (None, "Taut") and is_tautology(f):
        return "Taut", {}
    return None


def _subst(pat, b: dict):
    if isinstance(pat, (MF, MT)):
        return b[pat.name]
    if isinstance(pat, Just):
        agent = b[pat.agent] if isinstance(pat.agent, str) else pat.agent
        return Just(agent, _subst(pat.term, b), _subst(pat.body, b))
    if not pat._fields:
        return pat
    vals = []
    for name in pat._fields:
        v = getattr(pat, name)
        vals.append(_subst(v, b) if isinstance(v, (Formula, Term)) else v)
    return type(pat)(*vals)


def instantiate(schema_id: str, bindings: dict, shape: int = 0) -> Formula:
    """Fill a schema's metavariables; missing ones default harmlessly."""
    b = {"phi": BOT, "psi": BOT, "i": 1}
    b.update(bindings)
    schema = SCHEMA_BY_ID[schema_id]
    return _subst(schema.shapes[shape], b)


# ---------------------------------------------------------------- tautologies

_MAX_TABLE_ATOMS = 18


def _skeleton(f, atoms: dict):
    if isinstance(f, Bot):
        return ("0",)
    if isinstance(f, Imp):
        return ("->", _skeleton(f.left, atoms), _skeleton(f.right, atoms))
    if f not in atoms:
        atoms[f] = len(atoms)
    return ("a", atoms[f])


def _column(j: int, k: int) -> int:
    rows = 1 << k
    half = 1 << j
    period = half << 1
    unit = ((1 << half) - 1) << half
    return unit * (((1 << rows) - 1) // ((1 << period) - 1))


def _table(node, cols, full):
    tag = node[0]
    if tag == "0":
        return 0
    if tag == "a":
        return cols[node[1]]
    return (~_table(node[1], cols, full) | _table(node[2], cols, full)) & full


def _shannon(node, assign: dict):
    """Truth of a skeleton under a partial assignment; None when undetermined."""
    tag = node[0]
    if tag == "0":
        return False
    if tag == "a":
        return assign.get(node[1])
    a = _shannon(node[1], assign)
    b = _shannon(node[2], assign)
    if a is False or b is True:
        return True
    if a is True and b is False:
        return False
    return None


def _valid_by_splitting(node, k: int, assign: dict, j: int = 0) -> bool:
    v = _shannon(node, assign)
    if v is not None:
        return v
    for value in (True, False):
        assign[j] = value
        ok = _valid_by_splitting(node, k, assign, j + 1)
        del assign[j]
        if not ok:
            return False
    return True


def is_tautology(f: Formula) -> bool:
    """Validity of the propositional skeleton (non-implication subformulas are atoms)."""
    atoms: dict = {}
    node = _skeleton(f, atoms)
    k = len(atoms)
    if k > _MAX_TABLE_ATOMS:
        return _valid_by_splitting(node, k, {})
    full = (1 << (1 << k)) - 1
    cols = [_column(j, k) for j in range(k)]
    return _table(node, cols, full) == full
