"""Proof-term synthesis: turn a derivation of phi into a term t and a derivation of [t]_i phi."""

from __future__ import annotations

from .lemmas import ProofBuilder, box_next
from .profiles import LPLTL_I, FP, LogicProfile, get_profile
from .proof import ConstantSpec, Derivation, check_derivation
from .syntax import (
    App, AppIdx, Const, Formula, Imp, Just, Next, Term, Unary, WPrev, always, as_always,
    as_historically, historically, subterms, terms_of, walk,
)

RESTRICTED = "restricted"
LPLTL_INT = "lpltl-int"
ACCESS = "access"
MODES = (RESTRICTED, LPLTL_INT, ACCESS)

MODE_AXIOMS = {
    RESTRICTED: frozenset(),
    LPLTL_INT: frozenset({"generalize", "boxminus-generalize", "mix1", "mix2"}),
    ACCESS: frozenset({"generalize", "boxminus-generalize", "next-access", "wprev-access"}),
}
MODE_PROFILES = {RESTRICTED: "lpltl-p", LPLTL_INT: "lpltl-int", ACCESS: "lpltl-acc"}
_BASIC_RULES = {"Axiom", "MP", "IaxNec"}


class InternalizeError(ValueError):
    pass


def mode_profile(mode: str) -> LogicProfile:
    if mode not in MODES:
        raise InternalizeError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    return get_profile(MODE_PROFILES[mode])


class ConstantAllocator:
    """Names c1, c2, ... in first-use order, skipping names already taken."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.names: dict = {}
        self._next = 1

    def __call__(self, f: Formula, agent: int) -> Const:
        key = (f, agent)
        name = self.names.get(key)
        if name is None:
            while f"c{self._next}" in self.taken:
                self._next += 1
            name = f"c{self._next}"
            self._next += 1
            self.taken.add(name)
            self.names[key] = name
        return Const(name)


def _constants_in(formulas) -> set:
    out = set()
    for f in formulas:
        for t in terms_of(f):
            for u in subterms(t):
                if isinstance(u, Const):
                    out.add(u.name)
    return out


def term_size(t: Term) -> int:
    """Number of distinct subterms (shared subterms counted once)."""
    return len(set(subterms(t)))


def _application(profile: LogicProfile, left: Term, index: Formula, right: Term) -> Term:
    if profile.base == LPLTL_I:
        return AppIdx(left, index, right)
    return App(left, right)


def _apply(b: ProofBuilder, profile, agent, imp_step: int, arg_step: int):
    """From [s](A -> B) and [r]A derive [s.r]B; returns (term, step)."""
    ji, ja = b.formula(imp_step), b.formula(arg_step)
    a, c = ji.body.left, ji.body.right
    schema = "indexed-application" if profile.base == LPLTL_I else "application"
    t = _application(profile, ji.term, a, ja.term)
    ax = b.ax(Imp(ji, Imp(ja, Just(agent, t, c))), schema)
    return t, b.mp(arg_step, b.mp(imp_step, ax))


def _generalize(b: ProofBuilder, agent, step: int, past: bool):
    """From [s]A derive [gen s]G A (or [genp s]H A)."""
    j = b.formula(step)
    op, name, schema = (historically, "genp", "boxminus-generalize") if past \
        else (always, "gen", "generalize")
    boxed = b.nec(op, step)
    t = Unary(name, j.term)
    ax = b.ax(Imp(op(j), Just(agent, t, op(j.body))), schema)
    return t, b.mp(boxed, ax)


def _step_down(b, profile, mode, alloc, agent, step: int, past: bool):
    """From [s]G A derive [..]X A (or from [s]H A derive [..]Yw A)."""
    j = b.formula(step)
    inner = as_historically(j.body) if past else as_always(j.body)
    target = WPrev(inner) if past else Next(inner)
    if mode == LPLTL_INT:
        mix = Imp(j.body, target)
        c = alloc(mix, agent)
        cstep = b.iax(Just(agent, c, mix))
        return _apply(b, profile, agent, cstep, step)
    op, schema = ("accxp", "wprev-access") if past else ("accx", "next-access")
    t = Unary(op, j.term)
    ax = b.ax(Imp(j, Just(agent, t, target)), schema)
    return t, b.mp(step, ax)


def _check_input(d: Derivation, profile: LogicProfile, mode: str):
    if d.premises:
        raise InternalizeError("internalization needs a derivation without premises")
    if profile.core == FP:
        raise InternalizeError("internalization is not available for the FP core")
    missing = MODE_AXIOMS[mode] - profile.axioms
    if missing:
        raise InternalizeError(f"mode {mode} needs axioms {sorted(missing)}")
    for n, s in enumerate(d.steps):
        if mode == RESTRICTED and s.rule.type not in _BASIC_RULES:
            raise InternalizeError(
                f"step {n}: rule {s.rule.type} is not allowed in restricted mode")
        if s.rule.type == "Premise":
            raise InternalizeError(f"step {n}: premises are not allowed")
    res = check_derivation(d, profile, ConstantSpec.total())
    if not res.ok:
        n, msg = res.errors[0]
        raise InternalizeError(f"input derivation does not check: step {n}: {msg}")


def internalize(d: Derivation, agent: int = 1, mode: str = LPLTL_INT,
                profile: LogicProfile | None = None):
    """Return (t, derivation of [t]_agent phi) for the conclusion phi of d."""
    profile = profile or mode_profile(mode)
    if mode not in MODES:
        raise InternalizeError(f"unknown mode {mode!r}")
    _check_input(d, profile, mode)
    alloc = ConstantAllocator(_constants_in(s.formula for s in d.steps))
    b = ProofBuilder()
    done: dict[int, tuple] = {}

    def go(n: int):
        if n in done:
            return done[n]
        s = d.steps[n]
        f, r = s.formula, s.rule
        if r.type in ("Axiom", "IaxNec"):
            c = alloc(f, agent)
            out = (c, b.iax(Just(agent, c, f)))
        elif r.type == "MP":
            ti, si = go(r.i)
            tj, sj = go(r.j)
            out = _apply(b, profile, agent, sj, si)
        elif r.type in ("BoxNec", "BoxMinusNec"):
            _, sc = go(r.i)
            out = _generalize(b, agent, sc, r.type == "BoxMinusNec")
        elif r.type in ("NextNec", "WPrevNec"):
            past = r.type == "WPrevNec"
            _, sc = go(r.i)
            _, sg = _generalize(b, agent, sc, past)
            out = _step_down(b, profile, mode, alloc, agent, sg, past)
        else:
            raise InternalizeError(f"step {n}: cannot internalize rule {r.type}")
        done[n] = out
        return out

    term, _ = go(len(d.steps) - 1)
    return term, b.derivation()


def derived_access(t: Term, agent: int, phi: Formula, past: bool = False,
                   allocator: ConstantAllocator | None = None):
    """[t]G phi -> [a.t]X phi (or [t]H phi -> [b.t]Yw phi) from a mix constant.

    Returns (a.t, derivation).
    """
    profile = mode_profile(LPLTL_INT)
    alloc = allocator or ConstantAllocator(_constants_in([Just(agent, t, phi)]))
    op, target = (historically, WPrev(phi)) if past else (always, Next(phi))
    mix = Imp(op(phi), target)
    b = ProofBuilder()
    c = alloc(mix, agent)
    cstep = b.iax(Just(agent, c, mix))
    hyp = Just(agent, t, op(phi))
    term = _application(profile, c, op(phi), t)
    ax = b.ax(Imp(Just(agent, c, mix), Imp(hyp, Just(agent, term, target))), "application")
    b.mp(cstep, ax)
    return term, b.derivation()


def composed_access(t: Term, agent: int, phi: Formula):
    """[t]G phi -> [shl(acc t)]X phi from box-access and next-left.

    Returns (shl(acc t), derivation) checked under lpltl-p plus those two axioms.
    """
    acc = Unary("acc", t)
    s = Unary("shl", acc)
    inner = Just(agent, acc, phi)
    b = ProofBuilder()
    a1 = b.ax(Imp(Just(agent, t, always(phi)), always(inner)), "box-access")
    a2 = box_next(b, inner)
    a3 = b.ax(Imp(Next(inner), Just(agent, s, Next(phi))), "next-left")
    b.taut_mp(Imp(Just(agent, t, always(phi)), Just(agent, s, Next(phi))), [a1, a2, a3])
    return s, b.derivation()


def iax_formulas(d: Derivation) -> list[Formula]:
    """Constant towers introduced by IaxNec, with their tails (a downward closed set)."""
    out = set()
    for s in d.steps:
        if s.rule.type == "IaxNec":
            f = s.formula
            while isinstance(f, Just) and isinstance(f.term, Const):
                out.add(f)
                f = f.body
    return sorted(out, key=lambda f: (len(list(walk(f))), repr(f)))


def necessitation_count(d: Derivation) -> int:
    return sum(1 for s in d.steps if s.rule.type.endswith("Nec") and s.rule.type != "IaxNec")
