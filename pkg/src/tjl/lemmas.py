"""Hand-built Hilbert derivations: the temporal lemma corpus and the internalization corpus.

``ProofBuilder`` keeps a derivation under construction and offers a few
derived moves (tautological consequence, lifting an implication under a
normal operator).  Each corpus entry is a function of the builder so the
shipped JSON files can be regenerated and compared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .axioms import is_tautology, match_axiom
from .profiles import get_profile
from .proof import Derivation, Rule, Step, with_flags
from .syntax import (
    BOT, Formula, Imp, Just, Next, Prop, Since, Until, Var, WPrev, always, conj, disj,
    eventually, historically, iff, neg, once, parse_formula, sprev, TOP,
)

P, Q = Prop("p"), Prop("q")

# operator -> (necessitation rule, K schema)
NORMAL = {
    Next: ("NextNec", "next-K"),
    WPrev: ("WPrevNec", "wprev-K"),
    always: ("BoxNec", "always-K"),
    historically: ("BoxMinusNec", "boxminus-K"),
}


class ProofBuilder:
    def __init__(self, premises=()):
        self.premises = list(premises)
        self.steps: list[Step] = []
        self._seen: dict = {}

    def _emit(self, f: Formula, rule: Rule) -> int:
        key = (f, rule)
        if key in self._seen:
            return self._seen[key]
        self.steps.append(Step(f, rule))
        n = len(self.steps) - 1
        self._seen[key] = n
        return n

    def formula(self, n: int) -> Formula:
        return self.steps[n].formula

    def premise(self, k: int) -> int:
        return self._emit(self.premises[k], Rule("Premise", k=k))

    def ax(self, f: Formula, schema: str | None = None) -> int:
        return self._emit(f, Rule("Axiom", schema=schema))

    def taut(self, f: Formula) -> int:
        if not is_tautology(f):
            raise ValueError("not a tautology")
        return self.ax(f, "Taut")

    def iax(self, f: Formula) -> int:
        return self._emit(f, Rule("IaxNec"))

    def mp(self, i: int, j: int) -> int:
        imp_ = self.formula(j)
        if not (isinstance(imp_, Imp) and imp_.left == self.formula(i)):
            raise ValueError("modus ponens mismatch")
        return self._emit(imp_.right, Rule("MP", i, j))

    def nec(self, op, i: int) -> int:
        rule, _ = NORMAL[op]
        return self._emit(op(self.formula(i)), Rule(rule, i))

    def taut_mp(self, goal: Formula, premises) -> int:
        """goal from earlier steps by one tautology P1 -> (P2 -> ... -> goal) and MPs."""
        premises = list(premises)
        f = goal
        for n in reversed(premises):
            f = Imp(self.formula(n), f)
        cur = self.taut(f)
        for n in premises:
            cur = self.mp(n, cur)
        return cur

    def lift(self, op, i: int, arity: int = 1) -> int:
        """From A1 -> ... -> An -> B at step i derive op A1 -> ... -> op An -> op B."""
        _, k_schema = NORMAL[op]
        hyps = []
        rest = self.formula(i)
        cur = self.nec(op, i)
        for k in range(arity):
            a, rest = rest.left, rest.right
            kax = self.ax(Imp(op(Imp(a, rest)), Imp(op(a), op(rest))), k_schema)
            if k == 0:
                cur = self.mp(cur, kax)
            else:
                goal = Imp(op(a), op(rest))
                for h in reversed(hyps):
                    goal = Imp(h, goal)
                cur = self.taut_mp(goal, [cur, kax])
            hyps.append(op(a))
        return cur

    def derivation(self) -> Derivation:
        return with_flags(Derivation(list(self.premises), list(self.steps)))


# ---------------------------------------------------------------- reusable pieces

def box_unfold(b: ProofBuilder, phi: Formula) -> int:
    """G phi -> (phi & X G phi), by modus ponens only."""
    u = Until(TOP, neg(phi))
    u2 = b.ax(iff(u, disj(neg(phi), conj(TOP, Next(u)))), "U2")
    fun = b.ax(iff(Next(neg(u)), neg(Next(u))), "fun")
    return b.taut_mp(Imp(always(phi), conj(phi, Next(always(phi)))), [u2, fun])


def box_next(b: ProofBuilder, phi: Formula) -> int:
    """G phi -> X phi."""
    g = always(phi)
    unfold = box_unfold(b, phi)
    now = b.taut_mp(Imp(g, phi), [unfold])
    later = b.taut_mp(Imp(g, Next(g)), [unfold])
    lifted = b.lift(Next, now)
    return b.taut_mp(Imp(g, Next(phi)), [later, lifted])


def hist_unfold(b: ProofBuilder, phi: Formula) -> int:
    """H phi -> (phi & Yw H phi), by modus ponens only."""
    s = Since(TOP, neg(phi))
    s2 = b.ax(iff(s, disj(neg(phi), conj(TOP, sprev(s)))), "S2")
    return b.taut_mp(Imp(historically(phi), conj(phi, WPrev(historically(phi)))), [s2])


def hist_wprev(b: ProofBuilder, phi: Formula) -> int:
    """H phi -> Yw phi."""
    h = historically(phi)
    unfold = hist_unfold(b, phi)
    now = b.taut_mp(Imp(h, phi), [unfold])
    before = b.taut_mp(Imp(h, WPrev(h)), [unfold])
    lifted = b.lift(WPrev, now)
    return b.taut_mp(Imp(h, WPrev(phi)), [before, lifted])


# ---------------------------------------------------------------- temporal lemmas

def lemma_box_unfold(phi=P):
    b = ProofBuilder()
    box_unfold(b, phi)
    return b


def lemma_box_next(phi=P):
    b = ProofBuilder()
    box_next(b, phi)
    return b


def lemma_hist_unfold(phi=P):
    b = ProofBuilder()
    hist_unfold(b, phi)
    return b


def lemma_hist_wprev(phi=P):
    b = ProofBuilder()
    hist_wprev(b, phi)
    return b


def lemma_sprev_not_initial(phi=P):
    """Ys phi -> ~Yw false."""
    b = ProofBuilder()
    t = b.taut(Imp(BOT, neg(phi)))
    k = b.lift(WPrev, t)
    b.taut_mp(Imp(sprev(phi), neg(WPrev(BOT))), [k])
    return b


def lemma_wprev_or(a=P, c=Q):
    """Yw(a | c) <-> (Yw a | Yw c)."""
    b = ProofBuilder()
    dn = b.lift(WPrev, b.taut(Imp(neg(neg(a)), a)))
    sw = b.ax(Imp(sprev(neg(a)), WPrev(neg(a))), "sw")
    k = b.ax(Imp(WPrev(disj(a, c)), Imp(WPrev(neg(a)), WPrev(c))), "wprev-K")
    l1 = b.lift(WPrev, b.taut(Imp(a, disj(a, c))))
    l2 = b.lift(WPrev, b.taut(Imp(c, disj(a, c))))
    b.taut_mp(iff(WPrev(disj(a, c)), disj(WPrev(a), WPrev(c))), [dn, sw, k, l1, l2])
    return b


def lemma_sprev_or(a=P, c=Q):
    """Ys(a | c) <-> (Ys a | Ys c)."""
    b = ProofBuilder()
    n = neg(disj(a, c))
    l1 = b.lift(WPrev, b.taut(Imp(n, neg(a))))
    l2 = b.lift(WPrev, b.taut(Imp(n, neg(c))))
    l3 = b.lift(WPrev, b.taut(Imp(neg(a), Imp(neg(c), n))), 2)
    b.taut_mp(iff(sprev(disj(a, c)), disj(sprev(a), sprev(c))), [l1, l2, l3])
    return b


def lemma_wprev_or_mixed(a=P, c=Q):
    """Yw(a | c) <-> (Ys a | Yw c)."""
    b = ProofBuilder()
    k = b.ax(Imp(WPrev(disj(a, c)), Imp(WPrev(neg(a)), WPrev(c))), "wprev-K")
    sw = b.ax(Imp(sprev(a), WPrev(a)), "sw")
    l1 = b.lift(WPrev, b.taut(Imp(a, disj(a, c))))
    l2 = b.lift(WPrev, b.taut(Imp(c, disj(a, c))))
    b.taut_mp(iff(WPrev(disj(a, c)), disj(sprev(a), WPrev(c))), [k, sw, l1, l2])
    return b


def _and_lemma(op, a, c):
    b = ProofBuilder()
    l1 = b.lift(op, b.taut(Imp(conj(a, c), a)))
    l2 = b.lift(op, b.taut(Imp(conj(a, c), c)))
    l3 = b.lift(op, b.taut(Imp(a, Imp(c, conj(a, c)))), 2)
    b.taut_mp(iff(op(conj(a, c)), conj(op(a), op(c))), [l1, l2, l3])
    return b


def lemma_wprev_and(a=P, c=Q):
    """Yw(a & c) <-> (Yw a & Yw c)."""
    return _and_lemma(WPrev, a, c)


def lemma_next_and(a=P, c=Q):
    """X(a & c) <-> (X a & X c)."""
    return _and_lemma(Next, a, c)


def lemma_next_or(a=P, c=Q):
    """X(a | c) <-> (X a | X c)."""
    b = ProofBuilder()
    k = b.ax(Imp(Next(disj(a, c)), Imp(Next(neg(a)), Next(c))), "next-K")
    fun = b.ax(iff(Next(neg(a)), neg(Next(a))), "fun")
    l1 = b.lift(Next, b.taut(Imp(a, disj(a, c))))
    l2 = b.lift(Next, b.taut(Imp(c, disj(a, c))))
    b.taut_mp(iff(Next(disj(a, c)), disj(Next(a), Next(c))), [k, fun, l1, l2])
    return b


@dataclass(frozen=True)
class Entry:
    name: str
    logic: str
    build: object
    description: str

    def derivation(self) -> Derivation:
        return self.build().derivation()


LEMMAS = (
    Entry("box-unfold", "lpltl-p", lemma_box_unfold, "G p -> (p & X G p), modus ponens only"),
    Entry("box-next", "lpltl-p", lemma_box_next, "G p -> X p"),
    Entry("hist-unfold", "lpltl-p", lemma_hist_unfold, "H p -> (p & Yw H p), modus ponens only"),
    Entry("hist-wprev", "lpltl-p", lemma_hist_wprev, "H p -> Yw p"),
    Entry("sprev-not-initial", "lpltl-p", lemma_sprev_not_initial, "Ys p -> ~Yw false"),
    Entry("wprev-or", "lpltl-p", lemma_wprev_or, "Yw distributes over disjunction"),
    Entry("sprev-or", "lpltl-p", lemma_sprev_or, "Ys distributes over disjunction"),
    Entry("wprev-or-mixed", "lpltl-p", lemma_wprev_or_mixed, "Yw(p | q) <-> (Ys p | Yw q)"),
    Entry("wprev-and", "lpltl-p", lemma_wprev_and, "Yw distributes over conjunction"),
    Entry("next-and", "lpltl-p", lemma_next_and, "X distributes over conjunction"),
    Entry("next-or", "lpltl-p", lemma_next_or, "X distributes over disjunction"),
)


# ---------------------------------------------------------------- internalization corpus

def _single(f, schema=None):
    def build():
        b = ProofBuilder()
        b.ax(f, schema)
        return b
    return build


def _nec_of(op, f):
    def build():
        b = ProofBuilder()
        b.nec(op, b.taut(f))
        return b
    return build


def _weaken():
    b = ProofBuilder()
    a = b.taut(Imp(P, P))
    w = b.taut(Imp(Imp(P, P), Imp(Q, Imp(P, P))))
    b.mp(a, w)
    return b


def _refl_weaken():
    b = ProofBuilder()
    x = Just(1, Var("x"), P)
    r = b.ax(Imp(x, P), "reflexivity")
    b.taut_mp(Imp(x, Imp(Q, P)), [r])
    return b


def _always_k_lift():
    b = ProofBuilder()
    b.lift(always, b.taut(Imp(P, Imp(Q, P))))
    return b


def _until_nested_nec():
    b = ProofBuilder()
    u = b.ax(Imp(Until(P, Q), eventually(Q)), "U1")
    b.nec(always, b.nec(Next, u))
    return b


def _iax_tower():
    b = ProofBuilder()
    b.iax(parse_formula("[c9]_1 (p -> p)"))
    return b


def _initial_hist():
    b = ProofBuilder()
    b.nec(historically, b.ax(once(WPrev(BOT)), "initial"))
    return b


def _box_next_nec():
    b = ProofBuilder()
    b.nec(always, box_next(b, P))
    return b


INTERNALIZE = LEMMAS + (
    Entry("taut-identity", "lpltl-p", _single(Imp(P, P), "Taut"), "p -> p"),
    Entry("initial", "lpltl-p", _single(once(WPrev(BOT)), "initial"), "O Yw false"),
    Entry("fp", "lpltl-p", _single(Imp(P, Next(sprev(P))), "FP"), "p -> X Ys p"),
    Entry("weaken", "lpltl-p", _weaken, "q -> (p -> p) by modus ponens"),
    Entry("box-nec", "lpltl-p", _nec_of(always, Imp(P, P)), "G(p -> p)"),
    Entry("hist-nec", "lpltl-p", _nec_of(historically, Imp(P, P)), "H(p -> p)"),
    Entry("next-nec", "lpltl-p", _nec_of(Next, Imp(P, P)), "X(p -> p)"),
    Entry("wprev-nec", "lpltl-p", _nec_of(WPrev, Imp(P, P)), "Yw(p -> p)"),
    Entry("until-nested-nec", "lpltl-p", _until_nested_nec, "G X(p U q -> F q)"),
    Entry("induction", "lpltl-p",
          _single(Imp(always(Imp(P, Next(P))), Imp(P, always(P))), "ind"), "induction axiom"),
    Entry("iax-tower", "lpltl-p", _iax_tower, "a constant tower under the total specification"),
    Entry("refl-weaken", "lpltl-p", _refl_weaken, "[x]_1 p -> (q -> p)"),
    Entry("always-k-lift", "lpltl-p", _always_k_lift, "G p -> G(q -> p)"),
    Entry("initial-hist", "lpltl-p", _initial_hist, "H O Yw false"),
)


def _premise_mp():
    b = ProofBuilder([P, Imp(P, Q)])
    b.mp(b.premise(0), b.premise(1))
    return b


def _premise_box_next():
    b = ProofBuilder([always(P)])
    b.mp(b.premise(0), box_next(b, P))
    return b


DEDUCTION = (
    Entry("premise-mp", "lpltl-p", _premise_mp, "q from p and p -> q"),
    Entry("premise-box-next", "lpltl-p", _premise_box_next, "X p from G p"),
)


def corpus_dir() -> Path:
    return Path(__file__).parent / "corpus"


def entry_json(e: Entry) -> dict:
    d = e.derivation()
    out = {"name": e.name, "logic": e.logic, "description": e.description}
    out.update(d.to_json())
    return out


def write_corpus(root: Path | None = None) -> list[Path]:
    root = Path(root) if root is not None else corpus_dir()
    written = []
    groups = (("lemmas", LEMMAS), ("internalize", INTERNALIZE[len(LEMMAS):]),
              ("deduction", DEDUCTION))
    for sub, entries in groups:
        (root / sub).mkdir(parents=True, exist_ok=True)
        for e in entries:
            path = root / sub / f"{e.name}.json"
            path.write_text(json.dumps(entry_json(e), indent=1, sort_keys=True) + "\n")
            written.append(path)
    return written


def load_corpus(sub: str) -> dict:
    out = {}
    for path in sorted((corpus_dir() / sub).glob("*.json")):
        out[path.stem] = json.loads(path.read_text())
    return out


def schema_of(f: Formula, logic: str = "lpltl-p"):
    m = match_axiom(f, get_profile(logic))
    return m[0] if m else None


if __name__ == "__main__":
    for p in write_corpus():
        print(p)
