"""Independent reference implementations used as test oracles.

Everything here works on explicit finite windows of positions with the
textbook semantics, never on the stream algebra of the package.
"""

from __future__ import annotations

from collections import deque

from tjl.decide import AtomSpace
from tjl.models import MkModel
from tjl.syntax import (
    App, Bang, Bot, Const, Imp, Just, Next, Prop, Since, Sum, Until, WPrev, subterms, walk,
)


# ---------------------------------------------------------------- streams

def unroll(s, n: int) -> list[bool]:
    p, q = len(s.prefix), len(s.loop)
    return [s.prefix[k] if k < p else s.loop[(k - p) % q] for k in range(n)]


def naive_until(a, b, n: int) -> list[bool]:
    """Until at positions 0..n-1 by scanning forward far enough to cover one full period."""
    p = max(len(a.prefix), len(b.prefix))
    q = len(a.loop) * len(b.loop)
    horizon = n + p + q + 1
    av, bv = unroll(a, horizon), unroll(b, horizon)
    out = []
    for k in range(n):
        val = False
        for m in range(k, horizon):
            if bv[m]:
                val = True
                break
            if not av[m]:
                break
        out.append(val)
    return out


def naive_since(a, b, n: int) -> list[bool]:
    av, bv = unroll(a, n), unroll(b, n)
    out = []
    for k in range(n):
        val = False
        for m in range(k, -1, -1):
            if bv[m]:
                val = True
                break
            if not av[m]:
                break
        out.append(val)
    return out


# ---------------------------------------------------------------- formulas on a window

def _depth(f) -> int:
    return 1 + max((_depth(c) for c in _kids(f)), default=0)


def _kids(f):
    if isinstance(f, Imp) or isinstance(f, (Until, Since)):
        return (f.left, f.right)
    if isinstance(f, (Next, WPrev, Just)):
        return (f.body,)
    return ()


class WindowEvaluator:
    """Textbook point semantics of the base logic on explicit positions.

    Values are kept for positions 0..L-1 with L = p + q*(depth+2).  A formula
    of nesting depth d is periodic with period q from position p + q*d on, so
    reads beyond the window fold back into its last period.  Evidence is
    saturated per state over the subterms that occur in the query, with the
    application, sum, bang and constant rules only.
    """

    def __init__(self, m: MkModel, query):
        prefix, loop = m.run
        self.p, self.q = len(prefix), len(loop)
        self.safe = self.p + self.q * (_depth(query) + 2)
        self.states = [prefix[k] if k < self.p else loop[(k - self.p) % self.q]
                       for k in range(self.safe)]
        self.model = m
        self.memo = {}
        self.evidence = self._saturate(query)

    def _saturate(self, query):
        terms = set()
        for g in walk(query):
            if isinstance(g, Just):
                terms.add((g.agent, g.term))
                for t in subterms(g.term):
                    terms.add((g.agent, t))
        cs = {}
        if self.model.cs.kind == "explicit":
            for f in self.model.cs.entries:
                cs.setdefault((f.agent, f.term.name), set()).add(f.body)
        per_state = {}
        for state in set(self.states):
            ev = {}
            for (s, a, t, f) in self.model.evidence:
                if s == state:
                    ev.setdefault((a, t), set()).add(f)
            # iterate rules to a fixpoint over the relevant terms
            changed = True
            while changed:
                changed = False
                for (a, t) in terms:
                    cur = ev.setdefault((a, t), set())
                    new = set()
                    if isinstance(t, Const):
                        new |= cs.get((a, t.name), set())
                    elif isinstance(t, Sum):
                        new |= ev.get((a, t.left), set()) | ev.get((a, t.right), set())
                    elif isinstance(t, App):
                        right = ev.get((a, t.right), set())
                        new |= {f.right for f in ev.get((a, t.left), set())
                                if isinstance(f, Imp) and f.left in right}
                    elif isinstance(t, Bang):
                        new |= {Just(a, t.term, f) for f in ev.get((a, t.term), set())}
                    if not new <= cur:
                        cur |= new
                        changed = True
            per_state[state] = ev
        return per_state

    def _fold(self, k: int) -> int:
        if k < self.safe:
            return k
        top = self.safe - self.q
        return top + (k - top) % self.q

    def values(self, f) -> list[bool]:
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        n, fold = self.safe, self._fold
        if isinstance(f, Prop):
            out = [f.name in self.model.valuation.get(s, ()) for s in self.states]
        elif isinstance(f, Bot):
            out = [False] * n
        elif isinstance(f, Imp):
            a, b = self.values(f.left), self.values(f.right)
            out = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(f, Next):
            a = self.values(f.body)
            out = [a[fold(k + 1)] for k in range(n)]
        elif isinstance(f, WPrev):
            a = self.values(f.body)
            out = [True] + a[:-1]
        elif isinstance(f, Until):
            a, b = self.values(f.left), self.values(f.right)
            out = [False] * n
            for k in range(n):
                # one full period past the window settles every scan
                for m in range(k, n + self.q + 1):
                    if b[fold(m)]:
                        out[k] = True
                        break
                    if not a[fold(m)]:
                        break
        elif isinstance(f, Since):
            a, b = self.values(f.left), self.values(f.right)
            out = [False] * n
            for k in range(n):
                for m in range(k, -1, -1):
                    if b[m]:
                        out[k] = True
                        break
                    if not a[m]:
                        break
        elif isinstance(f, Just):
            body = self.values(f.body)
            out = [body[k] and f.body in self.evidence[self.states[k]].get((f.agent, f.term), ())
                   for k in range(n)]
        else:
            raise TypeError(f)
        self.memo[f] = out
        return out

    def at(self, f, k: int) -> bool:
        return self.values(f)[self._fold(k)]


# ---------------------------------------------------------------- atoms and satisfiability

def brute_force_atoms(space: AtomSpace) -> list[int]:
    """Filter all 2^|A| subsets of the positive closure by the coherence rules."""
    from tjl.decide import _evidence
    fs = space.formulas
    ix = space.index
    out = []
    for bits in range(1 << len(fs)):
        has = lambda g: bool(bits >> ix[g] & 1)
        ok = not has(fs[0])
        for f in fs:
            if not ok:
                break
            if isinstance(f, Imp) and has(f) != ((not has(f.left)) or has(f.right)):
                ok = False
            elif isinstance(f, Just) and has(f) and not has(f.body):
                ok = False
            elif isinstance(f, Until):
                if has(f.right) and not has(f):
                    ok = False
                if has(f) and not has(f.right) and not has(f.left):
                    ok = False
            elif isinstance(f, Since):
                if has(f.right) and not has(f):
                    ok = False
                if has(f) and not has(f.right) and not has(f.left):
                    ok = False
                if has(WPrev(Bot())) and has(f) != has(f.right):
                    ok = False
            elif isinstance(f, WPrev) and has(WPrev(Bot())) and not has(f):
                ok = False
        if ok:
            base = {}
            for f in fs:
                if isinstance(f, Just) and has(f):
                    base.setdefault((f.agent, f.term), set()).add(f.body)
            memo = {}
            for f in fs:
                if isinstance(f, Just) and not has(f) and has(f.body):
                    if f.body in _evidence(f.agent, f.term, base, space.cs_idx, memo):
                        ok = False
                        break
        if ok:
            out.append(bits)
    return out


def related(space: AtomSpace, a: int, b: int) -> bool:
    """The successor relation, read off the closure formula by formula."""
    ix = space.index
    has = lambda atom, g: bool(atom >> ix[g] & 1)
    if has(b, WPrev(Bot())):
        return False
    for f in space.formulas:
        if isinstance(f, Next) and has(a, f) != has(b, f.body):
            return False
        if isinstance(f, WPrev) and has(b, f) != has(a, f.body):
            return False
        if isinstance(f, Until) and \
                has(a, f) != (has(a, f.right) or (has(a, f.left) and has(b, f))):
            return False
        if isinstance(f, Since) and \
                has(b, f) != (has(b, f.right) or (has(b, f.left) and has(a, f))):
            return False
    return True


def lasso_sat(space: AtomSpace, atoms=None) -> bool:
    """Search the product of atoms with a breakpoint obligation set for an accepting lasso.

    A product node is (atom index, pending untils, formula seen).  Pending
    untils are those owed since the last breakpoint; when the set empties the
    node is a breakpoint and the set is refilled from the current atom.
    """
    atoms = space.atoms if atoms is None else atoms
    untils = [(space.index[f], space.index[f.right]) for f in space.formulas
              if isinstance(f, Until)]
    chi_k = space.index[space.chi]
    initial_k = space.index[WPrev(Bot())]

    def owed(a):
        return frozenset(k for k, (uk, rk) in enumerate(untils)
                         if a >> uk & 1 and not a >> rk & 1)

    succ = {x: [y for y, b in enumerate(atoms) if related(space, a, b)]
            for x, a in enumerate(atoms)}

    def step(node):
        x, pending, seen = node
        for y in succ[x]:
            b = atoms[y]
            if pending:
                nxt = frozenset(k for k in pending if not b >> untils[k][1] & 1)
            else:
                nxt = owed(b)
            yield (y, nxt, seen or bool(b >> chi_k & 1))

    starts = [(x, owed(a), bool(a >> chi_k & 1)) for x, a in enumerate(atoms)
              if a >> initial_k & 1]
    reach = set(starts)
    queue = deque(starts)
    while queue:
        node = queue.popleft()
        for nxt in step(node):
            if nxt not in reach:
                reach.add(nxt)
                queue.append(nxt)
    for node in reach:
        x, pending, seen = node
        if pending or not seen:
            continue
        # is this breakpoint on a cycle?
        frontier = deque(step(node))
        visited = set()
        while frontier:
            v = frontier.popleft()
            if v == node:
                return True
            if v in visited:
                continue
            visited.add(v)
            frontier.extend(step(v))
    return False
