"""Satisfiability and validity for the base logic over Mkrtychev models.

Atoms are locally coherent truth assignments to the positive closure of the
input formula, stored as bitmasks.  The next-step relation links atoms; a
formula is satisfiable iff some initial atom reaches an atom containing it,
from which a self-fulfilling strongly connected component is reachable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .models import MkModel
from .profiles import get_profile
from .proof import ConstantSpec, EXPLICIT, TOTAL
from .syntax import (
    App, BOT, Bang, Bot, Const, Formula, Imp, Just, NotInProfile, Prop, Since, Sum, Until,
    Var, WPrev, Next, closure, formula_key, neg, size, terms_of,
)

BASE = get_profile("lpltl-p")


def _require_base(chi: Formula, cs: ConstantSpec) -> None:
    BASE.require(chi)
    for t in terms_of(chi):
        if not isinstance(t, (Const, Var, Bang, Sum, App)):
            raise NotInProfile("decision is only available for the base logic")
    if cs.kind == TOTAL:
        raise ValueError("decision needs an empty or explicit constant specification")


# ---------------------------------------------------------------- evidence inside an atom

def _cs_index(cs: ConstantSpec) -> dict:
    out: dict = {}
    if cs.kind == EXPLICIT:
        for f in cs.entries:
            out.setdefault((f.agent, f.term.name), set()).add(f.body)
    return out


def _evidence(i, t, base: dict, cs_idx: dict, memo: dict) -> set:
    """Formulas the least evidence function generated by ``base`` puts at term t."""
    key = (i, t)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = set(base.get(key, ()))
    if isinstance(t, Const):
        out |= cs_idx.get((i, t.name), set())
    elif isinstance(t, Sum):
        out |= _evidence(i, t.left, base, cs_idx, memo)
        out |= _evidence(i, t.right, base, cs_idx, memo)
    elif isinstance(t, App):
        right = _evidence(i, t.right, base, cs_idx, memo)
        for f in _evidence(i, t.left, base, cs_idx, memo):
            if isinstance(f, Imp) and f.left in right:
                out.add(f.right)
    elif isinstance(t, Bang):
        out |= {Just(i, t.term, f) for f in _evidence(i, t.term, base, cs_idx, memo)}
    memo[key] = out
    return out


# ---------------------------------------------------------------- atoms

class AtomSpace:
    """Positive closure, its coherent atoms and the bookkeeping for the step relation."""

    def __init__(self, chi: Formula, cs: ConstantSpec):
        self.chi = chi
        self.cs = cs
        cl = closure(chi)
        wbot = WPrev(BOT)
        rest = sorted((f for f in cl.positive if f not in (BOT, wbot)),
                      key=lambda f: (size(f), formula_key(f)))
        self.formulas = [BOT, wbot] + rest
        self.index = {f: k for k, f in enumerate(self.formulas)}
        self.wbot = self.index[wbot]
        ix = self.index
        self.nexts = [(ix[f], ix[f.body]) for f in self.formulas if isinstance(f, Next)]
        self.wprevs = [(ix[f], ix[f.body]) for f in self.formulas if isinstance(f, WPrev)]
        self.untils = [(ix[f], ix[f.left], ix[f.right]) for f in self.formulas
                       if isinstance(f, Until)]
        self.sinces = [(ix[f], ix[f.left], ix[f.right]) for f in self.formulas
                       if isinstance(f, Since)]
        self.justs = [k for k, f in enumerate(self.formulas) if isinstance(f, Just)]
        self.cs_idx = _cs_index(cs)
        self.atoms = self._enumerate()

    def has(self, atom: int, f: Formula) -> bool:
        return bool(atom >> self.index[f] & 1)

    def members(self, atom: int) -> list[Formula]:
        return [f for k, f in enumerate(self.formulas) if atom >> k & 1]

    def is_initial(self, atom: int) -> bool:
        return bool(atom >> self.wbot & 1)

    # enumeration by backtracking in children-first order
    def _enumerate(self) -> list[int]:
        fs = self.formulas
        ix = self.index
        n = len(fs)
        out = []
        wbot = self.wbot

        def options(k, bits):
            f = fs[k]
            bit = lambda g: bits >> ix[g] & 1
            if isinstance(f, Bot):
                return (0,)
            if isinstance(f, Imp):
                return ((1 if (not bit(f.left)) or bit(f.right) else 0),)
            initial = k > wbot and bits >> wbot & 1
            if isinstance(f, WPrev):
                return (1,) if initial else (0, 1)
            if isinstance(f, (Until, Since)):
                psi, phi = bit(f.right), bit(f.left)
                if isinstance(f, Since) and initial:
                    return (psi,)
                if psi:
                    return (1,)
                return (0, 1) if phi else (0,)
            if isinstance(f, Just):
                return (0, 1) if bit(f.body) else (0,)
            return (0, 1)

        def rec(k, bits):
            if k == n:
                if self._evidence_coherent(bits):
                    out.append(bits)
                return
            for v in options(k, bits):
                rec(k + 1, bits | (v << k))

        rec(0, 0)
        return out

    def _evidence_coherent(self, bits: int) -> bool:
        if not self.justs:
            return True
        fs = self.formulas
        base: dict = {}
        for k in self.justs:
            if bits >> k & 1:
                f = fs[k]
                base.setdefault((f.agent, f.term), set()).add(f.body)
        memo: dict = {}
        for k in self.justs:
            f = fs[k]
            if not bits >> k & 1 and bits >> self.index[f.body] & 1:
                if f.body in _evidence(f.agent, f.term, base, self.cs_idx, memo):
                    return False
        return True

    # step relation
    def successor_requirement(self, a: int):
        """(mask, value) that a successor's bits must match, or None if impossible."""
        mask = 1 << self.wbot
        val = 0

        def need(k, v):
            nonlocal mask, val
            if mask >> k & 1:
                return (val >> k & 1) == v
            mask |= 1 << k
            val |= v << k
            return True

        for xk, bk in self.nexts:
            if not need(bk, a >> xk & 1):
                return None
        for yk, bk in self.wprevs:
            if not need(yk, a >> bk & 1):
                return None
        for uk, lk, rk in self.untils:
            if not (a >> rk & 1) and (a >> lk & 1):
                if not need(uk, a >> uk & 1):
                    return None
        return mask, val

    def since_ok(self, a: int, b: int) -> bool:
        for sk, lk, rk in self.sinces:
            want = (b >> rk & 1) or ((b >> lk & 1) and (a >> sk & 1))
            if (b >> sk & 1) != want:
                return False
        return True


def build_atoms(chi: Formula, cs: ConstantSpec | None = None) -> AtomSpace:
    cs = cs or ConstantSpec.empty()
    _require_base(chi, cs)
    return AtomSpace(chi, cs)


def next_relation(space: AtomSpace, a: int, b: int) -> bool:
    req = space.successor_requirement(a)
    if req is None:
        return False
    mask, val = req
    return (b & mask) == val and space.since_ok(a, b)


# ---------------------------------------------------------------- graph

@dataclass
class Witness:
    space: AtomSpace
    prefix: list
    loop: list
    sat_position: int

    def sequence(self, length: int) -> list:
        seq = list(self.prefix)
        while len(seq) < length:
            seq.extend(self.loop)
        return seq[:length]


@dataclass
class SatResult:
    sat: bool
    witness: Witness | None = None
    stats: dict = field(default_factory=dict)


def atom_graph(space: AtomSpace) -> nx.DiGraph:
    g = nx.DiGraph()
    atoms = space.atoms
    g.add_nodes_from(range(len(atoms)))
    for x, a in enumerate(atoms):
        req = space.successor_requirement(a)
        if req is None:
            continue
        mask, val = req
        for y, b in enumerate(atoms):
            if (b & mask) == val and space.since_ok(a, b):
                g.add_edge(x, y)
    return g


def _fulfilling(space: AtomSpace, g: nx.DiGraph, comp: set) -> bool:
    if len(comp) == 1:
        (v,) = comp
        if not g.has_edge(v, v):
            return False
    atoms = space.atoms
    for uk, _, rk in space.untils:
        if any(atoms[v] >> uk & 1 for v in comp):
            if not any(atoms[v] >> rk & 1 for v in comp):
                return False
    return True


def _bfs(g: nx.DiGraph, sources, targets, allowed=None):
    """Shortest path from any source to any target, deterministic tie-breaking."""
    parent = {}
    queue = deque()
    for s in sorted(sources):
        if allowed is None or s in allowed:
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in sorted(g.successors(v)):
            if w not in parent and (allowed is None or w in allowed):
                parent[w] = v
                queue.append(w)
    return None


def _cycle_through(g: nx.DiGraph, v: int, comp: set) -> list:
    if g.has_edge(v, v):
        return [v, v]
    path = _bfs(g, [w for w in g.successors(v) if w in comp], {v}, comp)
    return [v] + path


def satisfiable(chi: Formula, cs: ConstantSpec | None = None) -> SatResult:
    cs = cs or ConstantSpec.empty()
    space = build_atoms(chi, cs)
    g = atom_graph(space)
    comps = list(nx.strongly_connected_components(g))
    good = [c for c in comps if _fulfilling(space, g, c)]
    comp_of = {}
    for c in good:
        for v in c:
            comp_of[v] = c
    core = set()
    for c in good:
        core |= c
        for v in c:
            core |= nx.ancestors(g, v)
    stats = {"atoms": len(space.atoms), "edges": g.number_of_edges(), "sccs": len(comps),
             "closure": len(space.formulas)}
    atoms = space.atoms
    chi_k = space.index[chi]
    initial = [v for v in core if atoms[v] >> space.wbot & 1]
    targets = {v for v in core if atoms[v] >> chi_k & 1}
    head = _bfs(g, initial, targets, core)
    if head is None:
        return SatResult(False, None, stats)
    a = head[-1]
    tail = _bfs(g, [a], set(comp_of), core)
    entry = tail[-1]
    comp = comp_of[entry]
    prefix = head[:-1] + tail[:-1]
    sat_position = len(head) - 1

    # visit a fulfilling atom for every until that occurs in the component
    loop = [entry]
    cur = entry
    for uk, _, rk in space.untils:
        if any(atoms[v] >> uk & 1 for v in comp):
            goal = min(v for v in comp if atoms[v] >> rk & 1)
            if goal != cur:
                path = _bfs(g, [cur], {goal}, comp)
                loop.extend(path[1:])
                cur = goal
    if cur == entry and len(loop) > 1:
        loop.pop()
    else:
        back = _cycle_through(g, cur, comp) if cur == entry else _bfs(g, [cur], {entry}, comp)
        loop.extend(back[1:])
        loop.pop()
    w = Witness(space, [atoms[v] for v in prefix], [atoms[v] for v in loop], sat_position)
    return SatResult(True, w, stats)


def check_witness(w: Witness) -> list[str]:
    """Direct scan of the witness invariants."""
    space = w.space
    problems = []
    seq = w.prefix + w.loop + w.loop
    if not w.loop:
        return ["empty loop"]
    if not space.is_initial(seq[0]):
        problems.append("first atom is not initial")
    for k in range(len(w.prefix) + len(w.loop)):
        if not next_relation(space, seq[k], seq[k + 1]):
            problems.append(f"no step from position {k} to {k + 1}")
    if not space.has(seq[w.sat_position], space.chi):
        problems.append("formula missing at the reported position")
    for k in range(len(w.prefix) + len(w.loop)):
        for uk, _, rk in space.untils:
            if seq[k] >> uk & 1 and not any(seq[m] >> rk & 1 for m in range(k, len(seq))):
                problems.append(f"until at position {k} is never fulfilled")
    return problems


def witness_to_model(w: Witness, cs: ConstantSpec | None = None) -> MkModel:
    cs = cs or w.space.cs
    space = w.space
    names: dict = {}
    for a in w.prefix + w.loop:
        if a not in names:
            names[a] = f"a{len(names)}"
    states = list(names.values())
    valuation = {}
    evidence = []
    agents = 1
    for a, name in names.items():
        valuation[name] = frozenset(f.name for f in space.members(a) if isinstance(f, Prop))
        for f in space.members(a):
            if isinstance(f, Just):
                evidence.append((name, f.agent, f.term, f.body))
                agents = max(agents, f.agent)
    if cs.kind == EXPLICIT:
        for f in cs.entries:
            agents = max(agents, f.agent)
    universe = {f.body for f in space.formulas if isinstance(f, Just)}
    if cs.kind == EXPLICIT:
        universe |= {f.body for f in cs.entries}
    run = (tuple(names[a] for a in w.prefix), tuple(names[a] for a in w.loop))
    return MkModel(BASE.with_agents(agents), states, run, valuation, evidence, cs,
                   sorted(universe, key=formula_key), agents)


@dataclass
class ValidResult:
    valid: bool
    model: MkModel | None = None
    position: int | None = None
    stats: dict = field(default_factory=dict)


def valid(phi: Formula, cs: ConstantSpec | None = None) -> ValidResult:
    res = satisfiable(neg(phi), cs)
    if not res.sat:
        return ValidResult(True, None, None, res.stats)
    return ValidResult(False, witness_to_model(res.witness, cs), res.witness.sat_position,
                       res.stats)
