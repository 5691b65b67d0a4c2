"""Finitely presented models and exact evaluation.

A Mkrtychev model has one ultimately periodic run; an interpreted system
has several runs plus per-agent accessibility between states.  Truth values
are computed as ultimately periodic streams along each run.

Evidence is computed by recursion on the justification term.  Every
closure condition derives membership at a compound term from memberships at
its immediate subterms, so the least evidence function restricted to one
term is a finite map from formulas to position streams.  No formula universe
is needed to make this finite; a declared universe is only validated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import streams as st
from .profiles import FP, LP, LPLTL_I, LogicProfile, get_profile
from .proof import ConstantSpec, EXPLICIT, parse_cs, tower, validate_cs
from .syntax import (
    App, AppIdx, BINARY_OPS, Bang, Binary, Bot, Const, Formula, Imp, Just, Next, Prop, Since,
    Sum, Term, Unary, Until, WPrev, always, as_always, as_historically, as_sprev, historically,
    parse_formula, parse_term, print_formula, print_term, sprev, subterms,
)


class ModelError(ValueError):
    pass


@dataclass
class MkModel:
    profile: LogicProfile
    states: list
    run: tuple                     # (prefix state ids, loop state ids)
    valuation: dict                # state -> frozenset of proposition names
    evidence: list = field(default_factory=list)   # (state, agent, term, formula)
    cs: ConstantSpec = field(default_factory=ConstantSpec.empty)
    universe: list | None = None
    agents: int = 1

    @property
    def runs(self):
        return [self.run]


@dataclass
class InterpretedSystem:
    profile: LogicProfile
    states: list
    runs: list
    access: dict                   # agent -> set of (state, state)
    valuation: dict
    evidence: list = field(default_factory=list)
    cs: ConstantSpec = field(default_factory=ConstantSpec.empty)
    universe: list | None = None
    agents: int = 1


# ---------------------------------------------------------------- validation

TEMPORAL_EVIDENCE_AXIOMS = frozenset({
    "generalize", "box-access", "next-access", "next-right", "next-left",
    "boxminus-generalize", "boxminus-access", "wprev-access", "wprev-right",
    "sprev-right", "sprev-left", "jpr", "jnl", "bar",
})


def _referenced(m) -> list[Formula]:
    out = [f for (_, _, _, f) in m.evidence]
    if m.cs.kind == EXPLICIT:
        out.extend(f.body for f in m.cs.entries)
    return out


def validate_model(m) -> list[str]:
    """All invariant violations; an empty list means the model is well formed."""
    problems = []
    known = set(m.states)
    if len(known) != len(m.states):
        problems.append("duplicate state ids")
    if not m.states:
        problems.append("no states")
    if m.agents < 1:
        problems.append("agent count must be at least 1")
    for r, (prefix, loop) in enumerate(m.runs):
        if not loop:
            problems.append(f"run {r} has an empty loop")
        for s in list(prefix) + list(loop):
            if s not in known:
                problems.append(f"run {r} uses unknown state {s!r}")
    for s in m.valuation:
        if s not in known:
            problems.append(f"valuation mentions unknown state {s!r}")
    for (s, agent, term, f) in m.evidence:
        if s not in known:
            problems.append(f"evidence mentions unknown state {s!r}")
        if not 1 <= agent <= m.agents:
            problems.append(f"evidence agent {agent} outside 1..{m.agents}")
        problems.extend(m.profile.check(Just(agent, term, f)))
    if m.cs.kind not in ("empty", EXPLICIT):
        problems.append("model constant specifications must be empty or explicit")
    problems.extend(validate_cs(m.cs, m.profile))
    if m.cs.kind == EXPLICIT:
        for f in m.cs.entries:
            for (_, agent) in tower(f)[0]:
                if agent > m.agents:
                    problems.append(f"cs entry uses agent {agent} beyond {m.agents}")
    if m.universe is not None:
        uni = set(m.universe)
        for f in _referenced(m):
            if f not in uni:
                problems.append(f"universe is missing {print_formula(f)}")
    if isinstance(m, InterpretedSystem):
        if not m.runs:
            problems.append("an interpreted system needs at least one run")
        for agent in range(1, m.agents + 1):
            rel = m.access.get(agent, set())
            for (a, b) in rel:
                if a not in known or b not in known:
                    problems.append(f"accessibility of agent {agent} mentions unknown states")
            for s in m.states:
                if (s, s) not in rel:
                    problems.append(f"accessibility of agent {agent} is not reflexive at {s!r}")
            succ = {}
            for (a, b) in rel:
                succ.setdefault(a, set()).add(b)
            for (a, b) in rel:
                for c in succ.get(b, ()):
                    if (a, c) not in rel:
                        problems.append(
                            f"accessibility of agent {agent} is not transitive: {a}->{b}->{c}")
        for agent in m.access:
            if not 1 <= agent <= m.agents:
                problems.append(f"accessibility given for unknown agent {agent}")
        if m.profile.core != LP or m.profile.axioms & TEMPORAL_EVIDENCE_AXIOMS:
            problems.append("interpreted systems support the LP core without temporal "
                            "evidence conditions only")
    return sorted(set(problems), key=problems.index)


def require_valid(m) -> None:
    problems = validate_model(m)
    if problems:
        raise ModelError("; ".join(problems))


# ---------------------------------------------------------------- runs as streams

def _state_stream(run, state) -> st.UPB:
    prefix, loop = run
    return st.from_positions([s == state for s in prefix], [s == state for s in loop])


def _flag_stream(run, flags: dict) -> st.UPB:
    prefix, loop = run
    return st.from_positions([flags.get(s, False) for s in prefix],
                             [flags.get(s, False) for s in loop])


def _cs_index(cs: ConstantSpec):
    out: dict = {}
    if cs.kind == EXPLICIT:
        for f in cs.entries:
            out.setdefault((f.agent, f.term.name), set()).add(f.body)
    return out


# ---------------------------------------------------------------- Mkrtychev evidence

class MkEvidence:
    """Least evidence function of a Mkrtychev model, one stream per formula."""

    def __init__(self, m: MkModel):
        self.model = m
        self.profile = m.profile
        run = m.run
        indicator = {s: _state_stream(run, s) for s in m.states}
        self.base: dict = {}
        for (s, agent, term, f) in m.evidence:
            slot = self.base.setdefault((agent, term), {})
            slot[f] = st.or_(slot.get(f, st.FALSE), indicator[s])
        self.cs = _cs_index(m.cs)
        self._memo: dict = {}
        self._queries: dict = {}

    def holds(self, n: int, agent: int, term: Term, f: Formula) -> bool:
        return self.stream(agent, term, f).at(n)

    def stream(self, agent: int, term: Term, f: Formula) -> st.UPB:
        key = (agent, term, f)
        hit = self._queries.get(key)
        if hit is None:
            hit = self.get(agent, term).get(f, st.FALSE)
            if any(isinstance(u, Binary) for u in subterms(term)):
                hit = st.or_(hit, self._query(agent, term, f))
            self._queries[key] = hit
        return hit

    def _query(self, i: int, t: Term, f: Formula) -> st.UPB:
        """Membership of one formula, goal-directed.

        The pr and nl conditions with an empty window admit every left body,
        so their evidence sets are infinite and ``get`` only lists the part
        whose left body is already evidenced.  Queries recover the rest by
        inverting each closure condition on the shape of ``f``.
        """
        prof = self.profile
        fp = prof.core == FP
        q = self.stream
        if isinstance(t, Binary):
            if BINARY_OPS[t.op] not in prof.axioms:
                return st.FALSE
            make, combine = (Since, st.since) if t.op == "pr" else (Until, st.until)
            if isinstance(f, make) and isinstance(f.left, Just) and isinstance(f.right, Just) \
                    and f.left.agent == i == f.right.agent \
                    and f.left.term == t.left and f.right.term == t.right:
                return combine(q(i, t.left, f.left.body), q(i, t.right, f.right.body))
            return st.FALSE
        if isinstance(t, Sum):
            g = as_sprev(f) if fp else f
            if g is None:
                return st.FALSE
            out = st.or_(q(i, t.left, g), q(i, t.right, g))
            return st.sprev(out) if fp else out
        if isinstance(t, Bang):
            g = as_sprev(f) if fp else f
            if not (isinstance(g, Just) and g.agent == i and g.term == t.term):
                return st.FALSE
            out = q(i, t.term, g.body)
            return st.sprev(out) if fp else out
        if isinstance(t, (App, AppIdx)):
            g = as_sprev(f) if fp else f
            if g is None or (isinstance(t, App) == (prof.base == LPLTL_I)):
                return st.FALSE
            if isinstance(t, AppIdx):
                cands = {t.index}
            else:
                cands = {h.left for h in self.get(i, t.left)
                         if isinstance(h, Imp) and h.right == g} | set(self.get(i, t.right))
            out = st.FALSE
            for a in cands:
                out = st.or_(out, st.and_(q(i, t.left, Imp(a, g)), q(i, t.right, a)))
            return st.sprev(out) if fp else out
        if isinstance(t, Unary):
            return self._unary_query(i, t, f)
        return st.FALSE

    def _unary_query(self, i, t, f):
        from .syntax import UNARY_OPS
        if UNARY_OPS[t.op] not in self.profile.axioms:
            return st.FALSE
        op, u, q = t.op, t.term, self.stream
        if op == "gen":
            g = as_always(f)
            return st.FALSE if g is None else st.box(q(i, u, g))
        if op == "genp":
            g = as_historically(f)
            return st.FALSE if g is None else st.boxminus(q(i, u, g))
        if op == "shl":
            return st.next_(q(i, u, f.body)) if isinstance(f, Next) else st.FALSE
        if op in ("shlp", "bar"):
            g = as_sprev(f)
            return st.FALSE if g is None else st.sprev(q(i, u, g))
        if op == "acc":
            return st.diamondminus(q(i, u, always(f)))
        if op == "accx":
            return q(i, u, always(f.body)) if isinstance(f, Next) else st.FALSE
        if op == "accp":
            return st.diamond(q(i, u, historically(f)))
        if op == "accxp":
            return q(i, u, historically(f.body)) if isinstance(f, WPrev) else st.FALSE
        if op == "shr":
            return st.sprev(q(i, u, Next(f)))
        if op == "rp":
            return st.next_(q(i, u, WPrev(f)))
        if op == "shrp":
            return st.next_(q(i, u, sprev(f)))
        return st.FALSE

    def get(self, agent: int, term: Term) -> dict:
        key = (agent, term)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(agent, term)
            self._memo[key] = hit
        return hit

    def _compute(self, i: int, t: Term) -> dict:
        prof = self.profile
        fp = prof.core == FP
        out = dict(self.base.get((i, t), {}))

        def add(f, s):
            if s.is_false:
                return
            prev = out.get(f)
            out[f] = s if prev is None else st.or_(prev, s)

        if isinstance(t, Const):
            for f in self.cs.get((i, t.name), ()):
                add(f, st.TRUE)
        elif isinstance(t, Sum):
            for part in (t.left, t.right):
                for f, s in self.get(i, part).items():
                    if fp:
                        add(sprev(f), st.sprev(s))
                    else:
                        add(f, s)
        elif isinstance(t, App) and prof.base != LPLTL_I:
            right = self.get(i, t.right)
            for f, s in self.get(i, t.left).items():
                if isinstance(f, Imp) and f.left in right:
                    both = st.and_(s, right[f.left])
                    if fp:
                        add(sprev(f.right), st.sprev(both))
                    else:
                        add(f.right, both)
        elif isinstance(t, AppIdx) and prof.base == LPLTL_I:
            right = self.get(i, t.right)
            if t.index in right:
                for f, s in self.get(i, t.left).items():
                    if isinstance(f, Imp) and f.left == t.index:
                        add(f.right, st.and_(s, right[t.index]))
        elif isinstance(t, Bang):
            for f, s in self.get(i, t.term).items():
                if fp:
                    add(sprev(Just(i, t.term, f)), st.sprev(s))
                else:
                    add(Just(i, t.term, f), s)
        elif isinstance(t, Unary):
            self._unary(i, t, add)
        elif isinstance(t, Binary):
            axiom = "jpr" if t.op == "pr" else "jnl"
            if axiom in prof.axioms:
                combine, make = (st.since, Since) if t.op == "pr" else (st.until, Until)
                right = self.get(i, t.right)
                for f, s in self.get(i, t.left).items():
                    for g, r in right.items():
                        add(make(Just(i, t.left, f), Just(i, t.right, g)), combine(s, r))
        return out

    def _unary(self, i, t, add):
        from .syntax import UNARY_OPS
        if UNARY_OPS[t.op] not in self.profile.axioms:
            return
        op = t.op
        for f, s in self.get(i, t.term).items():
            if op == "gen":
                add(always(f), st.box(s))
            elif op == "genp":
                add(historically(f), st.boxminus(s))
            elif op == "shl":
                add(Next(f), st.next_(s))
            elif op in ("shlp", "bar"):
                add(sprev(f), st.sprev(s))
            elif op == "acc":
                g = as_always(f)
                if g is not None:
                    add(g, st.diamondminus(s))
            elif op == "accx":
                g = as_always(f)
                if g is not None:
                    add(Next(g), s)
            elif op == "accp":
                g = as_historically(f)
                if g is not None:
                    add(g, st.diamond(s))
            elif op == "accxp":
                g = as_historically(f)
                if g is not None:
                    add(WPrev(g), s)
            elif op == "shr":
                if isinstance(f, Next):
                    add(f.body, st.sprev(s))
            elif op == "rp":
                if isinstance(f, WPrev):
                    add(f.body, st.next_(s))
            elif op == "shrp":
                g = as_sprev(f)
                if g is not None:
                    add(g, st.next_(s))


def saturate_evidence(m, query=()):
    """Evidence engine for a model; ``query`` is accepted for interface parity."""
    require_valid(m)
    return MkEvidence(m) if isinstance(m, MkModel) else ISEvidence(m)


def evidence_holds(engine, point, agent: int, term: Term, f: Formula) -> bool:
    if isinstance(engine, MkEvidence):
        n = point[1] if isinstance(point, tuple) else point
        return engine.holds(n, agent, term, f)
    run, n = point
    prefix, loop = engine.system.runs[run]
    state = prefix[n] if n < len(prefix) else loop[(n - len(prefix)) % len(loop)]
    return state in engine.get(agent, term).get(f, frozenset())


# ---------------------------------------------------------------- evaluation

class Evaluator:
    """Memoized bottom-up evaluation of formulas on a Mkrtychev model."""

    def __init__(self, m: MkModel, check: bool = True):
        if check:
            require_valid(m)
        self.model = m
        self.evidence = MkEvidence(m)
        self._memo: dict = {}
        self._props: dict = {}

    def prop(self, name: str) -> st.UPB:
        s = self._props.get(name)
        if s is None:
            flags = {w: name in self.model.valuation.get(w, ()) for w in self.model.states}
            s = self._props[name] = _flag_stream(self.model.run, flags)
        return s

    def __call__(self, f: Formula) -> st.UPB:
        hit = self._memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Prop):
            out = self.prop(f.name)
        elif isinstance(f, Bot):
            out = st.FALSE
        elif isinstance(f, Imp):
            out = st.imp(self(f.left), self(f.right))
        elif isinstance(f, Next):
            out = st.next_(self(f.body))
        elif isinstance(f, WPrev):
            out = st.wprev(self(f.body))
        elif isinstance(f, Until):
            out = st.until(self(f.left), self(f.right))
        elif isinstance(f, Since):
            out = st.since(self(f.left), self(f.right))
        elif isinstance(f, Just):
            ev = self.evidence.stream(f.agent, f.term, f.body)
            out = st.FALSE if ev.is_false else st.and_(ev, self(f.body))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._memo[f] = out
        return out


def eval_formula(m: MkModel, f: Formula) -> st.UPB:
    problems = m.profile.check(f)
    if problems:
        raise ModelError("; ".join(problems))
    return Evaluator(m)(f)


# ---------------------------------------------------------------- interpreted systems

class ISEvidence:
    """State-indexed least evidence function, closed upward along accessibility."""

    def __init__(self, sysm: InterpretedSystem):
        self.system = sysm
        self.profile = sysm.profile
        self.base: dict = {}
        for (s, agent, term, f) in sysm.evidence:
            self.base.setdefault((agent, term), {}).setdefault(f, set()).add(s)
        self.cs = _cs_index(sysm.cs)
        self.all_states = frozenset(sysm.states)
        self.succ = {}
        for agent, rel in sysm.access.items():
            table = {s: set() for s in sysm.states}
            for (a, b) in rel:
                table[a].add(b)
            self.succ[agent] = table
        self._memo: dict = {}

    def up(self, agent: int, states) -> frozenset:
        table = self.succ.get(agent, {})
        out = set(states)
        for s in states:
            out |= table.get(s, ())
        return frozenset(out)

    def get(self, agent: int, term: Term) -> dict:
        key = (agent, term)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(agent, term)
            self._memo[key] = hit
        return hit

    def _compute(self, i, t) -> dict:
        local: dict = {f: set(ss) for f, ss in self.base.get((i, t), {}).items()}

        def add(f, states):
            if states:
                local.setdefault(f, set()).update(states)

        if isinstance(t, Const):
            for f in self.cs.get((i, t.name), ()):
                add(f, self.all_states)
        elif isinstance(t, Sum):
            for part in (t.left, t.right):
                for f, ss in self.get(i, part).items():
                    add(f, ss)
        elif isinstance(t, App) and self.profile.base != LPLTL_I:
            right = self.get(i, t.right)
            for f, ss in self.get(i, t.left).items():
                if isinstance(f, Imp) and f.left in right:
                    add(f.right, ss & right[f.left])
        elif isinstance(t, AppIdx) and self.profile.base == LPLTL_I:
            right = self.get(i, t.right)
            if t.index in right:
                for f, ss in self.get(i, t.left).items():
                    if isinstance(f, Imp) and f.left == t.index:
                        add(f.right, ss & right[t.index])
        elif isinstance(t, Bang):
            for f, ss in self.get(i, t.term).items():
                add(Just(i, t.term, f), ss)
        return {f: self.up(i, ss) for f, ss in local.items()}


def eval_is(sysm: InterpretedSystem, f: Formula) -> dict:
    """Truth stream of ``f`` on every run, keyed by run index."""
    require_valid(sysm)
    problems = sysm.profile.check(f)
    if problems:
        raise ModelError("; ".join(problems))
    ev = ISEvidence(sysm)
    runs = sysm.runs
    indicators = [{s: _state_stream(r, s) for s in sysm.states} for r in runs]
    memo: dict = {}

    def go(g) -> list:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Prop):
            out = [_flag_stream(r, {w: g.name in sysm.valuation.get(w, ()) for w in sysm.states})
                   for r in runs]
        elif isinstance(g, Bot):
            out = [st.FALSE for _ in runs]
        elif isinstance(g, Imp):
            out = [st.imp(a, b) for a, b in zip(go(g.left), go(g.right))]
        elif isinstance(g, Next):
            out = [st.next_(a) for a in go(g.body)]
        elif isinstance(g, WPrev):
            out = [st.wprev(a) for a in go(g.body)]
        elif isinstance(g, Until):
            out = [st.until(a, b) for a, b in zip(go(g.left), go(g.right))]
        elif isinstance(g, Since):
            out = [st.since(a, b) for a, b in zip(go(g.left), go(g.right))]
        elif isinstance(g, Just):
            body = go(g.body)
            # ψ holds at every point carrying state w
            everywhere = {
                w: all(st.leq(indicators[r][w], body[r]) for r in range(len(runs)))
                for w in sysm.states
            }
            members = ev.get(g.agent, g.term).get(g.body, frozenset())
            succ = ev.succ.get(g.agent, {})
            ok = {w: w in members and all(everywhere[v] for v in succ.get(w, {w}) | {w})
                  for w in sysm.states}
            out = [_flag_stream(r, ok) for r in runs]
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return dict(enumerate(go(f)))


def to_mkrtychev(sysm: InterpretedSystem) -> MkModel:
    if len(sysm.runs) != 1:
        raise ModelError("to_mkrtychev needs exactly one run")
    for agent in range(1, sysm.agents + 1):
        rel = set(sysm.access.get(agent, set()))
        if rel != {(s, s) for s in sysm.states}:
            raise ModelError(f"accessibility of agent {agent} is not the identity")
    return MkModel(sysm.profile, list(sysm.states), sysm.runs[0], dict(sysm.valuation),
                   list(sysm.evidence), sysm.cs, sysm.universe, sysm.agents)


# ---------------------------------------------------------------- JSON

def _run_from_json(obj):
    return (tuple(obj.get("prefix", [])), tuple(obj["loop"]))


def model_from_json(obj):
    """Parse a model; an object with ``runs`` is an interpreted system."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "model" in obj and "states" not in obj:
        obj = obj["model"]
    prof = obj.get("profile", "lpltl-p")
    extra = obj.get("axioms")
    if isinstance(extra, list):
        extra = ",".join(extra)
    agents = int(obj.get("agents", 1))
    profile = get_profile(prof, extra, agents)
    states = [str(s) for s in obj["states"]]
    valuation = {str(s): frozenset(v) for s, v in obj.get("valuation", {}).items()}
    evidence = []
    for e in obj.get("evidence", []):
        evidence.append((str(e["state"]), int(e["agent"]), parse_term(e["term"]),
                         parse_formula(e["formula"])))
    cs = parse_cs(obj.get("cs", "empty"))
    universe = obj.get("universe")
    if universe is not None:
        universe = [parse_formula(u) for u in universe]
    if "runs" in obj:
        access = {}
        for agent, pairs in obj.get("access", {}).items():
            access[int(agent)] = {(str(a), str(b)) for a, b in pairs}
        runs = [_run_from_json(r) for r in obj["runs"]]
        return InterpretedSystem(profile, states, runs, access, valuation, evidence, cs,
                                 universe, agents)
    return MkModel(profile, states, _run_from_json(obj["run"]), valuation, evidence, cs,
                   universe, agents)


def _profile_json(profile: LogicProfile):
    from .profiles import NAMED
    for name, p in NAMED.items():
        if profile.axioms >= p.axioms and p.base == profile.base and p.core == profile.core \
                and profile.name.split("+")[0] == name:
            extra = sorted(profile.axioms - p.axioms)
            return name, extra
    return profile.name, []


def model_to_json(m) -> dict:
    name, extra = _profile_json(m.profile)
    out = {"profile": name}
    if extra:
        out["axioms"] = extra
    out["agents"] = m.agents
    out["states"] = list(m.states)
    if isinstance(m, InterpretedSystem):
        out["runs"] = [{"prefix": list(p), "loop": list(l)} for p, l in m.runs]
        out["access"] = {str(a): sorted([list(pair) for pair in rel])
                         for a, rel in sorted(m.access.items())}
    else:
        out["run"] = {"prefix": list(m.run[0]), "loop": list(m.run[1])}
    out["valuation"] = {s: sorted(m.valuation.get(s, ())) for s in m.states}
    out["evidence"] = [{"state": s, "agent": a, "term": print_term(t), "formula": print_formula(f)}
                       for (s, a, t, f) in m.evidence]
    out["cs"] = m.cs.to_json()
    if m.universe is not None:
        out["universe"] = [print_formula(f) for f in m.universe]
    return out


def load_model(path: str):
    with open(path) as fh:
        return model_from_json(json.load(fh))


__all__ = [
    "MkModel", "InterpretedSystem", "ModelError", "validate_model", "saturate_evidence",
    "evidence_holds", "eval_formula", "eval_is", "to_mkrtychev", "model_from_json",
    "model_to_json", "load_model", "Evaluator", "MkEvidence", "ISEvidence",
]
