"""Constant specifications, Hilbert derivations and the derivation checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .axioms import SCHEMA_IDS, is_tautology, match_axiom
from .profiles import LogicProfile, get_profile
from .syntax import (
    Const, Formula, Imp, Just, Next, WPrev, always, big_conj, historically, parse_formula,
    print_formula,
)

EMPTY, EXPLICIT, TOTAL = "empty", "explicit", "total"


def tower(f: Formula):
    """Split ``[c_n]..[c_1] body`` into ([(c_n, i_n), ..., (c_1, i_1)], body)."""
    levels = []
    while isinstance(f, Just) and isinstance(f.term, Const):
        levels.append((f.term.name, f.agent))
        f = f.body
    return levels, f


def _tower_over_axiom(f: Formula, profile: LogicProfile) -> bool:
    levels, _ = tower(f)
    g = f
    for _ in levels:
        g = g.body
        if match_axiom(g, profile) is not None:
            return True
    return False


@dataclass(frozen=True)
class ConstantSpec:
    kind: str = EMPTY
    entries: frozenset = frozenset()

    @classmethod
    def empty(cls):
        return cls(EMPTY)

    @classmethod
    def total(cls):
        return cls(TOTAL)

    @classmethod
    def explicit(cls, entries):
        return cls(EXPLICIT, frozenset(entries))

    def ordered(self) -> list[Formula]:
        from .syntax import formula_key
        return sorted(self.entries, key=formula_key)

    def to_json(self):
        if self.kind == EXPLICIT:
            return {"kind": EXPLICIT, "entries": [print_formula(f) for f in self.ordered()]}
        return {"kind": self.kind}


def cs_contains(cs: ConstantSpec, f: Formula, profile: LogicProfile) -> bool:
    if cs.kind == EMPTY:
        return False
    if cs.kind == EXPLICIT:
        return f in cs.entries
    return _tower_over_axiom(f, profile)


def check_downward_closed(entries) -> bool:
    entries = set(entries)
    for f in entries:
        levels, _ = tower(f)
        if not levels:
            raise ValueError(f"not a constant tower: {print_formula(f)}")
        if len(levels) > 1 and f.body not in entries:
            return False
    return True


def validate_cs(cs: ConstantSpec, profile: LogicProfile) -> list[str]:
    """Problems with an explicit specification: shape, closure, axiom bodies."""
    if cs.kind != EXPLICIT:
        return []
    problems = []
    for f in cs.ordered():
        levels, _ = tower(f)
        if not levels:
            problems.append(f"cs entry is not a constant tower: {print_formula(f)}")
        elif not _tower_over_axiom(f, profile):
            problems.append(f"cs entry is not over an axiom instance: {print_formula(f)}")
        elif len(levels) > 1 and f.body not in cs.entries:
            problems.append(f"cs is not downward closed: missing {print_formula(f.body)}")
    return problems


def parse_cs(obj, profile=None) -> ConstantSpec:
    """From "empty" / "total" / a JSON object ``{"kind": ..., "entries": [...]}``."""
    if isinstance(obj, str):
        if obj.lower() in (EMPTY, TOTAL):
            return ConstantSpec(obj.lower())
        raise ValueError(f"unknown constant specification {obj!r}")
    kind = obj.get("kind", EXPLICIT)
    if kind != EXPLICIT:
        return ConstantSpec(kind)
    return ConstantSpec.explicit(parse_formula(e, profile) for e in obj.get("entries", []))


# ---------------------------------------------------------------- derivations

NEC_RULES = {
    "NextNec": Next,
    "WPrevNec": WPrev,
    "BoxNec": always,
    "BoxMinusNec": historically,
}
RULE_TYPES = ("Premise", "Axiom", "MP", "IaxNec") + tuple(NEC_RULES)


@dataclass(frozen=True)
class Rule:
    type: str
    i: int | None = None
    j: int | None = None
    k: int | None = None
    schema: str | None = None

    def to_json(self):
        out = {"type": self.type}
        for name in ("i", "j", "k", "schema"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out


@dataclass(frozen=True)
class Step:
    formula: Formula
    rule: Rule
    premise_free: bool | None = None


@dataclass
class Derivation:
    premises: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    @property
    def conclusion(self) -> Formula | None:
        return self.steps[-1].formula if self.steps else None

    def to_json(self):
        steps = []
        for s in self.steps:
            item = {"formula": print_formula(s.formula), "rule": s.rule.to_json()}
            if s.premise_free is not None:
                item["premise_free"] = s.premise_free
            steps.append(item)
        return {"premises": [print_formula(p) for p in self.premises], "steps": steps}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def derivation_from_json(obj, profile=None) -> Derivation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    premises = [parse_formula(p, profile) for p in obj.get("premises", [])]
    steps = []
    for n, item in enumerate(obj["steps"]):
        r = item.get("rule", {})
        rtype = r.get("type")
        if rtype not in RULE_TYPES:
            raise ValueError(f"step {n}: unknown rule type {rtype!r}")
        rule = Rule(rtype, r.get("i"), r.get("j"), r.get("k"), r.get("schema"))
        steps.append(Step(parse_formula(item["formula"], profile), rule, item.get("premise_free")))
    return Derivation(premises, steps)


@dataclass
class CheckResult:
    ok: bool
    errors: list = field(default_factory=list)
    conclusion: Formula | None = None
    schemas: list = field(default_factory=list)

    def to_json(self):
        out = {"accepted": self.ok}
        if self.conclusion is not None:
            out["conclusion"] = print_formula(self.conclusion)
        if self.errors:
            out["errors"] = [{"step": n, "message": m} for n, m in self.errors]
        return out


def _cited(n: int, idx, label: str):
    if not isinstance(idx, int) or idx < 0 or idx >= n:
        return f"{label} must cite an earlier step, got {idx!r}"
    return None


def check_derivation(d: Derivation, profile: LogicProfile, cs: ConstantSpec) -> CheckResult:
    errors = []
    free: list[bool] = []
    schemas: list = []
    for n, step in enumerate(d.steps):
        f, r = step.formula, step.rule
        problems = profile.check(f)
        msg = "; ".join(problems) if problems else None
        is_free = True
        schema_used = None
        if msg is None and r.type == "Premise":
            is_free = False
            if not isinstance(r.k, int) or not 0 <= r.k < len(d.premises):
                msg = f"premise index {r.k!r} out of range"
            elif d.premises[r.k] != f:
                msg = "formula differs from the cited premise"
        elif msg is None and r.type == "Axiom":
            if r.schema is not None and r.schema not in SCHEMA_IDS:
                msg = f"unknown schema {r.schema!r}"
            else:
                m = match_axiom(f, profile, only=r.schema)
                if m is None:
                    msg = ("not an instance of " + r.schema + " in this profile") if r.schema \
                        else "not an axiom of this profile"
                else:
                    schema_used = m[0]
        elif msg is None and r.type == "MP":
            msg = _cited(n, r.i, "MP i") or _cited(n, r.j, "MP j")
            if msg is None:
                if d.steps[r.j].formula != Imp(d.steps[r.i].formula, f):
                    msg = "step j is not the implication from step i to this formula"
                is_free = free[r.i] and free[r.j]
        elif msg is None and r.type == "IaxNec":
            if not cs_contains(cs, f, profile):
                msg = "constant tower not in the constant specification"
        elif msg is None and r.type in NEC_RULES:
            msg = _cited(n, r.i, r.type)
            if msg is None:
                if NEC_RULES[r.type](d.steps[r.i].formula) != f:
                    msg = f"{r.type} operand does not match step {r.i}"
                elif not free[r.i]:
                    msg = f"{r.type} applied to a step that depends on premises"
        elif msg is None:
            msg = f"unknown rule {r.type!r}"
        if msg is None and step.premise_free is not None and step.premise_free != is_free:
            msg = "stored premise_free flag is wrong"
        if msg is not None:
            errors.append((n, msg))
        free.append(is_free)
        schemas.append(schema_used)
    if not d.steps:
        errors.append((0, "empty derivation"))
    return CheckResult(not errors, errors, d.conclusion, schemas)


def with_flags(d: Derivation) -> Derivation:
    """Copy of ``d`` with premise_free flags filled in."""
    free = []
    steps = []
    for s in d.steps:
        t = s.rule.type
        if t == "Premise":
            v = False
        elif t == "MP":
            v = free[s.rule.i] and free[s.rule.j]
        elif t in NEC_RULES:
            v = free[s.rule.i]
        else:
            v = True
        free.append(v)
        steps.append(Step(s.formula, s.rule, v))
    return Derivation(list(d.premises), steps)


def deduction(d: Derivation) -> Derivation:
    """Premise-free derivation of (conjunction of premises) -> conclusion.

    Premise-free steps are copied unchanged (with their sub-derivations) so
    necessitation remains legal; every premise-dependent step is rewritten
    under the hypothesis with tautologies and modus ponens.
    """
    d = with_flags(d)
    gamma = big_conj(d.premises)
    out: list[Step] = []
    copied: dict[int, int] = {}
    guarded: dict[int, int] = {}

    def emit(f, rule):
        out.append(Step(f, rule, True))
        return len(out) - 1

    def copy(n):
        if n in copied:
            return copied[n]
        s = d.steps[n]
        r = s.rule
        if r.type == "MP":
            r = Rule("MP", copy(r.i), copy(r.j))
        elif r.type in NEC_RULES:
            r = Rule(r.type, copy(r.i))
        copied[n] = emit(s.formula, r)
        return copied[n]

    def guard(n):
        if n in guarded:
            return guarded[n]
        s = d.steps[n]
        f = s.formula
        target = Imp(gamma, f)
        if s.premise_free:
            a = copy(n)
            t = emit(Imp(f, target), Rule("Axiom"))
            res = emit(target, Rule("MP", a, t))
        elif s.rule.type == "Premise":
            res = emit(target, Rule("Axiom"))
        else:  # MP on premise-dependent steps
            gi, gj = guard(s.rule.i), guard(s.rule.j)
            a = d.steps[s.rule.i].formula
            dist = Imp(Imp(gamma, Imp(a, f)), Imp(Imp(gamma, a), target))
            t = emit(dist, Rule("Axiom"))
            m = emit(dist.right, Rule("MP", gj, t))
            res = emit(target, Rule("MP", gi, m))
        guarded[n] = res
        return res

    if d.steps:
        guard(len(d.steps) - 1)
    return Derivation([], out)


def load_derivation(path: str, profile=None) -> Derivation:
    with open(path) as fh:
        return derivation_from_json(json.load(fh), profile)


__all__ = [
    "ConstantSpec", "Derivation", "Rule", "Step", "CheckResult", "check_derivation",
    "check_downward_closed", "cs_contains", "deduction", "derivation_from_json", "get_profile",
    "match_axiom", "is_tautology", "parse_cs", "tower", "validate_cs", "with_flags",
    "load_derivation", "EMPTY", "EXPLICIT", "TOTAL",
]
