"""Logic profiles: which axioms, term constructors and evidence conditions are active."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .syntax import (
    App, AppIdx, Binary, BINARY_OPS, Formula, Just, NotInProfile, Since, Unary, UNARY_OPS,
    WPrev, terms_of, walk,
)

LPLTL = "LPLTL"          # future operators only
LPLTL_P = "LPLTL_P"      # with past operators
LPLTL_I = "LPLTL_I"      # past operators and indexed application

LP = "LP"
FP = "FP"

CONNECTING = (
    "generalize", "box-access", "next-access", "next-right", "next-left",
    "boxminus-generalize", "boxminus-access", "wprev-access", "wprev-right",
    "sprev-right", "sprev-left",
)
EXTRA = ("mix1", "mix2", "jpr", "jnl", "bar")
ALL_AXIOMS = CONNECTING + EXTRA
PAST_AXIOMS = frozenset({
    "boxminus-generalize", "boxminus-access", "wprev-access", "wprev-right",
    "sprev-right", "sprev-left", "mix2", "jpr", "bar",
})


@dataclass(frozen=True)
class LogicProfile:
    name: str
    base: str = LPLTL_P
    axioms: frozenset = frozenset()
    core: str = LP
    agents: int | None = None

    def __post_init__(self):
        if self.base not in (LPLTL, LPLTL_P, LPLTL_I):
            raise ValueError(f"unknown base logic {self.base!r}")
        if self.core not in (LP, FP):
            raise ValueError(f"unknown justification core {self.core!r}")
        unknown = set(self.axioms) - set(ALL_AXIOMS)
        if unknown:
            raise ValueError(f"unknown axioms: {sorted(unknown)}")
        if self.base == LPLTL and self.axioms & PAST_AXIOMS:
            raise ValueError("past-time axioms need a base with past operators")
        if "bar" in self.axioms and (self.base != LPLTL_P or self.core != LP):
            raise ValueError("the bar operator is only available over LPLTL_P")
        if self.core == FP and self.base == LPLTL_I:
            raise ValueError("the FP core is not defined for indexed application")

    @property
    def has_past(self) -> bool:
        return self.base != LPLTL

    @property
    def is_base(self) -> bool:
        """The fragment handled by the decision procedure."""
        return self.base == LPLTL_P and self.core == LP and not self.axioms

    def extend(self, names) -> "LogicProfile":
        names = frozenset(names)
        if not names:
            return self
        label = self.name + "".join(f"+{n}" for n in sorted(names - self.axioms))
        return replace(self, name=label, axioms=self.axioms | names)

    def with_agents(self, agents: int | None) -> "LogicProfile":
        return replace(self, agents=agents)

    def check(self, f: Formula) -> list[str]:
        problems = []
        for g in walk(f):
            if isinstance(g, (WPrev, Since)) and not self.has_past:
                problems.append("past operators are not available in future-only LPLTL")
                break
        for g in walk(f):
            if isinstance(g, Just) and self.agents is not None and g.agent > self.agents:
                problems.append(f"agent {g.agent} exceeds the declared {self.agents} agents")
        for t in terms_of(f):
            if isinstance(t, App) and self.base == LPLTL_I:
                problems.append("plain application is not available with indexed application")
            elif isinstance(t, AppIdx) and self.base != LPLTL_I:
                problems.append("indexed application needs the LPLTL_I base")
            elif isinstance(t, Unary) and UNARY_OPS[t.op] not in self.axioms:
                problems.append(f"operator {t.op} needs axiom {UNARY_OPS[t.op]}")
            elif isinstance(t, Binary) and BINARY_OPS[t.op] not in self.axioms:
                problems.append(f"operator {t.op} needs axiom {BINARY_OPS[t.op]}")
        return sorted(set(problems))

    def require(self, f: Formula) -> None:
        problems = self.check(f)
        if problems:
            raise NotInProfile("; ".join(problems))


NAMED = {
    "lpltl": LogicProfile("lpltl", LPLTL),
    "lpltl-p": LogicProfile("lpltl-p", LPLTL_P),
    "lpltl-int": LogicProfile(
        "lpltl-int", LPLTL_P, frozenset({"generalize", "boxminus-generalize", "mix1", "mix2"})),
    "lpltl-acc": LogicProfile(
        "lpltl-acc", LPLTL_P,
        frozenset({"generalize", "boxminus-generalize", "next-access", "wprev-access"})),
    "lpltl-ax": LogicProfile("lpltl-ax", LPLTL_P, frozenset(CONNECTING)),
    "lgen": LogicProfile("lgen", LPLTL_I, frozenset({"generalize"})),
    "ltl-j": LogicProfile("ltl-j", LPLTL_P, core=FP),
    "lpltl-jprnl": LogicProfile("lpltl-jprnl", LPLTL_P, frozenset({"jpr", "jnl"})),
    "lpltl-bar": LogicProfile("lpltl-bar", LPLTL_P, frozenset({"bar"})),
}


def get_profile(name: str, extra: str | None = None, agents: int | None = None) -> LogicProfile:
    """Resolve a named profile, optionally extended by ``+axiom,+axiom`` syntax."""
    if name not in NAMED:
        raise ValueError(f"unknown logic {name!r}; choose from {', '.join(sorted(NAMED))}")
    prof = NAMED[name]
    if extra:
        names = [part.strip().lstrip("+") for part in extra.split(",") if part.strip()]
        prof = prof.extend(names)
    return prof.with_agents(agents)
