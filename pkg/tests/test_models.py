import json
import random

import pytest
from hypothesis import given, settings, strategies as hst

from generators import random_formula, random_model, random_system
from oracles import WindowEvaluator, unroll
from suites import schema_plan, soundness_failures
from tjl import streams as st
from tjl.lemmas import corpus_dir
from tjl.models import (
    Evaluator, InterpretedSystem, MkEvidence, MkModel, ModelError, eval_formula, eval_is,
    evidence_holds, load_model, model_from_json, model_to_json, saturate_evidence,
    to_mkrtychev, validate_model,
)
from tjl.profiles import NAMED, get_profile
from tjl.proof import ConstantSpec
from tjl.streams import UPB
from tjl.syntax import (
    App, Bang, Binary, Just, Next, Prop, Sum, Var, WPrev, always, historically,
    parse_formula as P, parse_term,
)

BASE = get_profile("lpltl-p")
x, y = Var("x"), Var("y")


def mk(states, run, valuation, evidence=(), profile=BASE, cs=None, agents=1):
    ev = [(s, a, parse_term(t) if isinstance(t, str) else t, P(f) if isinstance(f, str) else f)
          for (s, a, t, f) in evidence]
    return MkModel(profile.with_agents(agents), list(states), run,
                   {s: frozenset(v) for s, v in valuation.items()}, ev,
                   cs or ConstantSpec.empty(), None, agents)


def system(states, runs, access, valuation, evidence=(), agents=1):
    ev = [(s, a, parse_term(t), P(f)) for (s, a, t, f) in evidence]
    return InterpretedSystem(BASE.with_agents(agents), list(states), runs, access,
                             {s: frozenset(v) for s, v in valuation.items()}, ev,
                             ConstantSpec.empty(), None, agents)


ONE = mk(["s0"], ((), ("s0",)), {"s0": {"p"}})


# ---------------------------------------------------------------- validation

def test_validate_examples():
    sysm = system(["s0"], [((), ("s0",))], {1: {("s0", "s0")}}, {"s0": set()})
    assert validate_model(sysm) == []
    bad = system(["s0", "s1"], [((), ("s0",))], {1: {("s0", "s1"), ("s1", "s1")}}, {})
    assert any("reflexive" in p for p in validate_model(bad))
    inner = P("[c1]_1 (p -> p)")
    cs = ConstantSpec.explicit([Just(2, parse_term("c2"), inner)])
    m = mk(["s0"], ((), ("s0",)), {}, cs=cs, agents=2)
    assert any("downward" in p or "tail" in p for p in validate_model(m))


def test_validate_reports_each_problem():
    m = mk(["s0"], (("s9",), ("s0",)), {"s7": {"p"}}, [("s8", 3, "x", "p")])
    problems = validate_model(m)
    assert len(problems) >= 4
    with pytest.raises(ModelError):
        eval_formula(m, P("p"))


def test_validate_transitivity_and_universe():
    bad = system(["a", "b", "c"], [((), ("a",))],
                 {1: {("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")}}, {})
    assert any("transitive" in p for p in validate_model(bad))
    m = mk(["s0"], ((), ("s0",)), {}, [("s0", 1, "x", "p")])
    m.universe = [P("q")]
    assert any("universe" in p for p in validate_model(m))
    m.universe = [P("p")]
    assert validate_model(m) == []


# ---------------------------------------------------------------- evidence

def test_evidence_examples():
    m = mk(["s0"], ((), ("s0",)), {"s0": {"p"}}, [("s0", 1, "x", "p")])
    e = saturate_evidence(m)
    for n in range(4):
        assert evidence_holds(e, (0, n), 1, Sum(x, y), P("p"))
    assert evidence_holds(e, (0, 0), 1, Bang(x), P("[x]_1 p"))
    m2 = mk(["s0"], ((), ("s0",)), {}, [("s0", 1, "x", "p -> q"), ("s0", 1, "y", "p")])
    assert evidence_holds(saturate_evidence(m2), (0, 0), 1, App(x, y), P("q"))
    empty = mk(["s0"], ((), ("s0",)), {})
    assert not evidence_holds(saturate_evidence(empty), (0, 0), 1, x, P("p"))


def test_interpreted_evidence_is_monotone():
    sysm = system(["s0", "s1"], [(("s0",), ("s1",))],
                  {1: {("s0", "s0"), ("s1", "s1"), ("s0", "s1")}}, {},
                  [("s0", 1, "x", "p")])
    e = saturate_evidence(sysm)
    assert evidence_holds(e, (0, 1), 1, x, P("p"))
    assert evidence_holds(e, (0, 0), 1, x, P("p"))
    reverse = system(["s0", "s1"], [(("s0",), ("s1",))],
                     {1: {("s0", "s0"), ("s1", "s1"), ("s1", "s0")}}, {},
                     [("s0", 1, "x", "p")])
    assert not evidence_holds(saturate_evidence(reverse), (0, 1), 1, x, P("p"))


def test_pr_evidence_with_empty_window():
    # psi evidenced now: [t]phi S [s]psi is evidenced for pr(t,s) whatever phi is
    prof = get_profile("lpltl-jprnl")
    m = mk(["s0"], ((), ("s0",)), {"s0": {"p"}}, [("s0", 1, "x", "p")], profile=prof)
    f = P("[y]_1 q S [x]_1 p")
    e = MkEvidence(m)
    assert e.stream(1, Binary("pr", y, x), f) == st.TRUE
    assert eval_formula(m, Just(1, Binary("pr", y, x), f)) == st.TRUE


# ---------------------------------------------------------------- evaluation

def test_eval_examples():
    time_two = P("Ys Ys Yw false")
    for m in (ONE, mk(["a", "b"], (("a",), ("b", "a")), {"a": {"p"}})):
        assert eval_formula(m, time_two) == UPB([False, False, True], [False])
        assert eval_formula(m, P("[x]_1 p -> p")) == st.TRUE
    m = mk(["s0"], ((), ("s0",)), {"s0": {"p"}}, [("s0", 1, "x", "p")])
    assert eval_formula(m, P("[x]_1 p")) == st.TRUE


def test_eval_rejects_profile_mismatch():
    with pytest.raises(ModelError):
        eval_formula(mk(["s0"], ((), ("s0",)), {}, profile=get_profile("lpltl")), P("Yw p"))


def test_eval_is_examples():
    both = {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
    sysm = system(["a", "b"], [((), ("a",)), (("a",), ("b",))], {1: both},
                  {"a": {"p"}}, [("a", 1, "x", "p"), ("b", 1, "x", "p")])
    out = eval_is(sysm, P("[x]_1 p"))
    assert out[0] == st.FALSE and out[1] == st.FALSE
    ident = system(["a", "b"], [(("a",), ("b", "a"))], {1: {("a", "a"), ("b", "b")}},
                   {"a": {"p"}}, [("a", 1, "x", "p"), ("b", 1, "x", "q")])
    m = to_mkrtychev(ident)
    for f in ("[x]_1 p", "[x]_1 q", "X [x]_1 p | p", "[x]_1 p S q"):
        assert eval_is(ident, P(f))[0] == eval_formula(m, P(f))


def test_to_mkrtychev_errors():
    two = system(["s0"], [((), ("s0",)), ((), ("s0",))], {1: {("s0", "s0")}}, {})
    with pytest.raises(ModelError):
        to_mkrtychev(two)
    wide = system(["s0", "s1"], [((), ("s0",))],
                  {1: {("s0", "s0"), ("s0", "s1"), ("s1", "s1")}}, {})
    with pytest.raises(ModelError):
        to_mkrtychev(wide)


# ---------------------------------------------------------------- properties

@pytest.mark.parametrize("sid,profile", schema_plan())
def test_soundness(sid, profile):
    failures = soundness_failures(sid, profile, 30, 30, seed=7)
    assert not failures, failures[:1]


def test_rule_soundness():
    rng = random.Random(3)
    checked = 0
    for _ in range(400):
        prof = NAMED[rng.choice(["lpltl-p", "lpltl-ax", "lpltl-int", "ltl-j"])]
        f = random_formula(rng, prof, 3, agents=2)
        m = random_model(rng, prof, 2, hints=[f])
        ev = Evaluator(m)
        if ev(f) != st.TRUE:
            continue
        checked += 1
        for g in (Next(f), WPrev(f), always(f), historically(f)):
            assert ev(g) == st.TRUE
    assert checked > 20


def test_rerolling_invariance():
    rng = random.Random(4)
    for _ in range(300):
        prof = NAMED[rng.choice(list(NAMED))]
        f = random_formula(rng, prof, 4, agents=2)
        m = random_model(rng, prof, 2, hints=[f])
        prefix, loop = m.run
        rolled = MkModel(m.profile, m.states, (prefix + loop, loop + loop), m.valuation,
                         m.evidence, m.cs, m.universe, m.agents)
        assert eval_formula(m, f) == eval_formula(rolled, f)


def test_ltlj_counter_model():
    m = load_model(corpus_dir() / "models" / "ltlj-no-persistence.json")
    s = eval_formula(m, P("[x]_1 p -> X [x]_1 p"))
    assert not s.at(0)
    assert s == UPB([False], [True])


def test_two_phase_model():
    m = load_model(corpus_dir() / "models" / "two-phase.json")
    assert eval_formula(m, P("~[x]_1 p & X [x]_1 p")).at(0)
    assert eval_formula(m, P("Ys Ys Yw false")) == UPB([False, False, True], [False])


def _memberships(e, m, terms, formulas, n):
    return {(t, f, k) for t in terms for f in formulas for k in range(n)
            if e.holds(k, 1, t, f)}


def test_saturation_monotone_and_generalize_adds():
    rng = random.Random(5)
    prof = get_profile("lpltl-int")
    plain = get_profile("lpltl-p")
    for _ in range(150):
        hints = [random_formula(rng, prof, 3) for _ in range(3)]
        m = random_model(rng, prof, 1, hints=hints)
        n = len(m.run[0]) + 2 * len(m.run[1])
        terms = {j.term for h in hints for j in _justs(h)}
        terms |= {parse_term("gen(x)"), parse_term("x+y"), parse_term("!x")}
        forms = {j.body for h in hints for j in _justs(h)} | {f for (_, _, _, f) in m.evidence}
        forms |= {always(f) for f in list(forms)}
        full = _memberships(MkEvidence(m), m, terms, forms, n)
        # more base entries, more memberships
        extra = MkModel(m.profile, m.states, m.run, m.valuation,
                        m.evidence + [(m.states[0], 1, x, P("p"))], m.cs, None, 1)
        assert full <= _memberships(MkEvidence(extra), extra, terms, forms, n)
        # dropping generalize never adds
        weak = MkModel(plain, m.states, m.run, m.valuation, m.evidence, m.cs, None, 1)
        assert _memberships(MkEvidence(weak), weak, terms, forms, n) <= full


def _justs(f):
    from tjl.syntax import walk
    return [g for g in walk(f) if isinstance(g, Just)]


def test_evaluation_is_deterministic_without_cache():
    rng = random.Random(6)
    for _ in range(100):
        f = random_formula(rng, BASE, 4)
        m = random_model(rng, BASE, 1, hints=[f])
        assert Evaluator(m)(f) == Evaluator(m)(f) == eval_formula(m, f)


def test_json_round_trip():
    rng = random.Random(8)
    for _ in range(100):
        prof = NAMED[rng.choice(list(NAMED))]
        f = random_formula(rng, prof, 3, agents=2)
        m = random_model(rng, prof, 2, hints=[f])
        back = model_from_json(json.loads(json.dumps(model_to_json(m))))
        assert back.profile.axioms == m.profile.axioms and back.profile.core == m.profile.core
        assert eval_formula(back, f) == eval_formula(m, f)
    sysm = random_system(rng, BASE, 2, runs=3)
    back = model_from_json(model_to_json(sysm))
    assert isinstance(back, InterpretedSystem)
    assert back.access == sysm.access and back.runs == sysm.runs


def test_window_evaluator_agrees():
    rng = random.Random(9)
    for _ in range(300):
        f = random_formula(rng, BASE, 4)
        m = random_model(rng, BASE, 1, hints=[f])
        s = eval_formula(m, f)
        w = WindowEvaluator(m, f)
        for k in range(w.safe):
            assert s.at(k) == w.at(f, k), (f, k)


def _state_bodies(f):
    """Every justified body is a propositional formula, so its truth depends on the state."""
    from tjl.syntax import Imp as I, walk
    ok = (Prop, I, type(P("false")))
    return all(all(isinstance(h, ok) for h in walk(g.body)) for g in walk(f) if isinstance(g, Just))


@settings(max_examples=300, deadline=None)
@given(hst.randoms(use_true_random=False))
def test_identity_single_run_matches_eval_on_state_bodies(rnd):
    f = random_formula(rnd, BASE, 3)
    if not _state_bodies(f):
        f = random_formula(rnd, BASE, 3, justs=False)
    sysm = random_system(rnd, BASE, 1, runs=1, identity=True, hints=[f])
    assert eval_is(sysm, f)[0] == eval_formula(to_mkrtychev(sysm), f)


def test_interpreted_stream_shapes():
    rng = random.Random(10)
    for _ in range(100):
        f = random_formula(rng, BASE, 3)
        sysm = random_system(rng, BASE, 2, runs=3, hints=[f])
        out = eval_is(sysm, f)
        assert sorted(out) == [0, 1, 2]
        for r, s in out.items():
            prefix, loop = sysm.runs[r]
            k = len(prefix) + 3 * len(loop)
            assert len(unroll(s, k)) == k
