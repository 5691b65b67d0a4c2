import json
import random

import pytest

from generators import random_instance, schema_ids
from tjl.axioms import SCHEMA_BY_ID, is_tautology, match_axiom
from tjl.lemmas import DEDUCTION, INTERNALIZE, LEMMAS, corpus_dir, entry_json
from tjl.profiles import NAMED, get_profile
from tjl.proof import (
    ConstantSpec, Derivation, Rule, Step, check_derivation, check_downward_closed, cs_contains,
    deduction, derivation_from_json, validate_cs,
)
from tjl.syntax import parse_formula as P

BASE = get_profile("lpltl-p")
TOTAL = ConstantSpec.total()


@pytest.mark.parametrize("text,schema", [
    ("p -> X Ys p", "FP"),
    ("O Yw false", "initial"),
    ("[x]_1 p -> p", "reflexivity"),
    ("[x]_1 (p -> q) -> [y]_1 p -> [x*y]_1 q", "application"),
    ("[y]_1 p -> [x+y]_1 p", "sum"),
    ("p -> p", "Taut"),
])
def test_match_axiom_examples(text, schema):
    assert match_axiom(P(text), BASE)[0] == schema


def test_match_axiom_rejects():
    assert match_axiom(P("X p -> p"), BASE) is None
    assert match_axiom(P("G [x]_1 p -> [gen(x)]_1 G p", get_profile("lpltl-int")), BASE) is None
    prof = get_profile("lpltl-int")
    assert match_axiom(P("G [x]_1 p -> [gen(x)]_1 G p", prof), prof)[0] == "generalize"


def test_match_axiom_bindings():
    sid, b = match_axiom(P("[x]_2 (p -> q) -> [c1]_2 p -> [x*c1]_2 q"), BASE)
    assert sid == "application"
    assert b["i"] == 2 and b["phi"] == P("p") and b["psi"] == P("q")


@pytest.mark.parametrize("text,expected", [
    ("[x]_1 p | ~[x]_1 p", True),
    ("p -> q -> p", True),
    ("X p -> p", False),
    ("(p -> q) -> (q -> r) -> p -> r", True),
    ("X (p -> q) -> X p -> X q", False),
])
def test_tautology_examples(text, expected):
    assert is_tautology(P(text)) is expected


def test_tautology_many_atoms():
    # 20 skeleton atoms goes through the splitting path
    atoms = [f"p{k}" for k in range(20)]
    big = " & ".join(atoms)
    assert is_tautology(P(f"({big}) -> p7"))
    assert not is_tautology(P(f"({' | '.join(atoms)}) -> p7"))


def test_cs_contains_examples():
    assert cs_contains(TOTAL, P("[c1]_1 (p -> q -> p)"), BASE)
    assert not cs_contains(TOTAL, P("[x]_1 (p -> p)"), BASE)
    one = ConstantSpec.explicit([P("[c1]_1 (p -> p)")])
    assert not cs_contains(one, P("[c2]_2 [c1]_1 (p -> p)"), BASE)
    assert cs_contains(one, P("[c1]_1 (p -> p)"), BASE)
    assert not cs_contains(ConstantSpec.empty(), P("[c1]_1 (p -> p)"), BASE)
    assert cs_contains(TOTAL, P("[c3]_2 [c1]_1 (p -> p)"), BASE)
    assert not cs_contains(TOTAL, P("[c1]_1 (X p -> p)"), BASE)


def test_downward_closed_examples():
    tower = P("[c2]_2 [c1]_1 (p -> p)")
    tail = P("[c1]_1 (p -> p)")
    assert check_downward_closed([tower, tail])
    assert not check_downward_closed([tower])
    assert check_downward_closed([])
    with pytest.raises(ValueError):
        check_downward_closed([P("p -> p")])
    assert validate_cs(ConstantSpec.explicit([tower]), BASE)
    assert not validate_cs(ConstantSpec.explicit([tower, tail]), BASE)


def _d(steps, premises=()):
    return Derivation(list(premises), [Step(f, r) for f, r in steps])


def test_check_examples():
    d = _d([(P("O Yw false"), Rule("Axiom"))])
    assert check_derivation(d, BASE, TOTAL).ok
    bad = _d([(P("p"), Rule("Premise", k=0)), (P("X p"), Rule("NextNec", 0))], [P("p")])
    res = check_derivation(bad, BASE, TOTAL)
    assert not res.ok and res.errors[0][0] == 1
    assert "premises" in res.errors[0][1]


def test_box_unfold_is_mp_only():
    d = LEMMAS[0].derivation()
    assert d.conclusion == P("G p -> p & X G p")
    assert {s.rule.type for s in d.steps} == {"Axiom", "MP"}
    schemas = check_derivation(d, BASE, TOTAL).schemas
    assert set(schemas) - {None} == {"U2", "fun", "Taut"}


def test_check_diagnostics():
    ax = P("p -> p")
    cases = [
        _d([(ax, Rule("Axiom", schema="FP"))]),
        _d([(P("X p -> p"), Rule("Axiom"))]),
        _d([(ax, Rule("Axiom")), (P("p"), Rule("MP", 0, 0))]),
        _d([(ax, Rule("Axiom")), (P("q"), Rule("MP", 0, 5))]),
        _d([(P("[c1]_1 (p -> p)"), Rule("IaxNec"))]),
        _d([(ax, Rule("Axiom")), (P("G (q -> q)"), Rule("BoxNec", 0))]),
        _d([(P("[gen(x)]_1 p -> [gen(x)]_1 p"), Rule("Axiom"))]),
    ]
    for d in cases[:4] + cases[5:]:
        assert not check_derivation(d, BASE, TOTAL).ok
    assert not check_derivation(cases[4], BASE, ConstantSpec.empty()).ok
    assert check_derivation(cases[4], BASE, TOTAL).ok


def test_stored_flags_verified():
    d = _d([(P("p"), Rule("Premise", k=0))], [P("p")])
    d.steps[0] = Step(P("p"), Rule("Premise", k=0), True)
    assert not check_derivation(d, BASE, TOTAL).ok


def test_json_round_trip():
    d = LEMMAS[1].derivation()
    again = derivation_from_json(json.loads(d.dumps()))
    assert again.steps == d.steps and again.premises == d.premises
    with pytest.raises(ValueError):
        derivation_from_json({"steps": [{"formula": "p", "rule": {"type": "Magic"}}]})


@pytest.mark.parametrize("entry", LEMMAS + INTERNALIZE[len(LEMMAS):] + DEDUCTION,
                         ids=lambda e: e.name)
def test_corpus_checks(entry):
    d = entry.derivation()
    assert check_derivation(d, get_profile(entry.logic), TOTAL).ok


def test_shipped_corpus_matches_builders():
    groups = {"lemmas": LEMMAS, "internalize": INTERNALIZE[len(LEMMAS):], "deduction": DEDUCTION}
    for sub, entries in groups.items():
        for e in entries:
            shipped = json.loads((corpus_dir() / sub / f"{e.name}.json").read_text())
            assert shipped == json.loads(json.dumps(entry_json(e)))


@pytest.mark.parametrize("name", sorted(NAMED))
def test_schema_round_trip(name):
    prof = get_profile(name, agents=2)
    rng = random.Random(name)
    for sid in schema_ids(prof):
        for _ in range(25):
            f = random_instance(rng, sid, prof, agents=2)
            m = match_axiom(f, prof, only=sid)
            assert m is not None, (sid, f)
            assert match_axiom(f, prof) is not None


def test_disabled_schema_not_matched():
    f = random_instance(random.Random(0), "FP-application", get_profile("ltl-j"))
    assert match_axiom(f, BASE, only="FP-application") is None
    f = random_instance(random.Random(0), "application", BASE)
    assert match_axiom(f, get_profile("ltl-j"), only="application") is None


def test_cs_monotonicity():
    small = ConstantSpec.explicit([P("[c1]_1 (p -> p)")])
    big = ConstantSpec.explicit([P("[c1]_1 (p -> p)"), P("[c2]_1 (q -> q)")])
    d = _d([(P("[c1]_1 (p -> p)"), Rule("IaxNec"))])
    for cs in (small, big, TOTAL):
        assert check_derivation(d, BASE, cs).ok


@pytest.mark.parametrize("entry", DEDUCTION, ids=lambda e: e.name)
def test_deduction_transform(entry):
    d = entry.derivation()
    out = deduction(d)
    assert not out.premises
    res = check_derivation(out, BASE, TOTAL)
    assert res.ok, res.errors
    gamma = d.premises[0] if len(d.premises) == 1 else None
    if gamma is not None:
        assert out.conclusion.left == gamma
    assert out.conclusion.right == d.conclusion


def test_every_schema_has_a_profile():
    for sid in SCHEMA_BY_ID:
        assert any(sid in schema_ids(p) for p in NAMED.values()), sid
