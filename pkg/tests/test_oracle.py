import random

import pytest
from hypothesis import given, settings, strategies as st

from lazyasp.core import BOTTOM, Limits
from lazyasp.corpus import birds, pinned, random_program, threecol_wheel
from lazyasp.engine import SearchConfig, solve
from lazyasp.oracle import (
    GroundProgram,
    GroundRule,
    OracleBoundExceeded,
    OracleTooLarge,
    certify_generating,
    cn,
    enumerate_answer_sets,
    ground_bounded,
    is_answer_set,
    is_answer_set_gr,
    oracle_answer_sets,
    reduct,
)
from lazyasp.parser import parse_atoms, parse_program


def atoms(text):
    return set(parse_atoms(text))


def g(head, pos=(), neg=()):
    def one(t):
        (a,) = parse_atoms(t)
        return a

    return GroundRule(BOTTOM if head is None else one(head), frozenset(map(one, pos)), frozenset(map(one, neg)))


def test_example4_grounding():
    gp = ground_bounded(parse_program(pinned("example4")))
    facts = [r for r in gp.rules if not r.pos and not r.neg]
    assert len(gp.rules) == 6 and len(facts) == 2
    assert g("a(1)", ["n(1)"], ["b(1)"]) in gp.rules
    assert g("b(2)", ["n(2)"], ["a(2)"]) in gp.rules


def test_facts_ground_to_themselves():
    gp = ground_bounded(parse_program("p(1). q(a)."))
    assert set(gp.rules) == {g("p(1)"), g("q(a)")}


def test_exinut_a_bounded_chain():
    gp = ground_bounded(parse_program(pinned("exinut_a")), Limits(max_int=5), drop_overflow=True)
    for i in range(5):
        assert g(f"p({i + 1})", ["a", f"p({i})"]) in gp.rules
    with pytest.raises(OracleBoundExceeded):
        ground_bounded(parse_program(pinned("exinut_a")), Limits(max_int=5))


def test_reduct():
    gp = GroundProgram([g("a", neg=["b"]), g("b", neg=["a"])])
    assert reduct(gp, atoms("a")).rules == [g("a")]
    assert reduct(gp, set()).rules == [g("a"), g("b")]


def test_reduct_of_grand_exemple_first_answer_set():
    gp = ground_bounded(parse_program(pinned("grand_exemple")))
    x = atoms("a(1) a(2) c(1) c(2) n(1) n(2)")
    assert cn(reduct(gp, x)) == x


def test_cn():
    assert cn(GroundProgram([g("p(0)"), g("p(1)", ["p(0)"])])) == atoms("p(0) p(1)")
    assert cn(GroundProgram([])) == set()


def test_birds_answer_set_counts():
    inst = birds(10)
    (model,) = oracle_answer_sets(parse_program(inst.text))
    flying = {a for a in model if a[0] == "f"}
    non_flying = {a for a in model if a[0] == "nf"}
    assert len(flying) == inst.info["flying"] == 8
    assert len(non_flying) == inst.info["non_flying"] == 2


def test_is_answer_set_example4():
    gp = ground_bounded(parse_program(pinned("example4")))
    assert is_answer_set(gp, atoms("a(1) b(2) n(1) n(2)"))
    assert not is_answer_set(gp, atoms("a(1) b(1) n(1) n(2)"))
    assert not is_answer_set(ground_bounded(parse_program("p. q.")), set())


def test_enumerate_examples():
    assert len(oracle_answer_sets(parse_program(pinned("example4")))) == 4
    assert oracle_answer_sets(parse_program("a :- not b. b :- not a. :- a.")) == {frozenset(atoms("b"))}
    assert len(oracle_answer_sets(parse_program(threecol_wheel(5).text))) == 6
    assert oracle_answer_sets(parse_program(pinned("twocol"))) == {
        frozenset(atoms("vertex(1) vertex(2) edge(1,2) blue(1) red(2)")),
        frozenset(atoms("vertex(1) vertex(2) edge(1,2) red(1) blue(2)")),
    }


def test_enumeration_cap():
    with pytest.raises(OracleTooLarge) as err:
        enumerate_answer_sets(ground_bounded(parse_program(threecol_wheel(5).text)), "subsets")
    assert err.value.size > 22


def test_stratified_has_one_answer_set():
    assert len(oracle_answer_sets(parse_program(birds(30).text))) == 1


def test_certify_first_branch_of_the_trace():
    prog = parse_program(pinned("grand_exemple"))
    gp = ground_bounded(prog)
    (first,) = solve(prog, SearchConfig(num_answer_sets=1, support_check=False))
    assert certify_generating(gp, first.atoms, first.log).ok
    kinds = [kind for _, kind in first.log]
    assert kinds.count("choice") == 2


def test_certify_counterexamples():
    x = atoms("a b")
    good = [(g("a"), "propagation"), (g("b", ["a"]), "propagation")]
    assert certify_generating(None, x, good).ok
    bad_neg = [(g("a", neg=["b"]), "propagation"), (g("b", ["a"]), "propagation")]
    cert = certify_generating(None, x, bad_neg)
    assert not cert.ok and cert.condition == "a"
    reordered = list(reversed(good))
    cert = certify_generating(None, x, reordered)
    assert not cert.ok and cert.condition == "c"
    missing = good[:1]
    cert = certify_generating(None, x, missing)
    assert not cert.ok and cert.condition == "b"
    foreign = GroundProgram([g("a")])
    assert certify_generating(foreign, x, good).condition == "a"
    # entries that only produced must-be-true atoms do not count
    assert certify_generating(None, x, good + [(g("c", ["a"]), "mbt")]).ok


# ---- random ground programs: both characterizations and all three enumerations agree

ATOMS = ["a", "b", "c", "d", "e"]


@st.composite
def ground_programs(draw):
    rules = []
    for _ in range(draw(st.integers(0, 8))):
        head = draw(st.sampled_from(ATOMS + [None]))
        pos = draw(st.lists(st.sampled_from(ATOMS), max_size=2))
        neg = draw(st.lists(st.sampled_from(ATOMS), max_size=2))
        rules.append(g(head, pos, neg))
    return GroundProgram(rules)


@settings(max_examples=300, deadline=None)
@given(ground_programs(), st.sets(st.sampled_from(ATOMS)))
def test_two_characterizations_agree(gp, x):
    x = {(a, ()) for a in x}
    assert is_answer_set(gp, x) == is_answer_set_gr(gp, x)


@settings(max_examples=200, deadline=None)
@given(ground_programs())
def test_enumeration_methods_agree(gp):
    subsets = enumerate_answer_sets(gp, "subsets")
    assert enumerate_answer_sets(gp, "heads") == subsets
    assert enumerate_answer_sets(gp, "guess") == subsets


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_enumeration_methods_agree_on_random_programs(seed):
    gp = ground_bounded(parse_program(random_program(random.Random(seed))))
    try:
        subsets = enumerate_answer_sets(gp, "subsets")
    except OracleTooLarge:
        return
    assert enumerate_answer_sets(gp, "heads") == subsets == enumerate_answer_sets(gp, "guess")
