import random

from hypothesis import given, settings, strategies as st

from lazyasp import matcher as matcher_mod
from lazyasp.matcher import (
    CHECK,
    CHO,
    PRO,
    CompiledRule,
    Instantiator,
    Matcher,
    SubstStore,
    exhaustive_instantiations,
    instantiate_rule,
)
from lazyasp.parser import parse_atoms, parse_program
from lazyasp.state import PartialInterpretation


def rule_of(text, i=0):
    return parse_program(text).all_rules()[i]


def state_with(in_=(), out=(), mbt=()):
    s = PartialInterpretation()
    for a in parse_atoms(" ".join(in_)):
        s.assert_in(a)
    for a in parse_atoms(" ".join(mbt)):
        s.assert_mbt(a)
    for a in parse_atoms(" ".join(out)):
        s.assert_out(a)
    return s


def drain(rule, mode, state, store=None):
    it = Instantiator(rule, mode, state, store)
    out = []
    while True:
        theta = it.next()
        if theta is None:
            return out
        out.append(theta)


def as_set(thetas):
    return {frozenset(t.items()) for t in thetas}


A_RULE = "a(X) :- n(X), not b(X), not b(X+1)."
C_RULE = "c(X) :- n(X), not b(X+1)."


def test_pro_instance_with_arithmetic_negative_literal():
    s = state_with(in_=["n(1)", "n(2)"], out=["b(1)", "b(2)"])
    assert drain(rule_of(A_RULE), PRO, s) == [{"X": 1}]
    assert drain(rule_of(C_RULE), PRO, s) == [{"X": 1}]


def test_resumed_calls_do_not_repeat():
    s = state_with(in_=["n(1)", "n(2)"], out=["b(1)", "b(2)"])
    it = Instantiator(rule_of(A_RULE), PRO, s)
    assert it.next() == {"X": 1}
    assert it.next() is None


def test_fact_rule_fires_once_per_store():
    s = PartialInterpretation()
    r = rule_of("p(0).")
    store = SubstStore(s)
    assert instantiate_rule(r, PRO, s, store) == {}
    store.record_fired(r, (), "in")
    assert instantiate_rule(r, PRO, s, store) is None


def test_cho_skips_blocked_instance():
    s = state_with(in_=["n(1)", "n(2)", "a(1)", "c(1)"])
    r = rule_of("b(X) :- n(X), not a(X).")
    assert drain(r, CHO, s) == [{"X": 2}]
    assert as_set(drain(r, CHO, s)) == exhaustive_instantiations(r, CHO, s)


def test_exhaustive_matches_example():
    s = state_with(in_=["n(1)", "n(2)"], out=["b(1)", "b(2)"])
    assert exhaustive_instantiations(rule_of(A_RULE), PRO, s) == {frozenset({("X", 1)})}


def test_unsatisfiable_builtin():
    s = state_with(in_=["n(1)"])
    r = rule_of("p(X) :- n(X), 1 < 0.")
    assert exhaustive_instantiations(r, PRO, s) == set()
    assert drain(r, PRO, s) == []


def test_modes_on_mbt_atoms():
    s = state_with(in_=["n(1)"], mbt=["m(1)"], out=["o(1)"])
    pos_mbt = rule_of("h(X) :- n(X), m(X).")
    assert drain(pos_mbt, PRO, s) == [{"X": 1}]
    assert drain(pos_mbt, CHO, s) == []
    assert drain(pos_mbt, CHECK, s) == []
    neg_mbt = rule_of("h(X) :- n(X), not m(X).")
    assert drain(neg_mbt, PRO, s) == []
    assert drain(neg_mbt, CHO, s) == []
    assert drain(neg_mbt, CHECK, s) == [{"X": 1}]
    neg_undef = rule_of("h(X) :- n(X), not u(X).")
    assert drain(neg_undef, PRO, s) == []
    assert drain(neg_undef, CHO, s) == [{"X": 1}]
    neg_out = rule_of("h(X) :- n(X), not o(X).")
    assert drain(neg_out, PRO, s) == [{"X": 1}]


def test_implicit_out_in_pro_mode():
    s = state_with(in_=["n(1)"])
    s.comp_of = {"n": 0, "u": 0}
    s.mark_component_solved(["u"])
    assert drain(rule_of("h(X) :- n(X), not u(X)."), PRO, s) == [{"X": 1}]


def test_assignment_builtin_binds():
    s = state_with(in_=["n(1)", "n(2)"])
    r = rule_of("s(Z) :- n(X), n(Y), Z = X+Y, X < Y.")
    assert drain(r, PRO, s) == [{"X": 1, "Y": 2, "Z": 3}]


def test_arithmetic_in_positive_literal():
    s = state_with(in_=["n(1)", "n(2)", "n(3)"])
    r = rule_of("next(X) :- n(X), n(X+1).")
    assert as_set(drain(r, PRO, s)) == {frozenset({("X", 1)}), frozenset({("X", 2)})}


def test_store_excludes_recorded_substitutions():
    s = state_with(in_=["n(1)", "n(2)", "n(3)"])
    r = rule_of("m(X) :- n(X).")
    store = SubstStore(s)
    store.record_fired(r, (2,), "in")
    assert as_set(drain(r, PRO, s, store)) == {frozenset({("X", 1)}), frozenset({("X", 3)})}
    # CHECK ignores the store
    assert len(drain(r, CHECK, s, store)) == 3


def test_store_is_trail_managed():
    s = PartialInterpretation()
    r = rule_of("m(X) :- n(X).")
    store = SubstStore(s)
    mark = s.checkpoint()
    store.record_fired(r, (1,), "in")
    store.record_chosen(r, (2,))
    assert store.contains(r, (1,)) and store.was_chosen(r, (2,))
    s.rollback(mark)
    assert not store.contains(r, (1,)) and not store.was_chosen(r, (2,))


def test_bound_exceeded_candidates_are_skipped_and_counted():
    from lazyasp.core import Limits

    s = state_with(in_=["p(9)", "p(10)"])
    cr = CompiledRule(rule_of("p(X+1) :- p(X)."))
    m = Matcher(s, Limits(max_int=10))
    heads = [inst.head for inst in m.matches(cr, PRO)]
    assert heads == [("p", (10,))]
    assert m.skipped == 1


def test_positive_literals_only_scan_stored_extensions(monkeypatch):
    s = state_with(in_=[f"n({i})" for i in range(5)] + [f"other({i})" for i in range(50)])
    calls = []
    real = matcher_mod._unify
    monkeypatch.setattr(matcher_mod, "_unify", lambda *a: calls.append(a[1]) or real(*a))
    drain(rule_of("m(X) :- n(X)."), PRO, s)
    # one unification per stored n/1 tuple, none for the 50 unrelated atoms
    assert sorted(calls) == list(range(5))


def test_seeded_matching_uses_the_seed_atom():
    s = state_with(in_=["e(1,2)", "e(2,3)", "e(3,4)"])
    cr = CompiledRule(rule_of("r(X,Z) :- e(X,Y), e(Y,Z)."))
    m = Matcher(s)
    heads = {inst.head for inst in m.matches(cr, PRO, ("pos", 1, (3, 4)))}
    assert heads == {("r", (2, 4))}


# ---- property: draining the instantiator equals brute force

RULES = [
    "h(X) :- p(X), not q(X).",
    "h(X) :- p(X), q(Y), X < Y, not r(X).",
    "h(Z) :- p(X), p(Y), Z = X+Y, not q(Z).",
    "h(X) :- p(X), not q(X+1), not r(X).",
    "h(X) :- p(X), q(X+1).",
    "h(X) :- e(X,Y), e(Y,X), X != Y.",
    "h(f(X)) :- p(X), e(X,X), not r(f(X)).",
    "h :- p(X), not q(X), not r(1).",
    ":- p(X), q(X), not r(X).",
    "h(X) :- e(X,Y), p(Y), not e(Y,X), X <= Y.",
]

atom_st = st.one_of(
    st.builds(lambda p, a: f"{p}({a})", st.sampled_from(["p", "q", "r"]), st.integers(0, 4)),
    st.builds(lambda a, b: f"e({a},{b})", st.integers(0, 3), st.integers(0, 3)),
    st.builds(lambda a: f"r(f({a}))", st.integers(0, 3)),
)


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from(RULES),
    st.sampled_from([PRO, CHO, CHECK]),
    st.lists(st.tuples(atom_st, st.sampled_from(["in", "mbt", "out"])), max_size=14),
    st.lists(st.sampled_from(["p", "q", "r", "e"]), max_size=2),
)
def test_drain_equals_exhaustive(rule_text, mode, assignments, solved):
    rule = rule_of(rule_text)
    s = PartialInterpretation()
    for text, how in assignments:
        a = next(iter(parse_atoms(text)))
        {"in": s.assert_in, "mbt": s.assert_mbt, "out": s.assert_out}[how](a)
    s.mark_component_solved(solved)
    got = drain(rule, mode, s)
    assert len(got) == len(as_set(got))  # never the same substitution twice
    assert as_set(got) == exhaustive_instantiations(rule, mode, s)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(RULES), st.integers(0, 10**6))
def test_store_exclusion_partitions_the_instances(rule_text, seed):
    rng = random.Random(seed)
    rule = rule_of(rule_text)
    s = PartialInterpretation()
    for _ in range(10):
        p = rng.choice("pqr")
        s.assert_in((p, (rng.randint(0, 4),)))
        s.assert_in(("e", (rng.randint(0, 3), rng.randint(0, 3))))
    full = drain(rule, CHO, s)
    store = SubstStore(s)
    cr = CompiledRule(rule)
    recorded = [t for t in full if rng.random() < 0.5]
    for t in recorded:
        store.record_fired(rule, tuple(t[v] for v in cr.var_order), "in")
    rest = drain(rule, CHO, s, store)
    assert as_set(rest) | as_set(recorded) == as_set(full)
    assert not as_set(rest) & as_set(recorded)
