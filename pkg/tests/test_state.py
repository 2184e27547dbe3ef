from hypothesis import given, settings, strategies as st

from lazyasp.core import BOTTOM
from lazyasp.corpus import pinned
from lazyasp.engine import Engine, SearchConfig
from lazyasp.parser import parse_atoms, parse_program
from lazyasp.state import CONFLICT, IN, MBT, MBT_FAILURE, OK, OUT, UNDEFINED, PartialInterpretation


def atom(text):
    (a,) = parse_atoms(text)
    return a


def test_fresh_state():
    s = PartialInterpretation()
    assert s.truth_of(atom("a(1)")) == UNDEFINED
    assert s.truth_of(BOTTOM) == OUT


def test_implicit_out_after_solving():
    s = PartialInterpretation({"n": 0})
    s.assert_in(atom("n(1)"))
    s.assert_in(atom("n(2)"))
    assert s.mark_component_solved(["n"]) == ["n"]
    assert s.truth_of(atom("n(3)")) == OUT
    assert s.truth_of(atom("n(1)")) == IN
    assert s.assert_in(atom("n(3)")) == CONFLICT
    assert s.assert_out(atom("n(3)")) == OK


def test_in_out_conflicts():
    s = PartialInterpretation()
    assert s.assert_out(atom("b(1)")) == OK
    assert s.assert_in(atom("b(1)")) == CONFLICT
    assert s.assert_in(atom("c")) == OK
    assert s.assert_out(atom("c")) == CONFLICT
    assert s.assert_in(BOTTOM) == CONFLICT
    assert s.assert_out(BOTTOM) == OK
    assert s.assert_in(atom("p(0)")) == OK


def test_mbt_promotion():
    s = PartialInterpretation()
    a2 = atom("a(2)")
    assert s.assert_mbt(a2) == OK
    assert s.truth_of(a2) == MBT and s.n_mbt == 1
    assert s.assert_in(a2) == OK
    assert s.truth_of(a2) == IN and s.n_mbt == 0
    assert s.atoms(MBT) == [] and s.atoms(IN) == [a2]
    assert s.assert_mbt(a2) == OK and s.truth_of(a2) == IN
    assert s.assert_out(a2) == CONFLICT


def test_events_queue():
    s = PartialInterpretation()
    s.assert_mbt(atom("a"))
    s.assert_in(atom("a"))
    s.assert_out(atom("b"))
    assert list(s.events) == [("pos", "a", ()), ("promote", "a", ()), ("out", "b", ())]


def test_mbt_failure_on_solving():
    s = PartialInterpretation({"n": 0, "a": 1, "b": 1})
    s.assert_mbt(atom("a(2)"))
    assert s.mark_component_solved(["a", "b"]) == MBT_FAILURE
    assert "a" not in s.solved
    assert s.mark_component_solved(["n"]) == ["n"]
    assert s.mark_component_solved([]) == []


def test_checkpoint_rollback():
    s = PartialInterpretation()
    mark = s.checkpoint()
    s.assert_in(atom("x"))
    s.rollback(mark)
    assert s.truth_of(atom("x")) == UNDEFINED


def test_nested_checkpoints_unwind_lifo():
    s = PartialInterpretation({"p": 0})
    s.assert_in(atom("p(1)"))
    outer = s.checkpoint()
    snap_outer = s.snapshot()
    s.assert_mbt(atom("p(2)"))
    inner = s.checkpoint()
    snap_inner = s.snapshot()
    s.assert_in(atom("p(2)"))
    s.assert_out(atom("p(3)"))
    s.mark_component_solved(["p"])
    s.set_current(1)
    s.rollback(inner)
    assert s.snapshot() == snap_inner
    s.rollback(outer)
    assert s.snapshot() == snap_outer
    assert s.checkpoint() == outer


def test_rollback_of_checkpoint_is_noop():
    s = PartialInterpretation()
    s.assert_in(atom("a"))
    before = s.snapshot()
    s.rollback(s.checkpoint())
    assert s.snapshot() == before


def test_rollback_restores_second_choice_point():
    prog = parse_program(pinned("grand_exemple"))
    seen = []

    def hook(line):
        if line.startswith("block a(2)") and not seen:
            seen.append(engine.state.true_atoms())

    engine = Engine(prog, SearchConfig(num_answer_sets=2, support_check=False), trace=hook)
    list(engine.solve())
    assert seen == [parse_atoms("n(1) n(2) a(1) c(1)")]


ops = st.lists(
    st.tuples(
        st.sampled_from(["in", "mbt", "out", "mark", "rollback", "solve"]),
        st.sampled_from(["p", "q"]),
        st.integers(0, 3),
    ),
    max_size=40,
)


@settings(max_examples=200, deadline=None)
@given(ops)
def test_random_mutations_keep_invariants(script):
    s = PartialInterpretation({"p": 0, "q": 1})
    marks = []
    for op, pred, n in script:
        a = (pred, (n,))
        if op == "mark":
            marks.append((s.checkpoint(), s.snapshot()))
        elif op == "rollback" and marks:
            mark, snap = marks.pop()
            s.rollback(mark)
            assert s.snapshot() == snap
        elif op == "solve":
            s.mark_component_solved([pred])
        elif op in ("in", "mbt", "out"):
            before = s.truth_of(a)
            ok = {"in": s.assert_in, "mbt": s.assert_mbt, "out": s.assert_out}[op](a)
            after = s.truth_of(a)
            if not ok:
                assert after == before
            elif op == "in":
                assert after == IN
            elif op == "mbt":
                assert after in (IN, MBT)
            else:
                assert after == OUT
            # IN and MBT never become OUT, OUT never becomes true
            if before in (IN, MBT):
                assert after in (IN, MBT)
            if before == OUT:
                assert after == OUT
        assert s.disjoint()
    while marks:
        mark, snap = marks.pop()
        s.rollback(mark)
        assert s.snapshot() == snap
