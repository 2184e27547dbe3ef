import random

import pytest

from lazyasp.core import check_safety
from lazyasp.corpus import (
    FAMILIES,
    PINNED_EXPECTED,
    SCHUR3_COUNTS,
    InstanceSpec,
    birds,
    cutedge,
    generate_instance,
    hamiltonian_complete,
    hanoi,
    pinned,
    random_program,
    replay_hanoi,
    schur,
    threecol_wheel,
)
from lazyasp.engine import SearchConfig, solve
from lazyasp.oracle import oracle_answer_sets
from lazyasp.parser import parse_atoms, parse_program

SPECS = {
    "schur": InstanceSpec("schur", n=4),
    "birds": InstanceSpec("birds", n=20),
    "cutedge": InstanceSpec("cutedge", n=6, edges=8, seed=2),
    "threecol-wheel": InstanceSpec("threecol-wheel", n=6),
    "hamiltonian-complete": InstanceSpec("hamiltonian-complete", n=4),
    "hanoi": InstanceSpec("hanoi", discs=3, moves=7),
    "exinut-a": InstanceSpec("exinut-a"),
    "exinut-b": InstanceSpec("exinut-b", n=5),
    "grand-exemple": InstanceSpec("grand-exemple"),
    "example4": InstanceSpec("example4"),
}


def count(text, **kw):
    return len(solve(parse_program(text), SearchConfig(num_answer_sets=0, **kw)))


def test_every_family_is_covered():
    assert set(SPECS) == set(FAMILIES)


@pytest.mark.parametrize("family", sorted(SPECS))
def test_families_parse_and_are_safe(family):
    prog = parse_program(generate_instance(SPECS[family]).text)
    for r in prog.all_rules():
        check_safety(r)


@pytest.mark.parametrize("family", sorted(SPECS))
def test_generators_are_deterministic(family):
    assert generate_instance(SPECS[family]).text == generate_instance(SPECS[family]).text


def test_cutedge_seed_changes_the_graph():
    assert cutedge(10, 20, 1).text != cutedge(10, 20, 2).text


@pytest.mark.parametrize("name", sorted(PINNED_EXPECTED))
def test_pinned_programs(name):
    assert count(pinned(name)) == PINNED_EXPECTED[name]


@pytest.mark.parametrize("n", range(1, 6))
def test_schur_expected(n):
    inst = schur(n)
    assert inst.expected == SCHUR3_COUNTS[n - 1] == count(inst.text)


def test_schur_two_parts_against_oracle():
    text = schur(4, 2).text
    assert count(text) == len(oracle_answer_sets(parse_program(text)))


@pytest.mark.parametrize("n", [4, 5])
def test_hamiltonian_expected(n):
    inst = hamiltonian_complete(n)
    assert inst.expected == [6, 24][n - 4] == count(inst.text)


@pytest.mark.parametrize("vertices, edges, seed", [(6, 8, 1), (8, 12, 3), (10, 20, 1)])
def test_cutedge_count_equals_edges(vertices, edges, seed):
    inst = cutedge(vertices, edges, seed)
    assert inst.expected == edges == count(inst.text)


def test_threecol_expected():
    for n in (4, 5, 6, 7):
        inst = threecol_wheel(n)
        assert inst.expected == count(inst.text)


@pytest.mark.parametrize("n", [1, 10, 37])
def test_birds_counts_are_derived_from_the_facts(n):
    inst = birds(n)
    (model,) = [a.atoms for a in solve(parse_program(inst.text))]
    assert sum(1 for a in model if a[0] == "f") == inst.info["flying"]
    assert sum(1 for a in model if a[0] == "nf") == inst.info["non_flying"]
    assert inst.info["flying"] + inst.info["non_flying"] == n


@pytest.mark.parametrize(
    "make",
    [
        lambda: schur(0),
        lambda: threecol_wheel(3),
        lambda: hamiltonian_complete(0),
        lambda: birds(-1),
        lambda: cutedge(2, 1),
        lambda: cutedge(4, 13),
        lambda: hanoi(0),
        lambda: generate_instance(InstanceSpec("nope")),
    ],
)
def test_invalid_parameters(make):
    with pytest.raises(ValueError):
        make()


def test_random_programs_respect_the_shape():
    for seed in range(200):
        prog = parse_program(random_program(random.Random(seed)))
        assert len(prog.arities) <= 3
        assert all(a <= 1 for a in prog.arities.values())
        assert len(prog.rules) <= 8
        assert len(prog.constraints) <= 2


# ---- Hanoi plans


def _plan(discs, moves):
    (answer,) = solve(parse_program(hanoi(discs, moves).text))
    return answer.atoms


def test_hanoi_plan_replays():
    atoms = _plan(4, 15)
    assert replay_hanoi(atoms, 4) is None
    assert max(args[0] for pred, args in atoms if pred == "move") == 15


def test_hanoi_three_discs():
    assert replay_hanoi(_plan(3, 7), 3) is None


def test_hanoi_too_few_moves_is_unsatisfiable():
    # the move bound admits plans of up to bound + 1 moves, so 5 is the largest hopeless bound for 3 discs
    assert solve(parse_program(hanoi(3, 5).text)) == []
    assert replay_hanoi(_plan(3, 6), 3) is None


def _state(text):
    (a,) = parse_atoms(text)
    return a


def test_replay_rejects_bad_plans():
    start = "move(0,towers(l(2,l(1,nil)),nil,nil))"
    good = [start, "move(1,towers(l(1,nil),l(2,nil),nil))", "move(2,towers(nil,l(2,nil),l(1,nil)))", "move(3,towers(nil,nil,l(2,l(1,nil))))"]
    assert replay_hanoi({_state(t) for t in good}, 2) is None
    # a larger number may not sit below a smaller one
    illegal = good[:2] + ["move(2,towers(nil,l(1,l(2,nil)),nil))"]
    assert replay_hanoi({_state(t) for t in illegal}, 2) is not None
    # two discs moved at once
    jump = [start, "move(1,towers(nil,nil,l(2,l(1,nil))))"]
    assert "single" in replay_hanoi({_state(t) for t in jump}, 2)
    gap = [start, "move(2,towers(nil,nil,l(2,l(1,nil))))"]
    assert "contiguous" in replay_hanoi({_state(t) for t in gap}, 2)
    assert "goal" in replay_hanoi({_state(t) for t in good[:3]}, 2)
    assert replay_hanoi({_state(t) for t in good[1:]}, 2) is not None
    assert replay_hanoi(set(), 2) == "no moves"
