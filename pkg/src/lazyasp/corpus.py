"""Benchmark instance generators and the pinned example programs."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, List, Optional

# answer-set counts of Schur with three parts, N = 1..14
SCHUR3_COUNTS = [3, 6, 18, 30, 66, 120, 258, 288, 546, 300, 186, 114, 18, 0]


@dataclass
class InstanceSpec:
    family: str
    n: int = 0
    m: int = 3  # schur parts
    edges: int = 0  # cutedge
    discs: int = 4  # hanoi
    moves: int = 15  # hanoi
    seed: int = 0


@dataclass
class Instance:
    text: str
    expected: Optional[int] = None  # answer-set count when it is known
    info: Dict[str, int] = field(default_factory=dict)


def _facts(lines: List[str]) -> str:
    return "\n".join(lines) + "\n"


def schur(n: int, m: int = 3) -> Instance:
    if n < 1 or m < 1:
        raise ValueError("schur needs n >= 1 and m >= 1")
    lines = [f"number({i})." for i in range(1, n + 1)]
    lines += [f"part({p})." for p in range(1, m + 1)]
    for p in range(1, m + 1):
        others = ", ".join(f"not inpart(X,{q})" for q in range(1, m + 1) if q != p)
        body = f"{others}, number(X)" if others else "number(X)"
        lines.append(f"inpart(X,{p}) :- {body}.")
    lines.append(
        ":- number(X), number(Y), part(P), inpart(X,P), inpart(Y,P), inpart(Z,P), "
        "T=Y+1, X < T, Z = X+Y."
    )
    expected = SCHUR3_COUNTS[n - 1] if m == 3 and n <= len(SCHUR3_COUNTS) else None
    return Instance(_facts(lines), expected)


def threecol_wheel(n: int) -> Instance:
    """Hub 1 joined to every rim vertex 2..n; rim is a cycle."""
    if n < 4:
        raise ValueError("a wheel needs at least 4 vertices")
    lines = [f"v({i})." for i in range(1, n + 1)]
    lines += ["c(red).", "c(blue).", "c(green)."]
    lines += [f"e(1,{i})." for i in range(2, n + 1)]
    lines += [f"e({i},{i + 1})." for i in range(2, n)]
    lines.append(f"e({n},2).")
    lines += [
        "col(V,C) :- v(V), c(C), not ncol(V,C).",
        "ncol(V,C) :- col(V,D), c(C), C != D.",
        ":- e(V,U), col(V,C), col(U,C).",
    ]
    # the rim is an odd cycle when n is even and then needs three colors besides the hub
    return Instance(_facts(lines), 6 if n % 2 == 1 else 0)


def hamiltonian_complete(n: int) -> Instance:
    if n < 1:
        raise ValueError("hamiltonian needs n >= 1")
    lines = ["s(1)."] + [f"v({i})." for i in range(1, n + 1)]
    lines += [
        "a(X,Y) :- v(X), v(Y).",
        "hc(X,Y) :- s(X), a(X,Y), not nhc(X,Y).",
        "hc(X,Y) :- r(X), a(X,Y), not nhc(X,Y).",
        "nhc(X,Y) :- hc(X,Z), a(X,Y), Y != Z.",
        "nhc(X,Y) :- hc(Z,Y), a(X,Y), X != Z.",
        "r(Y) :- hc(X,Y).",
        ":- v(X), not r(X).",
    ]
    return Instance(_facts(lines), math.factorial(n - 1), {"naive_rules": 2 * n**3})


def birds(n: int) -> Instance:
    """N birds: 10% ostriches, 10% penguins, 10% super penguins, the rest plain birds."""
    if n < 0:
        raise ValueError("birds needs n >= 0")
    tenth = n // 10
    lines = []
    kinds = {"o": 0, "p": 0, "sp": 0, "b": 0}
    for i in range(1, n + 1):
        if i <= tenth:
            kind = "o"
        elif i <= 2 * tenth:
            kind = "p"
        elif i <= 3 * tenth:
            kind = "sp"
        else:
            kind = "b"
        kinds[kind] += 1
        lines.append(f"{kind}({i}).")
    lines += [
        "p(X) :- sp(X).",
        "b(X) :- p(X).",
        "b(X) :- o(X).",
        "f(X) :- b(X), not p(X), not o(X).",
        "f(X) :- sp(X).",
        "nf(X) :- p(X), not sp(X).",
        "nf(X) :- o(X).",
    ]
    flying = kinds["b"] + kinds["sp"]
    non_flying = kinds["o"] + kinds["p"]
    return Instance(_facts(lines), 1, {"flying": flying, "non_flying": non_flying, **kinds})


def cutedge(vertices: int, edges: int, seed: int = 0) -> Instance:
    """Random simple digraph; the closure target is vertex ``vertices - 2``."""
    if vertices < 3:
        raise ValueError("cutedge needs at least 3 vertices")
    possible = vertices * (vertices - 1)
    if not 2 <= edges <= possible:
        raise ValueError(f"cutedge needs 2 <= edges <= {possible}")
    rng = random.Random(seed)
    pairs = [(x, y) for x in range(vertices) for y in range(vertices) if x != y]
    chosen = sorted(rng.sample(pairs, edges))
    target = vertices - 2
    lines = [f"edge({x},{y})." for x, y in chosen]
    lines += [
        "delete(X,Y) :- edge(X,Y), not keep(X,Y).",
        "keep(X,Y) :- edge(X,Y), delete(X1,Y1), X1 != X.",
        "keep(X,Y) :- edge(X,Y), delete(X1,Y1), Y1 != Y.",
        "reachable(X,Y) :- keep(X,Y).",
        f"reachable(X,{target}) :- reachable(X,Z), reachable(Z,{target}).",
    ]
    return Instance(_facts(lines), edges)


def exinut_a() -> Instance:
    return Instance(pinned("exinut_a"), 1)


def exinut_b(n: int) -> Instance:
    lines = [f"p({i})." for i in range(1, n + 1)]
    lines += [
        "a :- not b.",
        "b :- not a.",
        "pa(X) :- a, p(X).",
        "pb(X) :- b, p(X).",
        "aa(X,Y) :- pa(X), pa(Y), not bb(X,Y).",
        "bb(X,Y) :- pb(X), pb(Y), not cc(X,Y).",
        "cc(X,Y) :- aa(X,Y), X < Y.",
        ":- a.",
    ]
    return Instance(_facts(lines), 1)


def _stack(discs) -> str:
    s = "nil"
    for d in discs:
        s = f"l({d},{s})"
    return s


def hanoi(discs: int = 4, moves: int = 15) -> Instance:
    """Tower of Hanoi planning program with a bound on the number of moves."""
    if discs < 1 or moves < 0:
        raise ValueError("hanoi needs discs >= 1 and moves >= 0")
    tower = _stack(range(1, discs + 1))
    text = f"""%------ initial settings
number_of_moves({moves}).
largest_disc({discs}).
initial_state(towers({tower},nil,nil)).
goal(towers(nil,nil,{tower})).
disc(1..{discs}).

%------ legal stacks
legalStack(nil).
legalStack(l(T,nil)) :- disc(T).
legalStack(l(T,l(T1,S))) :- legalStack(l(T1,S)), disc(T), T > T1.

%------ possible moves
possible_state(0,towers(S1,S2,S3)) :- initial_state(towers(S1,S2,S3)),
    legalStack(S1), legalStack(S2), legalStack(S3).
possible_state(I,towers(S1,S2,S3)) :- possible_move(I,T,towers(S1,S2,S3)).

possible_move(J,towers(l(X,S1),S2,S3),towers(S1,l(X,S2),S3)) :- possible_state(I,towers(l(X,S1),S2,S3)),
    number_of_moves(N), I<=N, legalStack(l(X,S2)), J=I+1, not ok(I).
possible_move(J,towers(l(X,S1),S2,S3),towers(S1,S2,l(X,S3))) :- possible_state(I,towers(l(X,S1),S2,S3)),
    number_of_moves(N), I<=N, legalStack(l(X,S3)), J=I+1, not ok(I).
possible_move(J,towers(S1,l(X,S2),S3),towers(l(X,S1),S2,S3)) :- possible_state(I,towers(S1,l(X,S2),S3)),
    number_of_moves(N), I<=N, legalStack(l(X,S1)), J=I+1, not ok(I).
possible_move(J,towers(S1,l(X,S2),S3),towers(S1,S2,l(X,S3))) :- possible_state(I,towers(S1,l(X,S2),S3)),
    number_of_moves(N), I<=N, legalStack(l(X,S3)), J=I+1, not ok(I).
possible_move(J,towers(S1,S2,l(X,S3)),towers(l(X,S1),S2,S3)) :- possible_state(I,towers(S1,S2,l(X,S3))),
    number_of_moves(N), I<=N, legalStack(l(X,S1)), J=I+1, not ok(I).
possible_move(J,towers(S1,S2,l(X,S3)),towers(S1,l(X,S2),S3)) :- possible_state(I,towers(S1,S2,l(X,S3))),
    number_of_moves(N), I<=N, legalStack(l(X,S2)), J=I+1, not ok(I).

%------ actual moves, traced back from the goal
move(I,towers(S1,S2,S3)) :- goal(towers(S1,S2,S3)), possible_state(I,towers(S1,S2,S3)).
ok(I) :- move(I,towers(S1,S2,S3)), goal(towers(S1,S2,S3)).
win :- ok(I).
:- not win.

move(J,towers(S1,S2,S3)) :- move(I,towers(A1,A2,A3)),
    possible_move(I,towers(S1,S2,S3),towers(A1,A2,A3)), J=I-1,
    not nomove(J,towers(S1,S2,S3)).
nomove(J,towers(S1,S2,S3)) :- move(I,towers(A1,A2,A3)),
    possible_move(I,towers(S1,S2,S3),towers(A1,A2,A3)), J=I-1,
    not move(J,towers(S1,S2,S3)).

%------ precisely one move at each step
moveStepI(I) :- move(I,T).
:- legalMoveNumber(I), ok(J), I<J, not moveStepI(I).
:- legalMoveNumber(I), move(I,T1), move(I,T2), T1!=T2.
legalMoveNumber(0).
legalMoveNumber(K) :- legalMoveNumber(I), number_of_moves(J), I < J, K=I+1.

#hide.
#show move/2.
"""
    return Instance(text, None, {"optimal_moves": 2**discs - 1})


def _unstack(term) -> List[int]:
    out = []
    while term != "nil":
        _, disc, term = term
        out.append(disc)
    return out


def replay_hanoi(atoms, discs: int) -> Optional[str]:
    """Check that the ``move/2`` atoms form a legal plan from the start to the goal.

    Returns ``None`` for a valid plan, else a description of the first problem.
    Stacks are listed top first; a stack is legal when numbers decrease downwards.
    """
    states: Dict[int, List[List[int]]] = {}
    for pred, args in atoms:
        if pred != "move":
            continue
        step, towers = args
        if step in states:
            return f"two states at step {step}"
        states[step] = [_unstack(t) for t in towers[1:]]
    if not states:
        return "no moves"
    last = max(states)
    if sorted(states) != list(range(last + 1)):
        return "steps are not contiguous from 0"
    full = list(range(discs, 0, -1))
    if states[0] != [full, [], []]:
        return "does not start from the initial state"
    if states[last] != [[], [], full]:
        return "does not end in the goal state"
    for step in range(last + 1):
        for stack in states[step]:
            if any(a <= b for a, b in zip(stack, stack[1:])):
                return f"illegal stack at step {step}"
    for step in range(1, last + 1):
        before, after = states[step - 1], states[step]
        changed = [i for i in range(3) if before[i] != after[i]]
        if len(changed) != 2:
            return f"step {step} changes {len(changed)} towers"
        src, dst = changed if len(before[changed[0]]) > len(after[changed[0]]) else changed[::-1]
        if not before[src] or after[src] != before[src][1:] or after[dst] != [before[src][0]] + before[dst]:
            return f"step {step} is not a single top-disc move"
    return None


def pinned(name: str) -> str:
    """Text of a program shipped in ``lazyasp/programs``."""
    return resources.files("lazyasp").joinpath("programs", f"{name}.lp").read_text(encoding="utf-8")


PINNED_EXPECTED = {"example4": 4, "grand_exemple": 3, "exinut_a": 1, "empty": 1, "birds_small": 1, "twocol": 2}


FAMILIES: Dict[str, Callable[[InstanceSpec], Instance]] = {
    "schur": lambda s: schur(s.n, s.m),
    "birds": lambda s: birds(s.n),
    "cutedge": lambda s: cutedge(s.n, s.edges, s.seed),
    "threecol-wheel": lambda s: threecol_wheel(s.n),
    "hamiltonian-complete": lambda s: hamiltonian_complete(s.n),
    "hanoi": lambda s: hanoi(s.discs, s.moves),
    "exinut-a": lambda s: exinut_a(),
    "exinut-b": lambda s: exinut_b(s.n),
    "grand-exemple": lambda s: Instance(pinned("grand_exemple"), PINNED_EXPECTED["grand_exemple"]),
    "example4": lambda s: Instance(pinned("example4"), PINNED_EXPECTED["example4"]),
}


def generate_instance(spec: InstanceSpec) -> Instance:
    try:
        make = FAMILIES[spec.family]
    except KeyError:
        raise ValueError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}") from None
    return make(spec)


# ---------------------------------------------------------------- random programs


def random_program(rng: random.Random, max_preds: int = 3, max_consts: int = 6, max_rules: int = 8, max_constraints: int = 2) -> str:
    """Small random normal program: arity <= 1, no function symbols, always safe."""
    n_preds = rng.randint(min(2, max_preds), max_preds)
    preds = [f"p{i}" for i in range(n_preds)]
    arity = {p: rng.randint(0, 1) for p in preds}
    unary = [p for p in preds if arity[p] == 1]
    consts = [str(i) for i in range(rng.randint(1, max_consts))]
    lines = []

    def literal(p, var):
        return p if arity[p] == 0 else f"{p}({var})"

    def body(with_var):
        # with_var: X is bound by a leading positive unary literal, keeping the rule safe
        lits = [f"{rng.choice(unary)}(X)"] if with_var else []
        term = (lambda: "X") if with_var else (lambda: rng.choice(consts))
        for _ in range(rng.choice((0, 0, 1, 1, 2))):
            lits.append(literal(rng.choice(preds), term()))
        for _ in range(rng.choice((0, 1, 1, 2))):
            lits.append("not " + literal(rng.choice(preds), term()))
        return lits

    # a few facts so that positive bodies have something to match
    n_facts = rng.randint(0, min(3, max_rules))
    for _ in range(n_facts):
        p = rng.choice(preds)
        lines.append(literal(p, rng.choice(consts)) + ".")
    budget = max(1, max_rules - n_facts)
    if budget >= 3 and rng.random() < 0.7:
        # an even loop through negation, the usual source of several answer sets
        a, b = rng.sample(preds, 2) if n_preds > 1 else (preds[0], preds[0])
        if arity[a] == arity[b] == 1:
            dom = rng.choice(unary)
            lines.append(f"{dom}({rng.choice(consts)}).")
            lines.append(f"{a}(X) :- {dom}(X), not {b}(X).")
            lines.append(f"{b}(X) :- {dom}(X), not {a}(X).")
        else:
            x, y = rng.choice(consts), rng.choice(consts)
            lines.append(f"{literal(a, x)} :- not {literal(b, y)}.")
            lines.append(f"{literal(b, y)} :- not {literal(a, x)}.")
        budget -= 3 if arity[a] == arity[b] == 1 else 2
    for _ in range(rng.randint(1, max(1, budget))):
        head = rng.choice(preds)
        with_var = bool(unary) and rng.random() < 0.6
        if arity[head] == 1 and (not with_var or rng.random() < 0.25):
            lits = body(False)
            c = rng.choice(consts)
            lines.append(f"{head}({c}) :- {', '.join(lits)}." if lits else f"{head}({c}).")
        elif arity[head] == 1:
            lines.append(f"{head}(X) :- {', '.join(body(True))}.")
        else:
            lits = body(with_var)
            lines.append(f"{head} :- {', '.join(lits)}." if lits else f"{head}.")
    for _ in range(rng.randint(0, max_constraints)):
        lits = body(bool(unary) and rng.random() < 0.5)
        if lits:
            lines.append(f":- {', '.join(lits)}.")
    return "\n".join(lines) + "\n"
