"""Reference semantics by brute force: naive grounding, reduct, least model.

Deliberately shares nothing with the matcher or the engine except the term
and rule data types, so the two can be checked against each other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (
    BOTTOM,
    DEFAULT_LIMITS,
    ArithmeticTypeError,
    BoundExceeded,
    Func,
    Limits,
    Program,
    Rule,
    Var,
    compare,
    ground_term,
    has_arith,
    term_vars,
)

SUBSET_CAP = 22


class OracleTooLarge(Exception):
    def __init__(self, method: str, size: int, cap: int):
        super().__init__(f"{method} enumeration over {size} atoms exceeds the cap of {cap}")
        self.size = size


class OracleBoundExceeded(BoundExceeded):
    def __init__(self, rule: Rule, cause: Exception):
        super().__init__(f"grounding {rule} broke a bound: {cause}")
        self.rule = rule


@dataclass(frozen=True)
class GroundRule:
    head: tuple
    pos: FrozenSet[tuple] = frozenset()
    neg: FrozenSet[tuple] = frozenset()

    @property
    def is_constraint(self) -> bool:
        return self.head == BOTTOM


@dataclass
class GroundProgram:
    rules: List[GroundRule] = field(default_factory=list)

    @property
    def atoms(self) -> Set[tuple]:
        out = set()
        for r in self.rules:
            if not r.is_constraint:
                out.add(r.head)
            out |= r.pos | r.neg
        return out

    @property
    def heads(self) -> Set[tuple]:
        return {r.head for r in self.rules if not r.is_constraint}


def _match(t, value, theta: dict):
    """Structural matching of an arithmetic-free term; returns the extended binding or None."""
    if isinstance(t, Var):
        if t.name in theta:
            return theta if theta[t.name] == value else None
        out = dict(theta)
        out[t.name] = value
        return out
    if isinstance(t, Func):
        if not isinstance(value, tuple) or value[0] != t.name or len(value) - 1 != len(t.args):
            return None
        for a, v in zip(t.args, value[1:]):
            theta = _match(a, v, theta)
            if theta is None:
                return None
        return theta
    return theta if (t == value and type(t) is type(value)) else None


def _body_substitutions(rule: Rule, by_pred: Dict[str, List[tuple]]):
    """All bindings of the positive-body variables with each atom drawn from ``by_pred``."""

    def walk(i: int, theta: dict):
        if i == len(rule.pos):
            yield theta
            return
        atom = rule.pos[i]
        for args in by_pred.get(atom.pred, ()):
            if len(args) != len(atom.args):
                continue
            th = theta
            for t, v in zip(atom.args, args):
                if has_arith(t):
                    continue  # checked once everything is bound
                th = _match(t, v, th)
                if th is None:
                    break
            if th is not None:
                yield from walk(i + 1, th)

    yield from walk(0, {})


def _complete(rule: Rule, theta: dict, limits: Limits) -> Optional[dict]:
    """Apply ``V = expr`` assignments, then verify arithmetic arguments and built-ins."""
    theta = dict(theta)
    changed = True
    while changed:
        changed = False
        for b in rule.builtins:
            for var, expr in b.assignable():
                if var not in theta and all(v in theta for v in term_vars(expr)):
                    theta[var] = ground_term(expr, theta, limits)
                    changed = True
    for b in rule.builtins:
        if not compare(b.op, ground_term(b.left, theta, limits), ground_term(b.right, theta, limits)):
            return None
    return theta


def _instances(rule: Rule, by_pred, limits: Limits, drop_overflow: bool, present: Set[tuple]):
    for theta in _body_substitutions(rule, by_pred):
        try:
            full = _complete(rule, theta, limits)
            if full is None:
                continue
            pos = [a.ground(full, limits) for a in rule.pos]
            if any(p not in present for p in pos):
                continue  # arithmetic argument disagreed with the matched atom
            head = rule.head.ground(full, limits)
        except ArithmeticTypeError:
            continue
        except BoundExceeded as exc:
            if drop_overflow:
                continue
            raise OracleBoundExceeded(rule, exc) from None
        try:
            neg = [a.ground(full, limits) for a in rule.neg]
        except ArithmeticTypeError:
            continue
        except BoundExceeded as exc:
            if drop_overflow:
                continue
            raise OracleBoundExceeded(rule, exc) from None
        yield head, frozenset(pos), frozenset(neg)


def ground_bounded(program: Program, limits: Limits = DEFAULT_LIMITS, drop_overflow: bool = False, max_rules: int = 2_000_000) -> GroundProgram:
    """Instantiate every rule over a positive over-approximation of the derivable atoms.

    The over-approximation is the least model of the program with negation
    dropped, so every instance whose positive body could ever hold is kept.
    """
    rules = program.all_rules()
    derived: Set[tuple] = set()
    by_pred: Dict[str, List[tuple]] = {}
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.is_constraint:
                continue
            new = []
            for head, _, _ in _instances(r, by_pred, limits, drop_overflow, derived):
                if head not in derived:
                    new.append(head)
            for h in new:
                if h not in derived:
                    derived.add(h)
                    by_pred.setdefault(h[0], []).append(h[1])
                    changed = True
            if len(derived) > max_rules:
                raise OracleTooLarge("grounding", len(derived), max_rules)
    out: List[GroundRule] = []
    seen = set()
    for r in rules:
        for head, pos, neg in _instances(r, by_pred, limits, drop_overflow, derived):
            g = GroundRule(head, pos, neg)
            if g not in seen:
                seen.add(g)
                out.append(g)
                if len(out) > max_rules:
                    raise OracleTooLarge("grounding", len(out), max_rules)
    return GroundProgram(out)


def reduct(gp: GroundProgram, x: Iterable[tuple]) -> GroundProgram:
    x = set(x)
    return GroundProgram([GroundRule(r.head, r.pos) for r in gp.rules if not (r.neg & x)])


def cn(gp: GroundProgram) -> Set[tuple]:
    """Least model of a definite program (negative bodies are ignored)."""
    waiting: Dict[tuple, List[int]] = {}
    missing = []
    model: Set[tuple] = set()
    queue = []
    for i, r in enumerate(gp.rules):
        missing.append(len(r.pos))
        for a in r.pos:
            waiting.setdefault(a, []).append(i)
        if not r.pos:
            queue.append(r.head)
    while queue:
        a = queue.pop()
        if a in model:
            continue
        model.add(a)
        for i in waiting.get(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(gp.rules[i].head)
    return model


def is_answer_set(gp: GroundProgram, x: Iterable[tuple]) -> bool:
    x = set(x)
    if BOTTOM in x:
        return False
    return cn(reduct(gp, x)) == x


def generating_rules(gp: GroundProgram, x: Set[tuple]) -> List[GroundRule]:
    return [r for r in gp.rules if r.pos <= x and not (r.neg & x)]


def is_grounded(rules: Sequence) -> bool:
    """Some order exists in which every positive body is covered by earlier heads."""
    remaining = list(rules)
    heads: Set[tuple] = set()
    progress = True
    while remaining and progress:
        progress = False
        rest = []
        for r in remaining:
            if set(r.pos) <= heads:
                heads.add(r.head)
                progress = True
            else:
                rest.append(r)
        remaining = rest
    return not remaining


def is_answer_set_gr(gp: GroundProgram, x: Iterable[tuple]) -> bool:
    """Answer-set test through generating rules: X = HEAD(GR(X)) and GR(X) grounded."""
    x = set(x)
    gr = generating_rules(gp, x)
    return {r.head for r in gr} == x and is_grounded(gr)


def enumerate_answer_sets(gp: GroundProgram, method: str = "auto", cap: int = SUBSET_CAP) -> Set[FrozenSet[tuple]]:
    """All answer sets by exhaustive search.

    ``subsets`` scans every subset of the atoms, ``heads`` every subset of the
    non-fact rule heads (answer sets only contain heads), ``guess`` every
    assignment of the atoms that occur negatively and are heads (the reduct
    only depends on those).
    """
    if method == "auto":
        method = "guess"
    if method == "subsets":
        atoms = sorted(gp.atoms, key=repr)
        if len(atoms) > cap:
            raise OracleTooLarge(method, len(atoms), cap)
        candidates = (set(c) for n in range(len(atoms) + 1) for c in itertools.combinations(atoms, n))
        return {frozenset(x) for x in candidates if is_answer_set(gp, x)}
    if method == "heads":
        facts = {r.head for r in gp.rules if not r.pos and not r.neg and not r.is_constraint}
        others = sorted(gp.heads - facts, key=repr)
        if len(others) > cap:
            raise OracleTooLarge(method, len(others), cap)
        out = set()
        for n in range(len(others) + 1):
            for c in itertools.combinations(others, n):
                x = facts | set(c)
                if is_answer_set(gp, x):
                    out.add(frozenset(x))
        return out
    if method == "guess":
        heads = gp.heads
        negated = sorted({a for r in gp.rules for a in r.neg if a in heads}, key=repr)
        if len(negated) > cap:
            raise OracleTooLarge(method, len(negated), cap)
        out = set()
        for bits in itertools.product((False, True), repeat=len(negated)):
            guess = {a for a, b in zip(negated, bits) if b}
            x = cn(reduct(gp, guess))
            if {a for a in negated if a in x} == guess and is_answer_set(gp, x):
                out.add(frozenset(x))
        return out
    raise ValueError(f"unknown method {method!r}")


def oracle_answer_sets(program: Program, limits: Limits = DEFAULT_LIMITS, method: str = "auto", cap: int = SUBSET_CAP, drop_overflow: bool = False):
    return enumerate_answer_sets(ground_bounded(program, limits, drop_overflow), method, cap)


@dataclass
class Certificate:
    ok: bool
    condition: str = ""
    rule: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def certify_generating(gp: Optional[GroundProgram], x: Iterable[tuple], log: Sequence) -> Certificate:
    """Check that a fired-rule log justifies ``x``.

    ``log`` holds ``(rule, kind)`` pairs whose rule exposes ``head``, ``pos``
    and ``neg`` as ground atoms; entries of kind ``mbt`` are not part of the
    final derivation and are ignored.  Conditions: (a) every rule generates
    ``x``, (b) the heads are exactly ``x``, (c) every positive body is covered
    by earlier heads.
    """
    x = set(x)
    entries = [r for r, kind in log if kind != "mbt"]
    known = None if gp is None else set(gp.rules)
    for r in entries:
        pos, neg = set(r.pos), set(r.neg)
        if not pos <= x or neg & x or r.head == BOTTOM:
            return Certificate(False, "a", r, "not a generating rule of X")
        if known is not None and GroundRule(r.head, frozenset(pos), frozenset(neg)) not in known:
            return Certificate(False, "a", r, "not an instance of the program")
    heads = {r.head for r in entries}
    if heads != x:
        diff = sorted(map(repr, heads ^ x))[:5]
        return Certificate(False, "b", None, f"heads differ from X on {diff}")
    seen: Set[tuple] = set()
    for r in entries:
        if not set(r.pos) <= seen:
            return Certificate(False, "c", r, "positive body not covered by earlier heads")
        seen.add(r.head)
    return Certificate(True)
