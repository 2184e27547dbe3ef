"""First-order language: terms, atoms, rules, programs and built-in arithmetic.

Ground terms are plain Python values so they hash and compare cheaply:

* ``int`` for integers,
* ``str`` for symbolic constants,
* ``tuple`` ``(functor, arg1, ..., argn)`` for compound terms.

Non-ground terms use the small classes :class:`Var`, :class:`Func` and
:class:`BinOp`.  A ground atom is the pair ``(predicate, args)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

BOTTOM_NAME = "#bot"
BOTTOM = (BOTTOM_NAME, ())

COMPARISONS = ("<", "<=", ">", ">=", "=", "!=")
ARITH_OPS = ("+", "-", "*")


class ModelError(Exception):
    """Base class for errors raised by the core model."""


class UnboundVariable(ModelError):
    pass


class BoundExceeded(ModelError):
    """A constructed term broke the integer or nesting-depth limit."""


class IntOverflow(BoundExceeded):
    pass


class DepthExceeded(BoundExceeded):
    pass


class ArithmeticTypeError(ModelError):
    pass


class ArityConflict(ModelError):
    pass


class SafetyError(ModelError):
    pass


@dataclass(frozen=True)
class Limits:
    max_int: int = 2**31 - 1
    max_depth: int = 16


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Func:
    """Compound term with at least one non-ground argument."""

    name: str
    args: tuple

    def __repr__(self) -> str:
        return f"{self.name}({','.join(map(term_str, self.args))})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __repr__(self) -> str:
        return f"({term_str(self.left)}{self.op}{term_str(self.right)})"


Term = Union[int, str, tuple, Var, Func, BinOp]


def make_func(name: str, args: Iterable) -> Term:
    """Build a compound term, collapsing to the ground tuple form when possible."""
    args = tuple(args)
    if all(is_ground(a) for a in args):
        return (name,) + args
    return Func(name, args)


def is_ground(t) -> bool:
    if isinstance(t, (int, str)):
        return True
    if isinstance(t, tuple):
        return True
    if isinstance(t, Var):
        return False
    if isinstance(t, Func):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, BinOp):
        return is_ground(t.left) and is_ground(t.right)
    raise TypeError(f"not a term: {t!r}")


def term_vars(t, out: Optional[List[str]] = None) -> List[str]:
    """Variable names of ``t`` in first-occurrence order (duplicates removed)."""
    if out is None:
        out = []
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, Func):
        for a in t.args:
            term_vars(a, out)
    elif isinstance(t, BinOp):
        term_vars(t.left, out)
        term_vars(t.right, out)
    return out


def has_arith(t) -> bool:
    if isinstance(t, BinOp):
        return True
    if isinstance(t, Func):
        return any(has_arith(a) for a in t.args)
    return False


def term_depth(t) -> int:
    """Nesting depth of a ground term; constants and integers have depth 0."""
    if isinstance(t, tuple):
        return 1 + max(term_depth(a) for a in t[1:])
    return 0


def check_int(v: int, limits: Limits) -> int:
    if v > limits.max_int or v < -limits.max_int:
        raise IntOverflow(f"integer {v} outside [-{limits.max_int}, {limits.max_int}]")
    return v


def ground_term(t, theta: Dict[str, object], limits: Limits = DEFAULT_LIMITS):
    """Instantiate ``t`` under ``theta``, evaluating arithmetic."""
    if isinstance(t, (int, str, tuple)):
        return t
    if isinstance(t, Var):
        try:
            return theta[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Func):
        value = (t.name,) + tuple(ground_term(a, theta, limits) for a in t.args)
        if term_depth(value) > limits.max_depth:
            raise DepthExceeded(f"term nesting deeper than {limits.max_depth}")
        return value
    if isinstance(t, BinOp):
        left = ground_term(t.left, theta, limits)
        right = ground_term(t.right, theta, limits)
        if type(left) is not int or type(right) is not int:
            raise ArithmeticTypeError(f"arithmetic on non-integers: {left!r} {t.op} {right!r}")
        if t.op == "+":
            v = left + right
        elif t.op == "-":
            v = left - right
        else:
            v = left * right
        return check_int(v, limits)
    raise TypeError(f"not a term: {t!r}")


def term_str(t) -> str:
    if isinstance(t, bool):
        raise TypeError("bool is not a term")
    if isinstance(t, int):
        return str(t)
    if isinstance(t, str):
        return t
    if isinstance(t, tuple):
        return f"{t[0]}({','.join(term_str(a) for a in t[1:])})"
    return repr(t)


def term_sort_key(t):
    """Integers numerically, then constants lexicographically, then compounds."""
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, str):
        return (1, t)
    return (2, t[0], len(t) - 1, tuple(term_sort_key(a) for a in t[1:]))


def atom_str(atom) -> str:
    pred, args = atom
    if pred == BOTTOM_NAME:
        return "#false"
    if not args:
        return pred
    return f"{pred}({','.join(term_str(a) for a in args)})"


def atom_sort_key(atom):
    pred, args = atom
    return (pred, len(args), tuple(term_sort_key(a) for a in args))


@dataclass(frozen=True)
class Atom:
    """Possibly non-ground atom ``pred(args)``."""

    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_bottom(self) -> bool:
        return self.pred == BOTTOM_NAME

    def vars(self) -> List[str]:
        out: List[str] = []
        for a in self.args:
            term_vars(a, out)
        return out

    def ground(self, theta, limits: Limits = DEFAULT_LIMITS):
        return (self.pred, tuple(ground_term(a, theta, limits) for a in self.args))

    def __str__(self) -> str:
        if self.is_bottom:
            return "#false"
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(term_str(a) for a in self.args)})"


BOTTOM_ATOM = Atom(BOTTOM_NAME, ())


@dataclass(frozen=True)
class Builtin:
    """Comparison ``left op right`` over ground terms."""

    op: str
    left: object
    right: object

    def vars(self) -> List[str]:
        out: List[str] = []
        term_vars(self.left, out)
        term_vars(self.right, out)
        return out

    def assignable(self) -> List[Tuple[str, object]]:
        """(variable, expression) pairs this builtin can bind when used as ``V = expr``."""
        if self.op != "=":
            return []
        out = []
        if isinstance(self.left, Var):
            out.append((self.left.name, self.right))
        if isinstance(self.right, Var):
            out.append((self.right.name, self.left))
        return out

    def __str__(self) -> str:
        return f"{term_str(self.left)} {self.op} {term_str(self.right)}"


def compare(op: str, left, right) -> bool:
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if type(left) is not int or type(right) is not int:
        raise ArithmeticTypeError(f"{op} needs integers, got {term_str(left)} and {term_str(right)}")
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    raise ValueError(f"unknown comparison {op!r}")


def eval_builtin(b: Builtin, theta: Dict[str, object], limits: Limits = DEFAULT_LIMITS) -> bool:
    """Evaluate a built-in comparison whose both sides are ground under ``theta``."""
    return compare(b.op, ground_term(b.left, theta, limits), ground_term(b.right, theta, limits))


@dataclass(eq=False)
class Rule:
    """``head :- pos, not neg, builtins``; a constraint has the bottom head."""

    head: Atom
    pos: Tuple[Atom, ...] = ()
    neg: Tuple[Atom, ...] = ()
    builtins: Tuple[Builtin, ...] = ()
    index: int = -1
    component: int = -1

    @property
    def is_constraint(self) -> bool:
        return self.head.is_bottom

    @property
    def is_fact(self) -> bool:
        return not self.pos and not self.neg and not self.builtins and not self.head.vars()

    def vars(self) -> List[str]:
        out: List[str] = []
        for a in self.pos:
            for t in a.args:
                term_vars(t, out)
        for b in self.builtins:
            term_vars(b.left, out)
            term_vars(b.right, out)
        for a in (self.head,) + tuple(self.neg):
            for t in a.args:
                term_vars(t, out)
        return out

    def __str__(self) -> str:
        body = [str(a) for a in self.pos]
        body += [f"not {a}" for a in self.neg]
        body += [str(b) for b in self.builtins]
        head = "" if self.is_constraint else str(self.head)
        if not body:
            return f"{head}."
        return f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}."


@dataclass(frozen=True)
class SafetyViolation:
    variable: str
    location: str

    def __str__(self) -> str:
        return f"unsafe variable {self.variable} in {self.location}"


def binding_vars(atom: Atom) -> List[str]:
    """Variables a positive literal can bind by matching (outside arithmetic)."""
    out: List[str] = []

    def walk(t):
        if isinstance(t, Var):
            if t.name not in out:
                out.append(t.name)
        elif isinstance(t, Func):
            for a in t.args:
                walk(a)

    for a in atom.args:
        walk(a)
    return out


def bound_by_body(rule: Rule) -> set:
    """Variables bound by the positive body, closed under ``V = expr`` assignments."""
    bound = set()
    for a in rule.pos:
        bound.update(binding_vars(a))
    changed = True
    while changed:
        changed = False
        for b in rule.builtins:
            for var, expr in b.assignable():
                if var not in bound and set(term_vars(expr)) <= bound:
                    bound.add(var)
                    changed = True
    return bound


def check_safety(rule: Rule) -> Optional[SafetyViolation]:
    """Return ``None`` for a safe rule, else the first offending variable."""
    bound = bound_by_body(rule)
    for a in rule.pos:
        for v in a.vars():
            if v not in bound:
                return SafetyViolation(v, "positive body")
    for a in rule.neg:
        for v in a.vars():
            if v not in bound:
                return SafetyViolation(v, "negative body")
    for b in rule.builtins:
        for v in b.vars():
            if v not in bound:
                return SafetyViolation(v, "built-in")
    for v in rule.head.vars():
        if v not in bound:
            return SafetyViolation(v, "head")
    return None


def apply_substitution(rule: Rule, theta: Dict[str, object], limits: Limits = DEFAULT_LIMITS) -> Rule:
    """Ground ``rule``; atom arguments are evaluated, built-ins are only instantiated."""
    missing = [v for v in rule.vars() if v not in theta]
    if missing:
        raise UnboundVariable(missing[0])

    def ground_atom(a: Atom) -> Atom:
        return Atom(a.pred, tuple(ground_term(t, theta, limits) for t in a.args))

    def subst_only(t):
        if isinstance(t, Var):
            return theta[t.name]
        if isinstance(t, Func):
            return make_func(t.name, (subst_only(a) for a in t.args))
        if isinstance(t, BinOp):
            return BinOp(t.op, subst_only(t.left), subst_only(t.right))
        return t

    return Rule(
        head=ground_atom(rule.head),
        pos=tuple(ground_atom(a) for a in rule.pos),
        neg=tuple(ground_atom(a) for a in rule.neg),
        builtins=tuple(Builtin(b.op, subst_only(b.left), subst_only(b.right)) for b in rule.builtins),
        index=rule.index,
        component=rule.component,
    )


@dataclass
class ShowFilter:
    """Output filtering from ``#hide.`` / ``#show p/n.``; no semantic effect."""

    active: bool = False
    shown: set = field(default_factory=set)

    def keep(self, atom) -> bool:
        if not self.active:
            return True
        return (atom[0], len(atom[1])) in self.shown


@dataclass
class Program:
    rules: List[Rule] = field(default_factory=list)
    constraints: List[Rule] = field(default_factory=list)
    arities: Dict[str, int] = field(default_factory=dict)
    functors: Dict[str, int] = field(default_factory=dict)
    show: ShowFilter = field(default_factory=ShowFilter)

    def all_rules(self) -> List[Rule]:
        return sorted(self.rules + self.constraints, key=lambda r: r.index)

    def predicates(self) -> List[str]:
        return list(self.arities)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.all_rules())


def _register(table: Dict[str, int], name: str, arity: int, what: str) -> None:
    known = table.get(name)
    if known is None:
        table[name] = arity
    elif known != arity:
        raise ArityConflict(f"{what} {name} used with arities {known} and {arity}")


def _register_functors(t, functors: Dict[str, int]) -> None:
    if isinstance(t, tuple):
        _register(functors, t[0], len(t) - 1, "functor")
        for a in t[1:]:
            _register_functors(a, functors)
    elif isinstance(t, Func):
        _register(functors, t.name, len(t.args), "functor")
        for a in t.args:
            _register_functors(a, functors)
    elif isinstance(t, BinOp):
        _register_functors(t.left, functors)
        _register_functors(t.right, functors)


def make_program(rules: Iterable[Rule], show: Optional[ShowFilter] = None, check: bool = True) -> Program:
    """Index rules in order, split off constraints, fill arity tables, check safety."""
    prog = Program(show=show or ShowFilter())
    for i, r in enumerate(rules):
        r.index = i
        atoms = list(r.pos) + list(r.neg)
        if not r.is_constraint:
            atoms.append(r.head)
        for a in atoms:
            if a.is_bottom:
                raise SafetyError(f"#false may only head a constraint (rule {r})")
            _register(prog.arities, a.pred, a.arity, "predicate")
            for t in a.args:
                _register_functors(t, prog.functors)
        for b in r.builtins:
            _register_functors(b.left, prog.functors)
            _register_functors(b.right, prog.functors)
        if check:
            violation = check_safety(r)
            if violation is not None:
                raise SafetyError(f"{violation} of rule {r}")
        (prog.constraints if r.is_constraint else prog.rules).append(r)
    return prog


def classical_name(pred: str) -> str:
    return "-" + pred


def rewrite_strong_negation(rules: List[Rule], known_predicates: Iterable[str] = ()) -> List[Rule]:
    """Add ``:- p(V..), -p(V..)`` for every predicate used both plainly and classically negated.

    Classically negated atoms are already carried under the fresh predicate
    name ``-p`` by the parser.
    """
    arity: Dict[str, int] = {}
    for r in rules:
        for a in list(r.pos) + list(r.neg) + ([] if r.is_constraint else [r.head]):
            arity.setdefault(a.pred, a.arity)
    negated = [p for p in arity if p.startswith("-")]
    known = set(known_predicates)
    out = list(rules)
    for neg in negated:
        base = neg[1:]
        if neg in known:
            raise ModelError(f"predicate name {neg} already in use")
        if base not in arity:
            continue
        if arity[base] != arity[neg]:
            raise ArityConflict(f"{base} and {neg} have different arities")
        vs = tuple(Var(f"V{i}") for i in range(arity[base]))
        out.append(Rule(BOTTOM_ATOM, (Atom(base, vs), Atom(neg, vs))))
    return out


def iter_subterms(t) -> Iterator:
    yield t
    if isinstance(t, tuple):
        for a in t[1:]:
            yield from iter_subterms(a)
