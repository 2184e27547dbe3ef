"""Backtracking instantiation of first-order rules against the current state.

A rule is matched literal by literal: positive literals against the stored
extensions (never against the Herbrand universe), built-ins as soon as their
variables are bound, negative literals last.  Three admissibility modes:

* ``PRO``   positive atoms IN or MBT, negative atoms OUT (explicitly or implicitly),
* ``CHO``   positive atoms IN, negative atoms neither IN nor MBT,
* ``CHECK`` positive atoms IN, negative atoms not IN.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .core import (
    DEFAULT_LIMITS,
    ArithmeticTypeError,
    Atom,
    BoundExceeded,
    Builtin,
    Func,
    Limits,
    Rule,
    Var,
    binding_vars,
    compare,
    ground_term,
    has_arith,
    iter_subterms,
    term_vars,
)
from .state import IN, MBT, OUT, UNDEFINED, PartialInterpretation

PRO, CHO, CHECK = "PRO", "CHO", "CHECK"
MODES = (PRO, CHO, CHECK)

_POS_OK = {PRO: (IN, MBT), CHO: (IN,), CHECK: (IN,)}


def _neg_ok(mode: str, truth: int) -> bool:
    if mode == PRO:
        return truth == OUT
    if mode == CHO:
        return truth != IN and truth != MBT
    return truth != IN


@dataclass
class Instance:
    """A ground instance of a rule found by the matcher."""

    rule: Rule
    key: tuple
    head: tuple
    pos: Tuple[tuple, ...]
    neg: Tuple[tuple, ...]

    @property
    def is_constraint(self) -> bool:
        return self.rule.is_constraint

    def theta(self, compiled: "CompiledRule") -> Dict[str, object]:
        return dict(zip(compiled.var_order, self.key))

    def __str__(self) -> str:
        from .core import atom_str

        body = [atom_str(a) for a in self.pos] + [f"not {atom_str(a)}" for a in self.neg]
        head = "" if self.rule.is_constraint else atom_str(self.head)
        return f"{head} :- {', '.join(body)}." if body else f"{head}."


# plan steps are tuples: (kind, index) with kind in seed | pos | builtin | neg | negseed
_SEED, _POS, _BUILTIN, _NEG, _NEGSEED = range(5)


class CompiledRule:
    """Rule prepared for matching: arithmetic pulled out of positive atoms, plans cached."""

    def __init__(self, rule: Rule):
        self.rule = rule
        self.var_order = tuple(rule.vars())
        builtins = list(rule.builtins)
        pos = []
        hidden = itertools.count()
        for a in rule.pos:
            args = []
            for t in a.args:
                if has_arith(t):
                    h = Var(f"#h{next(hidden)}")
                    builtins.append(Builtin("=", h, t))
                    args.append(h)
                else:
                    args.append(t)
            pos.append(Atom(a.pred, tuple(args)))
        self.pos: List[Atom] = pos
        self.neg: List[Atom] = list(rule.neg)
        self.builtins: List[Builtin] = builtins
        self._assigns = [b.assignable() for b in builtins]
        # (var, expr, variables of expr) for runtime assignment
        self.assigns = [tuple((v, e, tuple(term_vars(e))) for v, e in a) for a in self._assigns]
        self.neg_simple = [not any(has_arith(t) for t in a.args) for a in self.neg]
        self._bvars = [set(b.vars()) for b in builtins]
        self._plans: Dict[tuple, tuple] = {}

    def plan(self, seed: Optional[Tuple[str, int]] = None) -> tuple:
        """Step order for a full match or one seeded by a positive/negative literal."""
        cached = self._plans.get(seed)
        if cached is not None:
            return cached
        steps: List[tuple] = []
        bound: set = set()
        placed = [False] * len(self.builtins)
        skip_pos = None
        if seed is not None and seed[0] == "pos":
            skip_pos = seed[1]
            steps.append((_SEED, skip_pos))
            bound.update(binding_vars(self.pos[skip_pos]))
        elif seed is not None:
            bound.update(_seedable_vars(self.neg[seed[1]]))

        def place_builtins():
            changed = True
            while changed:
                changed = False
                for k, b in enumerate(self.builtins):
                    if placed[k]:
                        continue
                    if self._bvars[k] <= bound:
                        placed[k] = True
                    else:
                        for var, expr in self._assigns[k]:
                            if var not in bound and set(term_vars(expr)) <= bound:
                                bound.add(var)
                                placed[k] = True
                                break
                    if placed[k]:
                        steps.append((_BUILTIN, k))
                        changed = True

        place_builtins()
        for i, a in enumerate(self.pos):
            if i == skip_pos:
                continue
            steps.append((_POS, i))
            bound.update(binding_vars(a))
            place_builtins()
        if not all(placed):
            raise ValueError(f"cannot order built-ins of unsafe rule {self.rule}")
        for j in range(len(self.neg)):
            steps.append((_NEG, j))
        if seed is not None and seed[0] == "neg":
            steps.append((_NEGSEED, seed[1]))
        result = tuple(steps)
        self._plans[seed] = result
        return result


def _seedable_vars(atom: Atom) -> set:
    out = set()
    for t in atom.args:
        if not has_arith(t):
            out.update(term_vars(t))
    return out


def _unify(pattern, value, theta: dict, newly: list) -> bool:
    if isinstance(pattern, Var):
        name = pattern.name
        if name in theta:
            return theta[name] == value
        theta[name] = value
        newly.append(name)
        return True
    if isinstance(pattern, Func):
        if type(value) is not tuple or value[0] != pattern.name or len(value) != len(pattern.args) + 1:
            return False
        for p, v in zip(pattern.args, value[1:]):
            if not _unify(p, v, theta, newly):
                return False
        return True
    return pattern == value and type(pattern) is type(value)


def _try_ground(t, theta: dict):
    """Value of an arithmetic-free term if all its variables are bound, else ``_UNBOUND``."""
    if isinstance(t, Var):
        return theta.get(t.name, _UNBOUND)
    if isinstance(t, Func):
        vals = []
        for a in t.args:
            v = _try_ground(a, theta)
            if v is _UNBOUND:
                return _UNBOUND
            vals.append(v)
        return (t.name, *vals)
    return t


_UNBOUND = object()


class Matcher:
    """Enumerates admissible ground instances of compiled rules over a state."""

    def __init__(self, state: PartialInterpretation, limits: Limits = DEFAULT_LIMITS):
        self.state = state
        self.limits = limits
        self.skipped = 0  # candidates dropped because a term broke the bounds

    def matches(
        self,
        cr: CompiledRule,
        mode: str,
        seed: Optional[Tuple[str, int, tuple]] = None,
        exclude: Optional[Callable[[CompiledRule, tuple], bool]] = None,
        limit: int = 0,
    ) -> List[Instance]:
        """Every admissible instance (at most ``limit`` if non-zero).

        ``seed`` is ``(pos|neg, literal index, ground args)`` and restricts
        the result to instances containing that literal.
        """
        plan = cr.plan(None if seed is None else (seed[0], seed[1]))
        theta: dict = {}
        if seed is not None and seed[0] == "neg":
            pattern = cr.neg[seed[1]]
            if len(pattern.args) != len(seed[2]):
                return []
            newly: list = []
            for p, v in zip(pattern.args, seed[2]):
                if not has_arith(p) and not _unify(p, v, theta, newly):
                    return []
        job = _Job(self, cr, plan, mode, seed, exclude, limit)
        job.run(0, theta)
        return job.out

    def first(self, cr: CompiledRule, mode: str, exclude=None) -> Optional[Instance]:
        found = self.matches(cr, mode, exclude=exclude, limit=1)
        return found[0] if found else None


class _Job:
    """One matching run; ``run`` returns True once enough instances were found."""

    __slots__ = ("m", "cr", "plan", "n", "mode", "seed", "exclude", "limit", "out", "pos_ground", "neg_ground", "pos_ok", "tables", "truth_of")

    def __init__(self, m: Matcher, cr: CompiledRule, plan, mode, seed, exclude, limit):
        self.m = m
        self.cr = cr
        self.plan = plan
        self.n = len(plan)
        self.mode = mode
        self.seed = seed
        self.exclude = exclude
        self.limit = limit
        self.out: List[Instance] = []
        self.pos_ground: list = [None] * len(cr.pos)
        self.neg_ground: list = [None] * len(cr.neg)
        self.pos_ok = _POS_OK[mode]
        self.tables = m.state.tables
        self.truth_of = m.state.truth_of

    def run(self, k: int, theta: dict) -> bool:
        if k == self.n:
            return self.finish(theta)
        kind, idx = self.plan[k]
        cr = self.cr
        if kind == _POS or kind == _SEED:
            pattern = cr.pos[idx]
            pargs = pattern.args
            t = self.tables.get(pattern.pred)
            if t is None:
                return False
            ok = self.pos_ok
            status = t.status
            if kind == _SEED:
                args = self.seed[2]
                if len(args) != len(pargs) or status.get(args, UNDEFINED) not in ok:
                    return False
                candidates = (args,)
            else:
                values = [_try_ground(a, theta) for a in pargs]
                if _UNBOUND not in values:
                    args = tuple(values)
                    if status.get(args, UNDEFINED) not in ok:
                        return False
                    self.pos_ground[idx] = (pattern.pred, args)
                    return self.run(k + 1, theta)
                if values and values[0] is not _UNBOUND:
                    candidates = t.by_first.get(values[0], ())
                else:
                    candidates = t.true_list
            for c in range(len(candidates)):
                args = candidates[c]
                if status[args] not in ok:
                    continue
                newly: list = []
                matched = True
                for p, v in zip(pargs, args):
                    if not _unify(p, v, theta, newly):
                        matched = False
                        break
                stop = False
                if matched:
                    self.pos_ground[idx] = (pattern.pred, args)
                    stop = self.run(k + 1, theta)
                for name in newly:
                    del theta[name]
                if stop:
                    return True
            return False
        if kind == _BUILTIN:
            limits = self.m.limits
            for var, expr, evars in cr.assigns[idx]:
                if var not in theta and all(v in theta for v in evars):
                    try:
                        value = ground_term(expr, theta, limits)
                    except BoundExceeded:
                        self.m.skipped += 1
                        return False
                    except ArithmeticTypeError:
                        return False
                    theta[var] = value
                    stop = self.run(k + 1, theta)
                    del theta[var]
                    return stop
            b = cr.builtins[idx]
            try:
                holds = compare(b.op, ground_term(b.left, theta, limits), ground_term(b.right, theta, limits))
            except BoundExceeded:
                self.m.skipped += 1
                return False
            except ArithmeticTypeError:
                return False
            return holds and self.run(k + 1, theta)
        if kind == _NEG:
            a = cr.neg[idx]
            if cr.neg_simple[idx]:
                atom = (a.pred, tuple(_try_ground(t, theta) for t in a.args))
            else:
                try:
                    atom = a.ground(theta, self.m.limits)
                except BoundExceeded:
                    self.m.skipped += 1
                    return False
                except ArithmeticTypeError:
                    return False
            if not _neg_ok(self.mode, self.truth_of(atom)):
                return False
            self.neg_ground[idx] = atom
            return self.run(k + 1, theta)
        # _NEGSEED: the instance must contain the seeding atom negatively
        if self.neg_ground[idx][1] != self.seed[2]:
            return False
        return self.run(k + 1, theta)

    def finish(self, theta: dict) -> bool:
        cr = self.cr
        key = tuple(theta[v] for v in cr.var_order)
        if self.exclude is not None and self.exclude(cr, key):
            return False
        try:
            head = cr.rule.head.ground(theta, self.m.limits)
        except BoundExceeded:
            self.m.skipped += 1
            return False
        except ArithmeticTypeError:
            return False
        self.out.append(Instance(cr.rule, key, head, tuple(self.pos_ground), tuple(self.neg_ground)))
        return bool(self.limit) and len(self.out) >= self.limit


@dataclass
class SubstStore:
    """Substitutions already used, per rule index; trail-managed through the state.

    ``fired[r][key]`` is ``"in"`` or ``"mbt"`` (how the instance was propagated);
    ``chosen[r]`` holds instances already offered as choice points.
    """

    state: PartialInterpretation
    fired: Dict[int, Dict[tuple, str]] = field(default_factory=dict)
    chosen: Dict[int, set] = field(default_factory=dict)

    def fired_as(self, rule: Rule, key: tuple) -> Optional[str]:
        d = self.fired.get(rule.index)
        return None if d is None else d.get(key)

    def record_fired(self, rule: Rule, key: tuple, kind: str) -> None:
        d = self.fired.setdefault(rule.index, {})
        old = d.get(key)
        d[key] = kind
        if old is None:
            self.state.push_undo(lambda: d.__delitem__(key))
        else:
            self.state.push_undo(lambda: d.__setitem__(key, old))

    def was_chosen(self, rule: Rule, key: tuple) -> bool:
        s = self.chosen.get(rule.index)
        return s is not None and key in s

    def record_chosen(self, rule: Rule, key: tuple) -> None:
        s = self.chosen.setdefault(rule.index, set())
        s.add(key)
        self.state.push_undo(lambda: s.discard(key))

    def contains(self, rule: Rule, key: tuple) -> bool:
        return self.fired_as(rule, key) is not None or self.was_chosen(rule, key)


class Instantiator:
    """Resumable ``instantiate_rule``: each ``next()`` returns a fresh substitution or ``None``.

    The state must not change between calls.
    """

    def __init__(self, rule: Rule, mode: str, state: PartialInterpretation, store: Optional[SubstStore] = None, limits: Limits = DEFAULT_LIMITS):
        self.compiled = CompiledRule(rule)
        self.matcher = Matcher(state, limits)
        exclude = None
        if store is not None and mode != CHECK:
            exclude = lambda cr, key: store.contains(cr.rule, key)  # noqa: E731
        self._it = iter(self.matcher.matches(self.compiled, mode, exclude=exclude))

    def next(self) -> Optional[Dict[str, object]]:
        inst = next(self._it, None)
        return None if inst is None else inst.theta(self.compiled)


def instantiate_rule(rule: Rule, mode: str, state: PartialInterpretation, store: Optional[SubstStore] = None, limits: Limits = DEFAULT_LIMITS) -> Optional[Dict[str, object]]:
    return Instantiator(rule, mode, state, store, limits).next()


def exhaustive_instantiations(rule: Rule, mode: str, state: PartialInterpretation, limits: Limits = DEFAULT_LIMITS) -> set:
    """Brute force: try every binding of the positive-body variables over stored terms.

    Independent of the plan machinery above; used to test it.
    """
    universe = set()
    for t in state.tables.values():
        for args in t.status:
            for a in args:
                universe.update(iter_subterms(a))
    universe = sorted(universe, key=repr)
    free = []
    for a in rule.pos:
        for v in binding_vars(a):
            if v not in free:
                free.append(v)
    pos_ok = _POS_OK[mode]
    out = set()
    for values in itertools.product(universe, repeat=len(free)):
        theta = dict(zip(free, values))
        try:
            # close under V = expr assignments
            changed = True
            while changed:
                changed = False
                for b in rule.builtins:
                    for var, expr in b.assignable():
                        if var not in theta and all(v in theta for v in term_vars(expr)):
                            theta[var] = ground_term(expr, theta, limits)
                            changed = True
            if any(v not in theta for v in rule.vars()):
                continue
            if not all(state.truth_of(a.ground(theta, limits)) in pos_ok for a in rule.pos):
                continue
            if not all(compare(b.op, ground_term(b.left, theta, limits), ground_term(b.right, theta, limits)) for b in rule.builtins):
                continue
            if not all(_neg_ok(mode, state.truth_of(a.ground(theta, limits))) for a in rule.neg):
                continue
            rule.head.ground(theta, limits)
        except (BoundExceeded, ArithmeticTypeError):
            continue
        out.add(frozenset((v, theta[v]) for v in rule.vars()))
    return out
