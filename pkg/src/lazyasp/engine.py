"""Forward-chaining search with lazy grounding and must-be-true atoms.

Components of the predicate dependency graph are solved in order.  Inside a
component the search alternates propagation (fire every weakly supported,
unblocked instance) and choice (pick an applicable instance whose negative
body mentions an unsolved predicate of the component).  The left branch of a
choice commits the negative body to OUT, the right branch blocks the
instance, either by a must-be-true atom or by a branch-local constraint.
"""
from __future__ import annotations

import heapq
from types import SimpleNamespace
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .core import BOTTOM_ATOM, DEFAULT_LIMITS, Atom, Limits, Program, Rule, atom_str
from .depgraph import ComponentOrder, assign_components
from .matcher import CHECK, CHO, PRO, CompiledRule, Instance, Matcher, SubstStore
from .state import IN, MBT, MBT_FAILURE, OUT, PartialInterpretation, PredTable

PROPAGATION, CHOICE, MBT_FIRE = "propagation", "choice", "mbt"


@dataclass
class SearchConfig:
    num_answer_sets: int = 1  # 0 means all
    max_int: int = DEFAULT_LIMITS.max_int
    max_depth: int = DEFAULT_LIMITS.max_depth
    eager_conflict: bool = True
    dedupe: bool = True
    trace: bool = False
    support_check: bool = True  # prune states with an underivable MBT atom

    def __post_init__(self):
        if self.num_answer_sets < 0:
            raise ValueError("num_answer_sets must be >= 0")

    @property
    def limits(self) -> Limits:
        return Limits(self.max_int, self.max_depth)


@dataclass
class SearchStats:
    choice_points: int = 0
    fired_rules: int = 0
    skipped_candidates: int = 0
    conflicts: int = 0
    peak_atoms: int = 0
    answer_sets: int = 0
    duplicates: int = 0
    support_failures: int = 0

    def as_dict(self) -> Dict[str, int]:
        return dict(self.__dict__)


@dataclass
class AnswerSet:
    atoms: frozenset
    log: Tuple[Tuple[Instance, str], ...] = ()
    mbt_empty: bool = True

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        from .parser import format_answer_set

        return format_answer_set(self.atoms)


@dataclass
class _Frame:
    mark: int
    inst: Instance
    right: bool = False


class Engine:
    def __init__(self, program: Program, config: Optional[SearchConfig] = None, trace: Optional[Callable[[str], None]] = None):
        self.program = program
        self.config = config or SearchConfig()
        self.trace = trace if (trace is not None or not self.config.trace) else _stderr_trace
        self.order: ComponentOrder = assign_components(program)
        self.n = len(self.order)
        self.compiled: Dict[int, CompiledRule] = {r.index: CompiledRule(r) for r in program.all_rules()}
        self.pos_index: Dict[str, List[Tuple[CompiledRule, int]]] = {}
        self.neg_index: Dict[str, List[Tuple[CompiledRule, int]]] = {}
        self.no_pos: List[CompiledRule] = []
        self.cho_rules: List[List[CompiledRule]] = [[] for _ in range(self.n + 1)]
        self.check_rules: List[CompiledRule] = []
        of = self.order.of_pred
        for cr in self.compiled.values():
            r = cr.rule
            for i, a in enumerate(cr.pos):
                self.pos_index.setdefault(a.pred, []).append((cr, i))
            for j, a in enumerate(cr.neg):
                self.neg_index.setdefault(a.pred, []).append((cr, j))
            if not cr.pos:
                self.no_pos.append(cr)
            if not r.is_constraint and any(of[a.pred] == r.component for a in r.neg):
                self.cho_rules[r.component].append(cr)
            if r.is_constraint and r.neg:
                self.check_rules.append(cr)
        self.stats = SearchStats()

    # -- setup
    def _reset(self) -> None:
        self.state = PartialInterpretation(self.order.of_pred, self.trace)
        self.store = SubstStore(self.state)
        self.matcher = Matcher(self.state, self.config.limits)
        self.log: List[Tuple[Instance, str]] = []
        self.heap: list = []
        self.seq = 0
        self.overlay_index: Dict[tuple, List[tuple]] = {}
        self.overlay_pending: List[tuple] = []
        self.frames: List[_Frame] = []

    def _push(self, cr: CompiledRule, seed=None) -> None:
        r = cr.rule
        self.seq += 1
        heapq.heappush(self.heap, (0 if r.is_constraint else 1, r.component, self.seq, cr, seed))

    # -- propagation
    def _drain_events(self) -> None:
        events = self.state.events
        current = self.state.current
        while events:
            kind, pred, args = events.popleft()
            if kind == "out":
                for cr, j in self.neg_index.get(pred, ()):
                    if cr.rule.component >= current:
                        self._push(cr, ("neg", j, args))
                for c in self.overlay_index.get((pred, args), ()):
                    self.overlay_pending.append(c)
            else:
                for cr, i in self.pos_index.get(pred, ()):
                    if cr.rule.component >= current:
                        self._push(cr, ("pos", i, args))

    def _exclude_pro(self, cr: CompiledRule, key: tuple) -> bool:
        return self.store.fired_as(cr.rule, key) == "in"

    def _overlay_violated(self, c: tuple) -> bool:
        truth = self.state.truth_of
        return all(truth(a) == OUT for a in c)

    def propagate(self) -> bool:
        """Fire admissible instances until quiescence; ``False`` on conflict."""
        flagged = False
        eager = self.config.eager_conflict
        while True:
            self._drain_events()
            while self.overlay_pending:
                c = self.overlay_pending.pop()
                if self._overlay_violated(c):
                    self.stats.conflicts += 1
                    self._emit_trace(f"conflict on blocking constraint {_constraint_str(c)}")
                    if eager:
                        self.overlay_pending.clear()
                        return False
                    flagged = True
            if not self.heap:
                break
            _, _, _, cr, seed = heapq.heappop(self.heap)
            if cr.rule.component < self.state.current:
                continue
            instances = self.matcher.matches(cr, PRO, seed, self._exclude_pro)
            for inst in instances:
                if not self.fire(inst):
                    if eager:
                        self.heap.clear()
                        self.state.events.clear()
                        return False
                    flagged = True
        return not flagged

    def fire(self, inst: Instance) -> bool:
        """Fire one PRO instance; the head goes to MBT if it is only weakly supported."""
        store, state = self.store, self.state
        previous = store.fired_as(inst.rule, inst.key)
        if previous == "in":
            return True
        weak = any(state.truth_of(a) == MBT for a in inst.pos)
        if previous == "mbt" and weak:
            return True
        if inst.rule.is_constraint:
            self.stats.conflicts += 1
            self._emit_trace(f"conflict on {inst}")
            return False
        self.stats.fired_rules += 1
        if weak:
            store.record_fired(inst.rule, inst.key, "mbt")
            self._append_log(inst, MBT_FIRE)
            ok = state.assert_mbt(inst.head)
        else:
            store.record_fired(inst.rule, inst.key, "in")
            self._append_log(inst, PROPAGATION)
            ok = state.assert_in(inst.head)
        if not ok:
            self.stats.conflicts += 1
            self._emit_trace(f"conflict on {atom_str(inst.head)}")
        return ok

    def _append_log(self, inst: Instance, kind: str) -> None:
        self.log.append((inst, kind))
        self.state.push_undo(self.log.pop)

    # -- support
    def supportable(self) -> bool:
        """Can every MBT atom still be derived?

        Computes the atoms derivable from IN with rules whose negative body
        is neither IN nor MBT and whose head is not OUT.  Any answer set
        extending the current state is contained in that set, so an MBT atom
        outside it means the branch is dead.
        """
        state = self.state
        current = state.current
        pending = {(p, a) for p, t in state.tables.items() if t.n_mbt for a, s in t.status.items() if s == MBT}
        if not pending:
            return True
        tables = {}
        for p, t in state.tables.items():
            if p in state.solved:
                tables[p] = t
                continue
            view = PredTable()
            for args in t.true_list:
                if t.status[args] == IN:
                    view.status[args] = IN
                    view.add_true(args)
            tables[p] = view
        matcher = Matcher(SimpleNamespace(tables=tables, truth_of=state.truth_of), self.config.limits)
        rules = [cr for cr in self.compiled.values() if not cr.rule.is_constraint and cr.rule.component >= current]
        queue: List[tuple] = []

        def add(instances) -> bool:
            for inst in instances:
                pred, args = inst.head
                view = tables.get(pred)
                if view is None:
                    view = tables[pred] = PredTable()
                if args in view.status or state.truth_of(inst.head) == OUT:
                    continue
                view.status[args] = IN
                view.add_true(args)
                queue.append(inst.head)
                pending.discard(inst.head)
                if not pending:
                    return True
            return False

        for cr in rules:
            if add(matcher.matches(cr, CHO)):
                return True
        while queue:
            pred, args = queue.pop()
            for cr, i in self.pos_index.get(pred, ()):
                if cr.rule.is_constraint or cr.rule.component < current:
                    continue
                if add(matcher.matches(cr, CHO, ("pos", i, args))):
                    return True
        self.stats.support_failures += 1
        self._emit_trace(f"underivable must-be-true atom {atom_str(next(iter(pending)))}")
        return False

    # -- choice
    def choose(self) -> Optional[Instance]:
        current = self.state.current
        if current >= self.n:
            return None
        contains = self.store.contains
        exclude = lambda c, k: contains(c.rule, k)  # noqa: E731
        for cr in self.cho_rules[current]:
            inst = self.matcher.first(cr, CHO, exclude)
            if inst is not None:
                return inst
        return None

    def _left(self, inst: Instance) -> bool:
        self.store.record_chosen(inst.rule, inst.key)
        mark = self.state.checkpoint()
        self.frames.append(_Frame(mark, inst))
        self.stats.choice_points += 1
        self._emit_trace(f"choose {inst}")
        for a in inst.neg:
            if not self.state.assert_out(a):
                self.stats.conflicts += 1
                self._emit_trace(f"conflict on {atom_str(a)}")
                return False
        self.store.record_fired(inst.rule, inst.key, "in")
        self._append_log(inst, CHOICE)
        if not self.state.assert_in(inst.head):
            self.stats.conflicts += 1
            self._emit_trace(f"conflict on {atom_str(inst.head)}")
            return False
        return self.propagate()

    def block(self, inst: Instance) -> bool:
        """Make sure ``inst`` never fires in this subtree."""
        of, current = self.order.of_pred, self.state.current
        atoms = tuple(a for a in inst.neg if of[a[0]] == current)
        assert atoms, "a choice always has a negative literal of the current component"
        self._emit_trace(f"block {inst}")
        if len(atoms) == 1:
            if not self.state.assert_mbt(atoms[0]):
                return False
            return self.propagate()
        self.state.add_overlay(_constraint_rule(atoms))
        for a in atoms:
            bucket = self.overlay_index.setdefault(a, [])
            bucket.append(atoms)
            self.state.push_undo(bucket.pop)
        self.overlay_pending.append(atoms)
        return self.propagate()

    # -- components
    def _solve_component(self) -> bool:
        state = self.state
        comp = state.current
        fresh = state.mark_component_solved(self.order.components[comp])
        if fresh == MBT_FAILURE:
            self._emit_trace("unproved must-be-true atom")
            return False
        state.set_current(comp + 1)
        seen = set()
        for p in fresh:
            for cr, _ in self.neg_index.get(p, ()):
                if cr.rule.index not in seen and cr.rule.component > comp:
                    seen.add(cr.rule.index)
                    self._push(cr)
            for c in state.overlay:
                if any(a.pred == p for a in c.neg):
                    self.overlay_pending.append(tuple((a.pred, a.args) for a in c.neg))
        return self.propagate()

    def check_constraints(self) -> bool:
        """Final test of the constraints with negative literals; ``True`` if none applies."""
        for cr in self.check_rules:
            inst = self.matcher.first(cr, CHECK)
            if inst is not None:
                self._emit_trace(f"check failed on {inst}")
                return False
        truth = self.state.truth_of
        for c in self.state.overlay:
            if all(truth((a.pred, a.args)) != IN for a in c.neg):
                return False
        return True

    # -- search
    def solve(self) -> Iterator[AnswerSet]:
        self._reset()
        k = self.config.num_answer_sets
        seen = set()
        state = self.state
        for cr in self.no_pos:
            self._push(cr)
        status = self.propagate()
        while True:
            if status and self.config.support_check and state.n_mbt and not self.supportable():
                status = False
            if status:
                inst = self.choose()
                if inst is not None:
                    status = self._left(inst)
                    continue
                if state.current < self.n:
                    status = self._solve_component()
                    continue
                if self.check_constraints():
                    atoms = state.true_atoms()
                    if self.config.dedupe and atoms in seen:
                        self.stats.duplicates += 1
                    else:
                        seen.add(atoms)
                        self.stats.answer_sets += 1
                        self._emit_trace("answer set")
                        self._sync_stats()
                        yield AnswerSet(atoms, tuple(self.log), state.n_mbt == 0)
                        if k and self.stats.answer_sets >= k:
                            break
                status = False
                continue
            while self.frames and self.frames[-1].right:
                self.frames.pop()
            if not self.frames:
                break
            frame = self.frames[-1]
            self._emit_trace("backtrack")
            state.rollback(frame.mark)
            self.heap.clear()
            self.overlay_pending.clear()
            frame.right = True
            status = self.block(frame.inst)
        self._sync_stats()

    def _sync_stats(self) -> None:
        self.stats.skipped_candidates = self.matcher.skipped
        self.stats.peak_atoms = self.state.peak_atoms

    def _emit_trace(self, line: str) -> None:
        if self.trace is not None:
            self.trace(line)


def _constraint_rule(atoms) -> Rule:
    return Rule(BOTTOM_ATOM, neg=tuple(Atom(p, args) for p, args in atoms))


def _constraint_str(atoms) -> str:
    return str(_constraint_rule(atoms))


def _stderr_trace(line: str) -> None:
    import sys

    print(line, file=sys.stderr)


def solve(program: Program, config: Optional[SearchConfig] = None, **kwargs) -> List[AnswerSet]:
    """Convenience wrapper returning the answer sets as a list."""
    if config is None:
        config = SearchConfig(**kwargs)
    return list(Engine(program, config).solve())
