"""Partial interpretation IN / MBT / OUT with a trail for exact backtracking."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, Iterable, List, Optional, Tuple

from .core import BOTTOM_NAME, atom_str

UNDEFINED, IN, MBT, OUT = 0, 1, 2, 3
TRUTH_NAMES = {UNDEFINED: "UNDEFINED", IN: "IN", MBT: "MBT", OUT: "OUT"}

OK = True
CONFLICT = False

MBT_FAILURE = "mbt-failure"


@dataclass
class PredTable:
    """Extension of one predicate: status per argument tuple, plus true-atom indexes."""

    status: Dict[tuple, int] = field(default_factory=dict)
    true_list: List[tuple] = field(default_factory=list)  # IN and MBT, insertion order
    by_first: Dict[object, List[tuple]] = field(default_factory=dict)
    n_mbt: int = 0

    def add_true(self, args: tuple) -> None:
        self.true_list.append(args)
        if args:
            self.by_first.setdefault(args[0], []).append(args)

    def pop_true(self, args: tuple) -> None:
        # trail order guarantees the atom being removed is the latest one
        assert self.true_list[-1] == args
        self.true_list.pop()
        if args:
            bucket = self.by_first[args[0]]
            bucket.pop()
            if not bucket:
                del self.by_first[args[0]]


class PartialInterpretation:
    """Search state shared by matcher and engine.

    Every mutation pushes an undo closure onto ``trail``; ``rollback`` pops
    them back to a mark.  Newly asserted atoms are appended to ``events`` as
    ``(kind, pred, args)`` with kind ``pos`` (now IN or MBT), ``promote``
    (MBT became IN) or ``out``; the engine drains that queue.
    """

    def __init__(self, comp_of: Optional[Dict[str, int]] = None, trace: Optional[Callable[[str], None]] = None):
        self.tables: Dict[str, PredTable] = {}
        self.solved: set = set()
        self.comp_of = dict(comp_of or {})
        self.current = 0
        self.trail: List[Callable[[], None]] = []
        self.events: Deque[Tuple[str, str, tuple]] = deque()
        self.n_mbt = 0
        self.n_atoms = 0
        self.peak_atoms = 0
        self.overlay: list = []  # branch-local constraints added by rule blocking
        self.trace = trace

    # -- trail
    def checkpoint(self) -> int:
        return len(self.trail)

    def rollback(self, mark: int) -> None:
        assert mark <= len(self.trail), "stale checkpoint"
        trail = self.trail
        while len(trail) > mark:
            trail.pop()()
        self.events.clear()

    def push_undo(self, undo: Callable[[], None]) -> None:
        self.trail.append(undo)

    def set_current(self, component: int) -> None:
        old = self.current
        self.current = component
        self.trail.append(lambda: setattr(self, "current", old))

    def add_overlay(self, constraint) -> None:
        self.overlay.append(constraint)
        self.trail.append(self.overlay.pop)
        if self.trace is not None:
            self.trace(f"block {constraint}")

    # -- queries
    def table(self, pred: str) -> PredTable:
        t = self.tables.get(pred)
        if t is None:
            t = self.tables[pred] = PredTable()
        return t

    def truth_of(self, atom) -> int:
        pred, args = atom
        if pred == BOTTOM_NAME:
            return OUT
        t = self.tables.get(pred)
        s = t.status.get(args, UNDEFINED) if t is not None else UNDEFINED
        if s == UNDEFINED and pred in self.solved:
            return OUT
        return s

    def atoms(self, which: int = IN) -> List[tuple]:
        return [(p, a) for p, t in self.tables.items() for a, s in t.status.items() if s == which]

    def true_atoms(self) -> frozenset:
        return frozenset((p, a) for p, t in self.tables.items() for a, s in t.status.items() if s == IN)

    def snapshot(self):
        """Hashable image of the whole interpretation, for tests."""
        tables = tuple(
            sorted(
                (p, tuple(sorted(t.status.items(), key=repr)), tuple(t.true_list), t.n_mbt)
                for p, t in self.tables.items()
                if t.status
            )
        )
        return tables, tuple(sorted(self.solved)), self.current, self.n_mbt, tuple(map(str, self.overlay))

    # -- mutations
    def _set(self, t: PredTable, pred: str, args: tuple, status: int) -> None:
        t.status[args] = status
        if status != OUT:
            t.add_true(args)
            if status == MBT:
                t.n_mbt += 1
                self.n_mbt += 1
        self.n_atoms += 1
        if self.n_atoms > self.peak_atoms:
            self.peak_atoms = self.n_atoms

        def undo():
            del t.status[args]
            if status != OUT:
                t.pop_true(args)
                if status == MBT:
                    t.n_mbt -= 1
                    self.n_mbt -= 1
            self.n_atoms -= 1

        self.trail.append(undo)

    def _log(self, what: str, pred: str, args: tuple) -> None:
        if self.trace is not None:
            self.trace(f"{what} {atom_str((pred, args))}")

    def assert_in(self, atom) -> bool:
        pred, args = atom
        if pred == BOTTOM_NAME:
            return CONFLICT
        t = self.table(pred)
        s = t.status.get(args, UNDEFINED)
        if s == IN:
            return OK
        if s == OUT or (s == UNDEFINED and pred in self.solved):
            return CONFLICT
        if s == MBT:
            t.status[args] = IN
            t.n_mbt -= 1
            self.n_mbt -= 1

            def undo():
                t.status[args] = MBT
                t.n_mbt += 1
                self.n_mbt += 1

            self.trail.append(undo)
            self.events.append(("promote", pred, args))
            self._log("promote", pred, args)
            return OK
        self._set(t, pred, args, IN)
        self.events.append(("pos", pred, args))
        self._log("in", pred, args)
        return OK

    def assert_mbt(self, atom) -> bool:
        pred, args = atom
        if pred == BOTTOM_NAME:
            return CONFLICT
        t = self.table(pred)
        s = t.status.get(args, UNDEFINED)
        if s in (IN, MBT):
            return OK
        if s == OUT or pred in self.solved:
            return CONFLICT
        self._set(t, pred, args, MBT)
        self.events.append(("pos", pred, args))
        self._log("mbt", pred, args)
        return OK

    def assert_out(self, atom) -> bool:
        pred, args = atom
        if pred == BOTTOM_NAME:
            return OK
        t = self.table(pred)
        s = t.status.get(args, UNDEFINED)
        if s == OUT:
            return OK
        if s in (IN, MBT):
            return CONFLICT
        if pred in self.solved:
            return OK  # already implicitly false
        self._set(t, pred, args, OUT)
        self.events.append(("out", pred, args))
        self._log("out", pred, args)
        return OK

    def mark_component_solved(self, component: Iterable[str]):
        """Mark predicates solved; ``MBT_FAILURE`` if one of them still has an MBT atom."""
        preds = list(component)
        for p in preds:
            t = self.tables.get(p)
            if t is not None and t.n_mbt:
                return MBT_FAILURE
        fresh = [p for p in preds if p not in self.solved]
        if fresh:
            self.solved.update(fresh)
            self.trail.append(lambda: self.solved.difference_update(fresh))
        if self.trace is not None:
            self.trace(f"solved {' '.join(preds)}")
        return fresh

    def disjoint(self) -> bool:
        """IN, MBT and OUT are pairwise disjoint and the indexes agree with the tables."""
        for t in self.tables.values():
            trues = [a for a, s in t.status.items() if s in (IN, MBT)]
            if sorted(map(repr, trues)) != sorted(map(repr, t.true_list)):
                return False
            if t.n_mbt != sum(1 for s in t.status.values() if s == MBT):
                return False
        return True
