"""Predicate dependency graph, its strongly connected components and their order."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from .core import Program, Rule


@dataclass
class ComponentOrder:
    """Components listed dependencies first; constraints sit after the last one."""

    components: List[List[str]] = field(default_factory=list)
    of_pred: Dict[str, int] = field(default_factory=dict)

    @property
    def constraint_component(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)


def dependency_arcs(program: Program) -> Dict[str, Set[str]]:
    """Arcs from each head predicate to every predicate in its body."""
    arcs: Dict[str, Set[str]] = {p: set() for p in program.arities}
    for r in program.rules:
        for a in r.pos + r.neg:
            arcs[r.head.pred].add(a.pred)
    return arcs


def first_occurrence(program: Program) -> Dict[str, int]:
    first: Dict[str, int] = {}
    for r in program.all_rules():
        atoms = ([] if r.is_constraint else [r.head]) + list(r.pos) + list(r.neg)
        for a in atoms:
            first.setdefault(a.pred, r.index)
    return first


def dependency_graph(program: Program) -> nx.DiGraph:
    """Directed graph with an arc from each head predicate to its body predicates."""
    g = nx.DiGraph()
    for p, succs in dependency_arcs(program).items():
        g.add_node(p)
        for q in succs:
            g.add_edge(p, q)
    return g


def component_order(program: Program) -> ComponentOrder:
    """Topological order of the SCCs, dependencies first.

    Among independent components the one whose predicate appears earliest in
    the program comes first.
    """
    first = first_occurrence(program)
    big = 1 << 60
    # reversed arcs: a component becomes available once its dependencies are placed
    g = dependency_graph(program).reverse(copy=False)
    cond = nx.condensation(g)
    members = nx.get_node_attributes(cond, "members")
    key = {c: min(first.get(p, big) for p in ps) for c, ps in members.items()}
    ordered = [
        sorted(members[c], key=lambda p: (first.get(p, big), p))
        for c in nx.lexicographical_topological_sort(cond, key=lambda c: (key[c], c))
    ]
    return ComponentOrder(ordered, {p: i for i, comp in enumerate(ordered) for p in comp})


def assign_components(program: Program, order: Optional[ComponentOrder] = None) -> ComponentOrder:
    """Set ``rule.component`` to the component of its head (constraints: after the last)."""
    if order is None:
        order = component_order(program)
    for r in program.rules:
        r.component = order.of_pred[r.head.pred]
    for r in program.constraints:
        r.component = order.constraint_component
    return order


def is_stratified(program: Program, order: Optional[ComponentOrder] = None) -> Tuple[bool, Optional[Rule]]:
    """No rule negates a predicate of its own component."""
    if order is None:
        order = component_order(program)
    for r in program.rules:
        c = order.of_pred[r.head.pred]
        for a in r.neg:
            if order.of_pred[a.pred] == c:
                return False, r
    return True, None


def format_components(order: ComponentOrder) -> str:
    lines = [f"{i + 1}: {' '.join(comp)}" for i, comp in enumerate(order.components)]
    lines.append(f"{order.constraint_component + 1}: #constraints")
    return "\n".join(lines)
