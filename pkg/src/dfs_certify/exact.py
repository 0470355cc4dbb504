"""Exact validity checks, the sweep-line decider, local fixes and repair."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple

import numpy as np

from .graph import (
    ConflictingPair,
    DirectedUnsupported,
    EditableGraph,
    Edit,
    EdgeNotPresent,
    LabeledGraph,
    VertexOutOfRange,
    edit_difference,
    enumerate_conflicts,
    first_conflict,
)


class VertexIsOne(ValueError):
    pass


@dataclass(frozen=True)
class OrderViolation:
    """The tree walk from ``label`` in ``direction`` did not reach ``label ± 1``.

    ``observed`` is the label the walk produced (None for end of component).
    For an end-of-component answer on a forward walk, ``anchor`` is a larger
    label known to sit in the same tree, which a valid numbering forbids.
    """

    label: int
    direction: str
    observed: int | None
    anchor: int | None = None

    def __str__(self) -> str:
        got = "end" if self.observed is None else str(self.observed)
        return f"order {self.direction} from {self.label} reached {got}"


Witness = ConflictingPair | OrderViolation


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    witness: Witness | None = None
    source: str | None = None

    def __bool__(self) -> bool:
        return self.accepted

    @property
    def rejected(self) -> bool:
        return not self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accept"
        return f"reject {self.witness}" if self.witness is not None else "reject"


ACCEPT = Verdict(True)


def reject(witness: Witness, source: str | None = None) -> Verdict:
    return Verdict(False, witness, source)


# -- full checks ---------------------------------------------------------------


def check_by_conflicts(g: LabeledGraph) -> Verdict:
    """Accept iff no conflicting pair exists; otherwise report the first one."""
    c = first_conflict(g)
    return ACCEPT if c is None else reject(c, "conflicts")


def check_by_simulation(g: LabeledGraph) -> Verdict:
    """Replay discovery in label order while keeping the white path on a stack.

    Discovering ``k`` backtracks until ``p(k)`` is on top. Each vertex left
    behind must have no forward neighbor above ``k``, and ``p(k)`` must be on
    the path at all.
    """
    par = g.parents.tolist()
    top = g.max_up_neighbor.tolist()
    stack: list[int] = []
    for k in range(1, g.n + 1):
        target = par[k]
        if target:
            pos = bisect.bisect_left(stack, target)
            if pos == len(stack) or stack[pos] != target:
                # the path jumps over p(k): the first vertex above it conflicts
                x = stack[pos]
                return reject(ConflictingPair(x, target, k), "simulation")
        while stack and stack[-1] != target:
            u = stack.pop()
            if top[u] > k:
                return reject(ConflictingPair(k, u, top[u]), "simulation")
        stack.append(k)
    return ACCEPT


# -- exact tree order --------------------------------------------------------


class TreeOrder(NamedTuple):
    succ: np.ndarray  # pre-order successor within the tree, 0 at the end
    pred: np.ndarray  # pre-order predecessor within the tree, 0 at the root
    root: np.ndarray  # root label of each label's tree


def tree_order(g: LabeledGraph) -> TreeOrder:
    """Pre-order of the parent tree computed with full access (label space)."""
    n = g.n
    par = g.parents.tolist()
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for x in range(1, n + 1):
        children[par[x]].append(x)  # ascending by construction
    succ = np.zeros(n + 1, dtype=np.int64)
    pred = np.zeros(n + 1, dtype=np.int64)
    root = np.zeros(n + 1, dtype=np.int64)
    for r in children[0]:
        prev = 0
        stack = [r]
        while stack:
            x = stack.pop()
            root[x] = r
            pred[x] = prev
            if prev:
                succ[prev] = x
            prev = x
            stack.extend(reversed(children[x]))
    return TreeOrder(succ, pred, root)


def validate_witness(g: LabeledGraph, witness: Witness) -> bool:
    """Independently confirm that ``witness`` proves ``g`` invalid."""
    if isinstance(witness, ConflictingPair):
        try:
            from .graph import is_conflicting_pair

            return is_conflicting_pair(g, witness.v, (witness.u, witness.w))
        except EdgeNotPresent:
            return False
    order = tree_order(g)
    a = witness.label
    if not 1 <= a <= g.n:
        return False
    if witness.direction == "next":
        got = int(order.succ[a]) or None
        if got != witness.observed:
            return False
        if got is None:
            b = witness.anchor
            return b is not None and a < b <= g.n and order.root[a] == order.root[b]
        return got != a + 1
    if witness.direction == "prev":
        got = int(order.pred[a]) or None
        return got == witness.observed and got is not None and got != a - 1
    return False


# -- sweep line ----------------------------------------------------------------


class EventKind(IntEnum):
    END = 0
    START = 1


class IntervalKind(IntEnum):
    VERTEX = 0
    EDGE = 1


class SweepEvent(NamedTuple):
    position: int
    kind: EventKind
    interval_kind: IntervalKind
    sibling: int

    def sort_key(self) -> tuple[int, int, int]:
        # ends before starts; equal kinds by decreasing sibling
        return (self.position, int(self.kind), -self.sibling)


def sweep_events(
    vertex_intervals: Iterable[tuple[int, int]], edge_intervals: Iterable[tuple[int, int]]
) -> list[SweepEvent]:
    events = []
    for p, v in set(vertex_intervals):
        events.append(SweepEvent(p, EventKind.START, IntervalKind.VERTEX, v))
        events.append(SweepEvent(v, EventKind.END, IntervalKind.VERTEX, p))
    for u, w in set(edge_intervals):
        events.append(SweepEvent(u, EventKind.START, IntervalKind.EDGE, w))
    events.sort(key=SweepEvent.sort_key)
    return events


def sweepline_conflicts(
    vertex_intervals: Iterable[tuple[int, int]],
    edge_intervals: Iterable[tuple[int, int]],
) -> ConflictingPair | None:
    """Find a conflict among sampled vertex intervals ``(p(v), v)`` and edges.

    Reports either ``(v1, {p(v2), v2})`` for two sampled vertices or
    ``(v, {u, w})`` for a sampled vertex and a sampled edge, and returns None
    when no such pair exists. Edge intervals end without effect, so only
    their starts are queued.
    """
    parent_of: dict[int, int] = {}
    active: list[int] = []  # vertex labels, minimum on top
    for pos, kind, ikind, sib in sweep_events(vertex_intervals, edge_intervals):
        if ikind is IntervalKind.VERTEX:
            if kind is EventKind.START:
                parent_of[sib] = pos
                if active and sib > active[-1]:
                    return ConflictingPair(active[-1], pos, sib)
                active.append(sib)
            else:
                if active and active[-1] == pos:
                    active.pop()
                else:
                    active.remove(pos)
        elif active and sib > active[-1]:
            return ConflictingPair(active[-1], pos, sib)
    return None


# -- fixes ---------------------------------------------------------------------


def fix_vertex(g: LabeledGraph, v: int) -> list[Edit]:
    """Add ``{v-1, v}`` so that ``v`` gets parent ``v - 1``."""
    if v == 1:
        raise VertexIsOne("label 1 has no predecessor")
    if not 2 <= v <= g.n:
        raise VertexOutOfRange(f"label {v} outside [1, {g.n}]")
    if g.has_label_edge(v - 1, v):
        return []
    return [Edit("add", v - 1, v)]


def fix_edge(g: LabeledGraph, e: tuple[int, int]) -> list[Edit]:
    """Remove ``{u, w}`` and make ``w - 1`` the parent of ``w``."""
    a, b = int(e[0]), int(e[1])
    if not g.has_label_edge(a, b):
        raise EdgeNotPresent(f"no edge {{{a},{b}}}")
    u, w = (a, b) if g.directed else (min(a, b), max(a, b))
    edits = [Edit("remove", u, w)]
    if u == w - 1 or not g.has_label_edge(w - 1, w):
        edits.append(Edit("add", w - 1, w))
    return edits


def _in_conflict(h: EditableGraph, v: int) -> bool:
    pv = h.parent(v)
    for a in range(pv + 1, v):
        for b in h.out[a]:
            if b > v:
                return True
    return False


def greedy_cover(conflicts: Iterable[ConflictingPair]) -> tuple[list[int], list[tuple[int, int]]]:
    """Both sides of a greedy maximal matching of the conflict graph."""
    used_v: set[int] = set()
    used_e: set[tuple[int, int]] = set()
    for c in conflicts:
        e = (c.u, c.w)
        if c.v not in used_v and e not in used_e:
            used_v.add(c.v)
            used_e.add(e)
    return sorted(used_v), sorted(used_e)


def repair(g: LabeledGraph) -> tuple[LabeledGraph, list[Edit]]:
    """Make the numbering valid within the degree bound.

    Fixes every edge, then every still-conflicted vertex, of a greedy vertex
    cover of the conflict graph, and then lowers the degree back to ``d``
    with the rewiring rules of :func:`dfs_certify.transforms.degree_reduce`.
    Returns the new graph and the net edit list.
    """
    return repair_with_cover(g)[:2]


def repair_with_cover(g: LabeledGraph) -> tuple[LabeledGraph, list[Edit], int]:
    from .transforms import _reduce_level  # local import: transforms uses this module

    if g.directed:
        raise DirectedUnsupported("repair restores the degree bound with an undirected rule")
    conflicts = enumerate_conflicts(g)
    if not conflicts:
        return g, [], 0
    if g.d < 2:
        raise ValueError("repair needs d >= 2 to lower degrees after fixing")
    cover_v, cover_e = greedy_cover(conflicts)
    h = EditableGraph(g)
    for u, w in cover_e:
        if h.has(u, w):
            h.remove(u, w)
            h.add(w - 1, w)
    for v in cover_v:
        if not h.has(v - 1, v) and _in_conflict(h, v):
            h.add(v - 1, v)
    for level in range(h.max_degree(), g.d, -1):
        _reduce_level(h, level)
    out = h.to_graph(g.d)
    return out, edit_difference(g, out), len(cover_v) + len(cover_e)
