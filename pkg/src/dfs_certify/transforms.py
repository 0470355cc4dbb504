"""Degree reduction on valid instances and FIN numbering via label reversal."""

from __future__ import annotations

import math

import numpy as np

from .exact import Verdict, check_by_conflicts
from .graph import (
    DirectedUnsupported,
    EditableGraph,
    Edit,
    LabeledGraph,
    VertexOutOfRange,
    assemble,
    edit_difference,
)
from .oracle import GraphOracle, ReversedLabels

INFINITY = math.inf


class InvalidInput(ValueError):
    pass


class DegreeBoundTooSmall(ValueError):
    pass


def _reduce_level(h: EditableGraph, level: int) -> int:
    """Bring every vertex of degree ``level`` down by one, in label order.

    Needs a valid numbering and maximum degree ``level >= 3``. A vertex with
    two smaller neighbors drops the edge to the smallest one. Otherwise its
    largest child ``c`` moves under ``c - 1``. Unless ``c - 1`` was already
    the parent of ``c``, it is a leaf, and it then sheds its smallest
    neighbor when it had more than one. Returns the
    number of edit operations performed (at most three per vertex).
    """
    ops = 0
    for v in range(1, h.n + 1):
        if len(h.out[v]) < level:
            continue
        nbrs = h.out[v]
        smaller = [x for x in nbrs if x < v]
        if len(smaller) >= 2:
            h.remove(min(smaller), v)
            ops += 1
            continue
        last = max(nbrs)
        w = last - 1
        old_w = sorted(h.out[w])
        h.remove(v, last)
        ops += 1
        if h.has(w, last):
            # w is already the parent of last; nothing grew
            continue
        h.add(w, last)
        ops += 1
        if len(old_w) >= 2:
            h.remove(old_w[0], w)
            ops += 1
    return ops


def _check_reducible(g: LabeledGraph, d_star: int) -> None:
    if g.directed:
        raise DirectedUnsupported("degree reduction is defined for undirected graphs")
    if d_star < 2 or g.d < 3:
        raise DegreeBoundTooSmall(f"degree reduction needs d >= 3 (got d={g.d})")
    if not check_by_conflicts(g).accepted:
        raise InvalidInput("degree reduction needs a valid DFS numbering")


def degree_reduce(g: LabeledGraph) -> tuple[LabeledGraph, list[Edit]]:
    """Lower the maximum degree from ``d`` to ``d - 1`` keeping the numbering valid.

    Uses at most ``3 * |V_d|`` edits where ``V_d`` holds the vertices of
    degree exactly ``d``. The returned graph carries the bound ``d - 1``.
    """
    _check_reducible(g, g.d - 1)
    h = EditableGraph(g)
    _reduce_level(h, g.d)
    out = h.to_graph(g.d - 1)
    return out, edit_difference(g, out)


def degree_reduce_to(g: LabeledGraph, d_star: int) -> tuple[LabeledGraph, list[Edit]]:
    """Repeat :func:`degree_reduce` until the maximum degree is ``d_star``."""
    if d_star < 3:
        raise DegreeBoundTooSmall(f"target bound must be at least 3, got {d_star}")
    if d_star >= g.d:
        return g, []
    _check_reducible(g, d_star)
    h = EditableGraph(g)
    for level in range(g.d, d_star, -1):
        _reduce_level(h, level)
    out = h.to_graph(d_star)
    return out, edit_difference(g, out)


def reduction_bound(g: LabeledGraph, d_star: int) -> int:
    """Edit bound ``sum_k 3 (k - d_star) |V_k|`` over degrees above ``d_star``."""
    deg = g.degrees()[1:]
    return int(sum(3 * (k - d_star) * int(np.sum(deg == k)) for k in range(d_star + 1, g.d + 1)))


# -- FIN numbering -------------------------------------------------------------


def reverse_numbering(g: LabeledGraph) -> LabeledGraph:
    """Same graph with every label ``x`` replaced by ``n + 1 - x``."""
    if g.directed:
        raise DirectedUnsupported("reversal does not carry FIN numberings over for directed graphs")
    return assemble(g.n, g.d, g.edges(), g.n + 1 - g.labels[1:], False)


def fin_parent(g: LabeledGraph, v: int) -> int | float:
    """Smallest neighbor label above ``v``, or :data:`INFINITY`."""
    if g.directed:
        raise DirectedUnsupported("FIN parents are defined for undirected graphs")
    if not 1 <= v <= g.n:
        raise VertexOutOfRange(f"label {v} outside [1, {g.n}]")
    u = g.vertex_of(v)
    above = [x for x in g.labels[g.neighbors(u)].tolist() if x > v]
    return min(above) if above else INFINITY


def check_fin(g: LabeledGraph) -> Verdict:
    """Exact FIN check: the reversed numbering must be a DFS numbering.

    A witness refers to the reversed labels.
    """
    return check_by_conflicts(reverse_numbering(g))


def test_fin(o: GraphOracle, params) -> Verdict:
    """Sublinear FIN test: the combined tester over reversed labels."""
    from .tester import test_combined

    return test_combined(ReversedLabels(o), params)


test_fin.__test__ = False  # keep pytest from collecting it
