"""Query access to a labeled graph with counting and budgets.

A tester only sees a :class:`GraphOracle`. It can ask for the i-th neighbor
of a vertex, the label of a vertex, and draw uniform vertices (free) or
uniform edges (charged per rejection attempt). Every neighbor or label
lookup is counted. When a limit is hit the oracle raises
:class:`BudgetExhausted` instead of answering.
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .graph import LabeledGraph


class BudgetExhausted(Exception):
    """Raised when a query would exceed the active limit.

    ``token`` names the :meth:`GraphOracle.limited` scope whose limit was
    binding, or is None when the oracle's own hard budget ran out.
    """

    def __init__(self, total: int, token: object | None):
        super().__init__(f"query limit reached after {total} queries")
        self.total = total
        self.token = token


class DirectionUnsupported(ValueError):
    pass


class EmptyGraph(ValueError):
    pass


@dataclass(frozen=True)
class QueryCounter:
    neighbor_queries: int = 0
    label_queries: int = 0

    @property
    def total(self) -> int:
        return self.neighbor_queries + self.label_queries


class EdgeSample(NamedTuple):
    """A sampled edge as vertex ids plus labels, oriented so ``lu < lw``.

    For directed graphs the sample is the arc ``u -> w`` and the labels are
    in arc order, so ``lu > lw`` is possible.
    """

    u: int
    w: int
    lu: int
    lw: int


_INF = float("inf")


class GraphOracle:
    """Counted, budgeted access to a hidden :class:`LabeledGraph`."""

    def __init__(self, graph: LabeledGraph, seed: int | None = 0, budget: int | None = None):
        self._graph = graph
        self.n = graph.n
        self.d = graph.d
        self.directed = graph.directed
        self.rng = random.Random(seed)
        self.budget = budget
        (self._lab, self._optr, self._oidx, self._iptr, self._iidx) = graph.hot
        self._m = graph.num_edges
        self._total = 0
        self._lq = 0
        self.edge_attempts = 0
        self._scopes: list[tuple[float, object]] = []
        self._limit: float = _INF if budget is None else budget

    # -- accounting --------------------------------------------------------

    @property
    def counter(self) -> QueryCounter:
        return QueryCounter(self._total - self._lq, self._lq)

    @property
    def total(self) -> int:
        return self._total

    def _refresh_limit(self) -> None:
        lim = _INF if self.budget is None else self.budget
        for scope_lim, _ in self._scopes:
            lim = min(lim, scope_lim)
        self._limit = lim

    def _exhausted(self) -> BudgetExhausted:
        if self.budget is not None and self._total >= self.budget:
            return BudgetExhausted(self._total, None)
        token = min(self._scopes, key=lambda s: s[0])[1]
        return BudgetExhausted(self._total, token)

    @contextmanager
    def limited(self, extra: float) -> Iterator[object]:
        """Scope in which at most ``extra`` further queries may be made.

        Yields a token; a :class:`BudgetExhausted` raised because of this scope
        carries that token, so callers can tell their own cap from outer ones.
        """
        token = object()
        entry = (self._total + extra, token)
        self._scopes.append(entry)
        self._refresh_limit()
        try:
            yield token
        finally:
            self._scopes.remove(entry)
            self._refresh_limit()

    # -- queries -----------------------------------------------------------

    def _ptrs(self, direction: str | None):
        if direction is None or direction == "undirected":
            if self.directed:
                raise DirectionUnsupported("directed graphs need direction 'in' or 'out'")
            return self._optr, self._oidx
        if not self.directed:
            raise DirectionUnsupported(f"undirected graph has no {direction!r} neighbors")
        if direction == "out":
            return self._optr, self._oidx
        if direction == "in":
            return self._iptr, self._iidx
        raise DirectionUnsupported(f"unknown direction {direction!r}")

    def neighbor(self, v: int, i: int, direction: str | None = None) -> int | None:
        """The ``i``-th neighbor of ``v`` (1-based) or None if ``deg(v) < i``."""
        ptr, idx = self._ptrs(direction)
        if not 1 <= i <= self.d:
            raise IndexError(f"slot {i} outside [1, {self.d}]")
        if self._total >= self._limit:
            raise self._exhausted()
        self._total += 1
        j = ptr[v] + i - 1
        return idx[j] if j < ptr[v + 1] else None

    def neighbors(self, v: int, direction: str | None = None) -> list[int]:
        """All neighbors of ``v``, charged as the slot queries that reveal them.

        Slots are read in order until the first empty one (or slot ``d``), so
        the charge is ``min(deg + 1, d)`` neighbor queries.
        """
        ptr, idx = self._ptrs(direction)
        lo = ptr[v]
        hi = ptr[v + 1]
        cost = hi - lo + 1
        if cost > self.d:
            cost = self.d
        room = self._limit - self._total
        if cost > room:
            self._total += int(room)
            raise self._exhausted()
        self._total += cost
        return idx[lo:hi]

    def label(self, v: int) -> int:
        if self._total >= self._limit:
            raise self._exhausted()
        self._total += 1
        self._lq += 1
        return self._lab[v]

    def sample_vertex(self) -> int:
        """Uniform vertex id; free of charge."""
        return int(self.rng.random() * self.n) + 1

    def sample_edge(self) -> EdgeSample:
        """Uniform edge by rejection over ``(vertex, slot)`` pairs.

        Each attempt costs one neighbor query; a hit costs two label queries.
        Undirected edges own two slots, arcs own one out-slot.
        """
        if self._m == 0:
            raise EmptyGraph("graph has no edges")
        ptr = self._optr
        idx = self._oidx
        rnd = self.rng.random
        n, d = self.n, self.d
        while True:
            if self._total >= self._limit:
                raise self._exhausted()
            self._total += 1
            self.edge_attempts += 1
            v = int(rnd() * n) + 1
            j = ptr[v] + int(rnd() * d)
            if j < ptr[v + 1]:
                w = idx[j]
                lv = self.label(v)
                lw = self.label(w)
                if not self.directed and lv > lw:
                    return EdgeSample(w, v, lw, lv)
                return EdgeSample(v, w, lv, lw)


class ReversedLabels:
    """Oracle adapter presenting labels ``n + 1 - label`` on the fly.

    Queries pass through to the wrapped oracle and are counted there.
    """

    def __init__(self, inner: GraphOracle):
        if inner.directed:
            from .graph import DirectedUnsupported

            raise DirectedUnsupported("label reversal is only meaningful for undirected graphs")
        self.inner = inner
        self.n = inner.n
        self.d = inner.d
        self.directed = False
        self.rng = inner.rng
        self.budget = inner.budget

    @property
    def counter(self) -> QueryCounter:
        return self.inner.counter

    @property
    def total(self) -> int:
        return self.inner.total

    @property
    def edge_attempts(self) -> int:
        return self.inner.edge_attempts

    def limited(self, extra: float):
        return self.inner.limited(extra)

    def neighbor(self, v: int, i: int, direction: str | None = None) -> int | None:
        return self.inner.neighbor(v, i, direction)

    def neighbors(self, v: int, direction: str | None = None) -> list[int]:
        return self.inner.neighbors(v, direction)

    def label(self, v: int) -> int:
        return self.n + 1 - self.inner.label(v)

    def sample_vertex(self) -> int:
        return self.inner.sample_vertex()

    def sample_edge(self) -> EdgeSample:
        s = self.inner.sample_edge()
        return EdgeSample(s.w, s.u, self.n + 1 - s.lw, self.n + 1 - s.lu)


def query_count(o: GraphOracle) -> QueryCounter:
    return o.counter
