"""Navigation of the would-be DFS tree through oracle queries.

The tree has an edge from ``p(v)`` to ``v`` for every vertex with a real
parent; children are ordered by label. Its pre-order is the DFS order when
the numbering is valid, so ``tree_next``/``tree_prev`` double as
``dfs_next``/``dfs_prev``.

A :class:`Navigator` remembers the answers it has seen, like any algorithm
may within one walk. Nothing is shared between walks. Finding the children of
a vertex needs the parent of each of its neighbors, so one step costs
O(d^2) queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .oracle import BudgetExhausted, GraphOracle


class Outcome(Enum):
    NEXT = "next"
    END = "end"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class NavResult:
    outcome: Outcome
    vertex: int | None = None
    reason: str | None = None

    @property
    def is_next(self) -> bool:
        return self.outcome is Outcome.NEXT

    def __repr__(self) -> str:
        if self.outcome is Outcome.NEXT:
            return f"Next({self.vertex})"
        if self.outcome is Outcome.END:
            return "EndOfComponent"
        return f"Inconsistent({self.reason!r})"


END_OF_COMPONENT = NavResult(Outcome.END)


def Next(v: int) -> NavResult:  # noqa: N802 - reads like the variant it builds
    return NavResult(Outcome.NEXT, v)


def Inconsistent(reason: str) -> NavResult:  # noqa: N802
    return NavResult(Outcome.INCONSISTENT, reason=reason)


def call_cap(d: int, ell: int) -> int:
    """Hard per-call query cap used on possibly invalid inputs."""
    return 4 * d * d * ell


class Navigator:
    """Memoizing tree navigation over one oracle for the length of a walk."""

    def __init__(self, oracle: GraphOracle, cap: int | None = None):
        self.o = oracle
        self.cap = cap
        self._fwd = "out" if oracle.directed else None
        self._back = "in" if oracle.directed else None
        self._labels: dict[int, int] = {}
        self._fwd_nbrs: dict[int, list[int]] = {}
        self._back_nbrs: dict[int, list[int]] = {}
        self._parent: dict[int, int] = {}
        self._children: dict[int, list[int]] = {}

    # -- memoized primitives -------------------------------------------------

    def label(self, v: int) -> int:
        lab = self._labels.get(v)
        if lab is None:
            lab = self._labels[v] = self.o.label(v)
        return lab

    def forward(self, v: int) -> list[int]:
        """Neighbors of ``v`` (out-neighbors when directed)."""
        r = self._fwd_nbrs.get(v)
        if r is None:
            r = self._fwd_nbrs[v] = self.o.neighbors(v, self._fwd)
            if not self.o.directed:
                self._back_nbrs[v] = r
        return r

    def backward(self, v: int) -> list[int]:
        """Neighbors of ``v`` (in-neighbors when directed)."""
        r = self._back_nbrs.get(v)
        if r is None:
            r = self._back_nbrs[v] = self.o.neighbors(v, self._back)
            if not self.o.directed:
                self._fwd_nbrs[v] = r
        return r

    def parent(self, v: int) -> int:
        """Vertex realizing p(v), or 0 for the virtual root."""
        par = self._parent.get(v)
        if par is None:
            lv = self.label(v)
            best, par = 0, 0
            for x in self.backward(v):
                lx = self.label(x)
                if best < lx < lv:
                    best, par = lx, x
            self._parent[v] = par
        return par

    def parent_label(self, v: int) -> int:
        par = self.parent(v)
        return self.label(par) if par else 0

    def children(self, u: int) -> list[int]:
        """Children of ``u`` in the tree, ascending by label."""
        kids = self._children.get(u)
        if kids is None:
            lu = self.label(u)
            found = []
            for w in self.forward(u):
                lw = self.label(w)
                if lw > lu and self.parent(w) == u:
                    found.append((lw, w))
            found.sort()
            kids = self._children[u] = [w for _, w in found]
        return kids

    def max_forward_label(self, v: int) -> int:
        return max((self.label(x) for x in self.forward(v)), default=0)

    # -- tree walks ----------------------------------------------------------

    def _next(self, v: int) -> NavResult:
        kids = self.children(v)
        if kids:
            return Next(kids[0])
        while True:
            par = self.parent(v)
            if not par:
                return END_OF_COMPONENT
            sib = self.children(par)
            i = sib.index(v)
            if i + 1 < len(sib):
                return Next(sib[i + 1])
            v = par

    def _prev(self, v: int) -> NavResult:
        par = self.parent(v)
        if not par:
            return END_OF_COMPONENT
        sib = self.children(par)
        i = sib.index(v)
        if i == 0:
            return Next(par)
        w = sib[i - 1]
        while True:
            kids = self.children(w)
            if not kids:
                return Next(w)
            w = kids[-1]

    def _capped(self, step, v: int) -> NavResult:
        if self.cap is None:
            return step(v)
        try:
            with self.o.limited(self.cap) as token:
                return step(v)
        except BudgetExhausted as exc:
            if exc.token is token:
                return Inconsistent(f"navigation call exceeded {self.cap} queries")
            raise

    def tree_next(self, v: int) -> NavResult:
        return self._capped(self._next, v)

    def tree_prev(self, v: int) -> NavResult:
        return self._capped(self._prev, v)

    dfs_next = tree_next
    dfs_prev = tree_prev


def tree_children(o: GraphOracle, u: int) -> list[int]:
    return Navigator(o).children(u)


def tree_next(o: GraphOracle, v: int, cap: int | None = None) -> NavResult:
    return Navigator(o, cap).tree_next(v)


def tree_prev(o: GraphOracle, v: int, cap: int | None = None) -> NavResult:
    return Navigator(o, cap).tree_prev(v)


def dfs_next(o: GraphOracle, v: int, cap: int | None = None) -> NavResult:
    """Vertex labeled ``label(v) + 1`` on valid inputs, or EndOfComponent."""
    return Navigator(o, cap).dfs_next(v)


def dfs_prev(o: GraphOracle, v: int, cap: int | None = None) -> NavResult:
    """Vertex labeled ``label(v) - 1`` on valid inputs, or EndOfComponent."""
    return Navigator(o, cap).dfs_prev(v)
