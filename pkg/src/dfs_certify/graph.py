"""Labeled bounded-degree graphs and the exact conflict primitives.

Vertices are ids 1..n. Each vertex carries a label, and the labels form a
permutation of 1..n. The would-be DFS parent of label ``v`` is the largest
neighbor label below ``v`` (0 when there is none). A conflicting pair
``(v, {u, w})`` satisfies ``p(v) < u < v < w``. A numbering is a valid DFS
numbering exactly when no conflicting pair exists.

Everything in this module works with labels through the stored label array.
Only exact code may use the inverse map (``vertex_of``); testers go through
:mod:`dfs_certify.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for invalid graph input."""


class NonBijectiveLabels(GraphError):
    pass


class DegreeBoundExceeded(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class EdgeNotPresent(GraphError):
    pass


class DirectedUnsupported(GraphError):
    pass


class ConflictingPair(NamedTuple):
    """Witness ``(v, {u, w})`` in label space with ``u < w``."""

    v: int
    u: int
    w: int

    def __str__(self) -> str:
        return f"conflict v={self.v} edge={{{self.u},{self.w}}}"


class Edit(NamedTuple):
    op: str  # "add" or "remove"
    a: int
    b: int

    def __str__(self) -> str:
        sign = "+" if self.op == "add" else "-"
        return f"{sign}{{{self.a},{self.b}}}"


EditList = list  # list[Edit]; arcs keep (tail, head) order for directed graphs


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Immutable labeled graph stored as CSR arrays.

    ``labels[v]`` is the label of vertex ``v`` (slot 0 is unused and holds 0).
    ``out_ptr``/``out_idx`` hold the adjacency of undirected graphs and the
    out-arcs of directed ones; ``in_ptr``/``in_idx`` hold in-arcs (and alias
    the out arrays for undirected graphs). Neighbor runs are sorted by id.
    """

    n: int
    d: int
    directed: bool
    labels: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray

    # -- adjacency ---------------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v] : self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v] : self.in_ptr[v + 1]]

    def degree(self, v: int) -> int:
        d = int(self.out_ptr[v + 1] - self.out_ptr[v])
        if self.directed:
            d += int(self.in_ptr[v + 1] - self.in_ptr[v])
        return d

    def degrees(self) -> np.ndarray:
        """Per-vertex degree indexed by id (total degree for directed)."""
        deg = np.diff(self.out_ptr)
        if self.directed:
            deg = deg + np.diff(self.in_ptr)
        return deg

    @property
    def num_edges(self) -> int:
        m = len(self.out_idx)
        return m if self.directed else m // 2

    def edges(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` id array; ``a < b`` for undirected graphs."""
        src = np.repeat(np.arange(self.n + 1), np.diff(self.out_ptr))
        dst = self.out_idx
        if not self.directed:
            keep = src < dst
            src, dst = src[keep], dst[keep]
        return np.stack([src, dst], axis=1)

    # -- label space -------------------------------------------------------

    def label_of(self, v: int) -> int:
        return int(self.labels[v])

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.zeros(self.n + 1, dtype=np.int64)
        inv[self.labels[1:]] = np.arange(1, self.n + 1)
        return _readonly(inv)

    def vertex_of(self, label: int) -> int:
        """Vertex carrying ``label``. Exact code only."""
        return int(self.inverse[label])

    @cached_property
    def label_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges in label space.

        Undirected: ``(lo, hi)`` with ``lo < hi``. Directed: ``(tail, head)``.
        """
        e = self.edges()
        a = self.labels[e[:, 0]]
        b = self.labels[e[:, 1]]
        if not self.directed:
            a, b = np.minimum(a, b), np.maximum(a, b)
        return _readonly(a), _readonly(b)

    @cached_property
    def forward_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Label pairs ``(u, w)`` with ``u < w`` that can take part in conflicts.

        For directed graphs these are the arcs ``u -> w`` pointing up in label
        order; arcs pointing down never conflict.
        """
        a, b = self.label_edges
        if self.directed:
            keep = a < b
            a, b = a[keep], b[keep]
        return a, b

    @cached_property
    def parents(self) -> np.ndarray:
        """``parents[x]`` is p(x) for label ``x`` (index 0 unused)."""
        a, b = self.forward_edges
        par = np.zeros(self.n + 1, dtype=np.int64)
        np.maximum.at(par, b, a)
        return _readonly(par)

    @cached_property
    def max_up_neighbor(self) -> np.ndarray:
        """Largest label reachable by one forward edge from each label (0 if none)."""
        a, b = self.forward_edges
        top = np.zeros(self.n + 1, dtype=np.int64)
        np.maximum.at(top, a, b)
        return _readonly(top)

    @cached_property
    def edge_set(self) -> frozenset:
        a, b = self.label_edges
        return frozenset(zip(a.tolist(), b.tolist()))

    def has_label_edge(self, a: int, b: int) -> bool:
        if not self.directed and a > b:
            a, b = b, a
        return (a, b) in self.edge_set

    @cached_property
    def hot(self) -> tuple[list, list, list, list, list]:
        """Plain-list copies of the arrays for the oracle's query path."""
        if self.directed:
            return (
                self.labels.tolist(),
                self.out_ptr.tolist(),
                self.out_idx.tolist(),
                self.in_ptr.tolist(),
                self.in_idx.tolist(),
            )
        ptr = self.out_ptr.tolist()
        idx = self.out_idx.tolist()
        return self.labels.tolist(), ptr, idx, ptr, idx

    # -- comparison --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and self.directed == other.directed
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_idx, other.out_idx)
            and np.array_equal(self.in_ptr, other.in_ptr)
            and np.array_equal(self.in_idx, other.in_idx)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"LabeledGraph(n={self.n}, d={self.d}, m={self.num_edges}, {kind})"


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # single integer key sorts faster than lexsort on two columns
    order = np.argsort(src * (n + 1) + dst)
    counts = np.bincount(src, minlength=n + 1)
    ptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return _readonly(ptr), _readonly(dst[order].astype(np.int64))


def assemble(
    n: int, d: int, edges: np.ndarray, labels: np.ndarray, directed: bool = False
) -> LabeledGraph:
    """Build a graph from trusted arrays without validation.

    ``edges`` is an ``(m, 2)`` id array with no loops or duplicates and
    ``labels`` has length ``n`` (label of id ``i`` at position ``i - 1``).
    Generators use this path; user input goes through :func:`build_graph`.
    """
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    lab = np.zeros(n + 1, dtype=np.int64)
    lab[1:] = labels
    if directed:
        out_ptr, out_idx = _csr(n, e[:, 0], e[:, 1])
        in_ptr, in_idx = _csr(n, e[:, 1], e[:, 0])
    else:
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        out_ptr, out_idx = _csr(n, src, dst)
        in_ptr, in_idx = out_ptr, out_idx
    return LabeledGraph(n, d, directed, _readonly(lab), out_ptr, out_idx, in_ptr, in_idx)


def build_graph(
    n: int,
    d: int,
    edges: Iterable[Sequence[int]],
    labels: Sequence[int] | None = None,
    directed: bool = False,
) -> LabeledGraph:
    """Validate input and build a :class:`LabeledGraph`.

    ``edges`` are pairs of vertex ids (arcs ``(tail, head)`` when directed).
    ``labels[i]`` is the label of vertex ``i + 1``; identity when omitted.
    """
    if n < 1:
        raise VertexOutOfRange(f"n must be at least 1, got {n}")
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    e = e.reshape(-1, 2)
    if labels is None:
        lab = np.arange(1, n + 1, dtype=np.int64)
    else:
        lab = np.asarray(labels, dtype=np.int64).reshape(-1)
        if len(lab) != n:
            raise NonBijectiveLabels(f"expected {n} labels, got {len(lab)}")
        if lab.min() < 1 or lab.max() > n or len(np.unique(lab)) != n:
            seen: set[int] = set()
            for i, x in enumerate(lab.tolist(), start=1):
                if x < 1 or x > n or x in seen:
                    raise NonBijectiveLabels(f"label {x} of vertex {i} is out of range or repeated")
                seen.add(x)
    if len(e):
        bad = (e < 1) | (e > n)
        if bad.any():
            i = int(np.argmax(bad.any(axis=1)))
            raise VertexOutOfRange(f"edge {tuple(e[i].tolist())} leaves [1, {n}]")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            raise SelfLoop(f"self-loop at vertex {int(e[np.argmax(loops), 0])}")
        key_a, key_b = (e[:, 0], e[:, 1]) if directed else (e.min(axis=1), e.max(axis=1))
        keys = key_a * (n + 1) + key_b
        uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
        if (counts > 1).any():
            k = int(uniq[np.argmax(counts > 1)])
            raise DuplicateEdge(f"edge {{{k // (n + 1)},{k % (n + 1)}}} appears twice")
        if directed:
            checks = [("out", e[:, 0]), ("in", e[:, 1])]
        else:
            checks = [("", np.concatenate([e[:, 0], e[:, 1]]))]
        for kind, ends in checks:
            deg = np.bincount(ends, minlength=n + 1)
            if deg.max() > d:
                v = int(np.argmax(deg))
                what = f"{kind}-degree" if kind else "degree"
                raise DegreeBoundExceeded(f"vertex {v} has {what} {int(deg[v])} > {d}")
    return assemble(n, d, e, lab, directed)


def permute_ids(g: LabeledGraph, rng: np.random.Generator) -> LabeledGraph:
    """Rename vertex ids by a uniform permutation; labels travel with vertices."""
    perm = np.zeros(g.n + 1, dtype=np.int64)
    perm[1:] = rng.permutation(g.n) + 1
    e = perm[g.edges()]
    lab = np.zeros(g.n, dtype=np.int64)
    lab[perm[1:] - 1] = g.labels[1:]
    return assemble(g.n, g.d, e, lab, g.directed)


def relabel(g: LabeledGraph, labels: Sequence[int]) -> LabeledGraph:
    """Same topology and ids with a new label per vertex (validated)."""
    return build_graph(g.n, g.d, g.edges(), labels, g.directed)


# -- conflicts ---------------------------------------------------------------


def parent_label(g: LabeledGraph, v: int) -> int:
    """Largest neighbor label below ``v`` (in-neighbors when directed), or 0."""
    if not 1 <= v <= g.n:
        raise VertexOutOfRange(f"label {v} outside [1, {g.n}]")
    return int(g.parents[v])


def is_conflicting_pair(g: LabeledGraph, v: int, e: Sequence[int]) -> bool:
    a, b = int(e[0]), int(e[1])
    if not g.has_label_edge(a, b):
        raise EdgeNotPresent(f"no edge {{{a},{b}}}")
    if g.directed:
        u, w = a, b
        if u > w:
            return False
    else:
        u, w = min(a, b), max(a, b)
    return int(g.parents[v]) < u < v < w


_DENSE_LIMIT = 1 << 21


class _RangeMin:
    """Sparse table over ``values`` answering inclusive range minima."""

    def __init__(self, values: np.ndarray):
        self.levels = [values]
        k = 1
        while 2 * k <= len(values):
            prev = self.levels[-1]
            self.levels.append(np.minimum(prev[:-k], prev[k:]))
            k *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        length = hi - lo + 1
        k = np.floor(np.log2(length)).astype(np.int64)
        out = np.empty(len(lo), dtype=self.levels[0].dtype)
        for level in np.unique(k):
            sel = k == level
            row = self.levels[level]
            out[sel] = np.minimum(row[lo[sel]], row[hi[sel] - (1 << level) + 1])
        return out


def _candidate_edges(g: LabeledGraph) -> tuple[np.ndarray, np.ndarray]:
    """Forward edges that have at least one conflicting vertex."""
    a, b = g.forward_edges
    wide = b - a >= 2
    a, b = a[wide], b[wide]
    if len(a) == 0:
        return a, b
    rmq = _RangeMin(g.parents)
    hit = rmq.query(a + 1, b - 1) < a
    return a[hit], b[hit]


def _conflict_arrays(g: LabeledGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    par = g.parents
    a, b = g.forward_edges
    if len(a) * g.n <= _DENSE_LIMIT:
        v = np.arange(1, g.n + 1)[:, None]
        mask = (par[1:, None] < a[None, :]) & (a[None, :] < v) & (v < b[None, :])
        vi, ei = np.nonzero(mask)
        vv, uu, ww = vi + 1, a[ei], b[ei]
    else:
        ca, cb = _candidate_edges(g)
        parts_v, parts_u, parts_w = [], [], []
        for u, w in zip(ca.tolist(), cb.tolist()):
            inner = np.nonzero(par[u + 1 : w] < u)[0] + u + 1
            parts_v.append(inner)
            parts_u.append(np.full(len(inner), u))
            parts_w.append(np.full(len(inner), w))
        if not parts_v:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        vv = np.concatenate(parts_v)
        uu = np.concatenate(parts_u)
        ww = np.concatenate(parts_w)
    order = np.lexsort((ww, uu, vv))
    return vv[order], uu[order], ww[order]


def enumerate_conflicts(g: LabeledGraph) -> list[ConflictingPair]:
    """All conflicting pairs in lexicographic ``(v, u, w)`` order."""
    vv, uu, ww = _conflict_arrays(g)
    return [ConflictingPair(*t) for t in zip(vv.tolist(), uu.tolist(), ww.tolist())]


def count_conflicts(g: LabeledGraph) -> int:
    return len(_conflict_arrays(g)[0])


def first_conflict(g: LabeledGraph) -> ConflictingPair | None:
    """Lexicographically smallest conflicting pair, or None."""
    par = g.parents
    a, b = g.forward_edges
    if len(a) * g.n <= _DENSE_LIMIT:
        v = np.arange(1, g.n + 1)[:, None]
        mask = (par[1:, None] < a[None, :]) & (a[None, :] < v) & (v < b[None, :])
        rows = np.nonzero(mask.any(axis=1))[0]
        if len(rows) == 0:
            return None
        vstar = int(rows[0]) + 1
    else:
        ca, cb = _candidate_edges(g)
        if len(ca) == 0:
            return None
        vstar = min(
            u + 1 + int(np.argmax(par[u + 1 : w] < u)) for u, w in zip(ca.tolist(), cb.tolist())
        )
    pv = int(par[vstar])
    sel = (pv < a) & (a < vstar) & (vstar < b)
    ua, wb = a[sel], b[sel]
    i = np.lexsort((wb, ua))[0]
    return ConflictingPair(vstar, int(ua[i]), int(wb[i]))


def _augment(root, adj, match_e, match_v) -> bool:
    seen = set()
    frames = [root]
    iters = [iter(adj[root])]
    chosen: list = []
    while frames:
        for e in iters[-1]:
            if e in seen:
                continue
            seen.add(e)
            owner = match_e.get(e)
            chosen.append(e)
            if owner is None:
                for x, f in zip(frames, chosen):
                    match_e[f] = x
                    match_v[x] = f
                return True
            frames.append(owner)
            iters.append(iter(adj[owner]))
            break
        else:
            frames.pop()
            iters.pop()
            if chosen:
                chosen.pop()
    return False


def maximum_matching(pairs: Iterable[ConflictingPair]) -> list[ConflictingPair]:
    """Maximum matching of a bipartite conflict graph by augmenting paths."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for c in pairs:
        adj.setdefault(c.v, []).append((c.u, c.w))
    match_e: dict = {}
    match_v: dict = {}
    for v, edges in adj.items():
        for e in edges:
            if e not in match_e:
                match_e[e] = v
                match_v[v] = e
                break
    for v in adj:
        if v not in match_v:
            _augment(v, adj, match_e, match_v)
    return sorted(ConflictingPair(v, e[0], e[1]) for v, e in match_v.items())


def conflict_matching(g: LabeledGraph) -> list[ConflictingPair]:
    """Maximum vertex- and edge-disjoint set of conflicting pairs."""
    return maximum_matching(enumerate_conflicts(g))


# -- editing -----------------------------------------------------------------


class EditableGraph:
    """Mutable label-space copy of a graph used by fixes and transforms."""

    def __init__(self, g: LabeledGraph):
        self.source = g
        self.n = g.n
        self.directed = g.directed
        self.out: list[set[int]] = [set() for _ in range(g.n + 1)]
        self.inc: list[set[int]] = self.out if not g.directed else [set() for _ in range(g.n + 1)]
        a, b = g.label_edges
        for x, y in zip(a.tolist(), b.tolist()):
            self.out[x].add(y)
            self.inc[y].add(x)

    def has(self, a: int, b: int) -> bool:
        return b in self.out[a]

    def add(self, a: int, b: int) -> None:
        self.out[a].add(b)
        self.inc[b].add(a)

    def remove(self, a: int, b: int) -> None:
        if b not in self.out[a]:
            raise EdgeNotPresent(f"no edge {{{a},{b}}}")
        self.out[a].discard(b)
        self.inc[b].discard(a)

    def apply(self, edits: Iterable[Edit]) -> None:
        for ed in edits:
            if ed.op == "add":
                self.add(ed.a, ed.b)
            else:
                self.remove(ed.a, ed.b)

    def degree(self, x: int) -> int:
        if self.directed:
            return len(self.out[x]) + len(self.inc[x])
        return len(self.out[x])

    def max_degree(self) -> int:
        if self.directed:
            return max(max(len(s) for s in self.out), max(len(s) for s in self.inc))
        return max(len(s) for s in self.out)

    def parent(self, x: int) -> int:
        return max((y for y in self.inc[x] if y < x), default=0)

    def label_edges(self) -> list[tuple[int, int]]:
        if self.directed:
            return [(a, b) for a in range(1, self.n + 1) for b in self.out[a]]
        return [(a, b) for a in range(1, self.n + 1) for b in self.out[a] if a < b]

    def to_graph(self, d: int | None = None) -> LabeledGraph:
        """Graph with the source's ids and labels and the current edges."""
        src = self.source
        pairs = np.asarray(self.label_edges(), dtype=np.int64).reshape(-1, 2)
        ids = src.inverse[pairs]
        return assemble(self.n, src.d if d is None else d, ids, src.labels[1:], self.directed)


def apply_edits(g: LabeledGraph, edits: Iterable[Edit], d: int | None = None) -> LabeledGraph:
    """Apply label-space edits; the result is validated against bound ``d``."""
    h = EditableGraph(g)
    h.apply(edits)
    bound = g.d if d is None else d
    out = h.to_graph(bound)
    if h.max_degree() > bound:
        raise DegreeBoundExceeded(f"edits push the maximum degree to {h.max_degree()} > {bound}")
    return out


def edit_difference(g: LabeledGraph, h: LabeledGraph) -> list[Edit]:
    """Net symmetric difference between two graphs on the same labels."""
    before, after = g.edge_set, h.edge_set
    removed = sorted(before - after)
    added = sorted(after - before)
    return [Edit("remove", a, b) for a, b in removed] + [Edit("add", a, b) for a, b in added]
