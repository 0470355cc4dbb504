"""Sublinear testers for DFS numberings.

Local conflicts (one of the three gaps at most ``ell``) are caught by short
walks along the would-be DFS order. Global conflicts are caught by sampling
vertices and edges and sweeping their intervals. Every rejection carries a
witness that can be re-checked on the full graph, so valid numberings are
always accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .exact import ACCEPT, OrderViolation, Verdict, Witness, check_by_conflicts, reject, sweepline_conflicts
from .graph import ConflictingPair, LabeledGraph, build_graph
from .navigator import Navigator, Outcome, call_cap
from .oracle import BudgetExhausted, EmptyGraph, GraphOracle

__all__ = [
    "ConflictType",
    "Plan",
    "TesterParams",
    "classify",
    "conflict_types",
    "icbrt",
    "l1_walk",
    "l2_walk",
    "l3_walk",
    "make_plan",
    "test_L1",
    "test_L2",
    "test_L3",
    "test_combined",
    "test_global",
    "test_simple",
]


def icbrt(n: int) -> int:
    """Smallest integer ``k`` with ``k**3 >= n``."""
    k = max(1, round(n ** (1 / 3)))
    while k**3 < n:
        k += 1
    while k > 1 and (k - 1) ** 3 >= n:
        k -= 1
    return k


def _ceil(x: float) -> int:
    # guard against 60 / (1/33) = 1980.0000000000002 style round-off
    return math.ceil(x - 1e-9)


@dataclass(frozen=True)
class TesterParams:
    """Knobs of the testers.

    ``fallback`` switches the exact full read on when the nominal budget of
    the combined tester reaches ``d * n``. ``cube_floor`` raises the global
    sample size to at least ``(d / epsilon) ** 3``.
    """

    epsilon: float = 0.1
    ell: int | None = None
    c_local: float = 60.0
    c_global: float | None = None
    c_simple: float = 6.0
    budget_factor: float = 10.0
    seed: int = 0
    fallback: bool = True
    cube_floor: bool = True

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.ell is not None and self.ell < 1:
            raise ValueError(f"ell must be at least 1, got {self.ell}")
        for name in ("c_local", "c_simple", "budget_factor"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.c_global is not None and self.c_global < 1:
            raise ValueError("c_global must be at least 1")

    @classmethod
    def lean(cls, epsilon: float = 0.1, **kw) -> "TesterParams":
        """Sublinear profile for benchmarks: no exact fallback, no cube floor,
        and a small global constant."""
        kw.setdefault("c_global", 4.0)
        kw.setdefault("fallback", False)
        kw.setdefault("cube_floor", False)
        return cls(epsilon=epsilon, **kw)

    def with_seed(self, seed: int) -> "TesterParams":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class Plan:
    """Sample sizes and query caps resolved for one graph size."""

    n: int
    d: int
    ell: int
    c_global: float
    local_samples: int
    edge_samples: int
    global_samples: int
    global_branch: str
    call_cap: int
    budget_factor: float

    @property
    def walk_cost(self) -> int:
        return self.d * self.d * (self.ell + 1) + 2 * self.d + 2

    def nominal(self, subtest: str) -> int:
        if subtest in ("L1", "L2"):
            return self.local_samples * self.walk_cost
        if subtest == "L3":
            return self.edge_samples * self.walk_cost
        if subtest == "global":
            return 2 * self.global_samples * (self.d + 1)
        raise KeyError(subtest)

    @property
    def total_nominal(self) -> int:
        return sum(self.nominal(s) for s in ("L1", "L2", "L3", "global"))

    def cap(self, subtest: str) -> float:
        return self.budget_factor * self.nominal(subtest)

    @property
    def total_cap(self) -> float:
        return self.budget_factor * self.total_nominal


def make_plan(n: int, d: int, params: TesterParams) -> Plan:
    eps = params.epsilon
    ell = params.ell if params.ell is not None else icbrt(n)
    c_global = params.c_global if params.c_global is not None else math.ceil(10 * math.sqrt(200 * d))
    formula = _ceil(c_global * math.sqrt(n / ell) / eps)
    cube = _ceil((d / eps) ** 3)
    if params.cube_floor and cube > formula:
        s, branch = cube, "cube"
    else:
        s, branch = formula, "formula"
    return Plan(
        n=n,
        d=d,
        ell=ell,
        c_global=c_global,
        local_samples=_ceil(params.c_local / eps),
        edge_samples=_ceil(params.c_local * d / eps),
        global_samples=s,
        global_branch=branch,
        call_cap=call_cap(d, ell),
        budget_factor=params.budget_factor,
    )


# -- conflict types -------------------------------------------------------------


class ConflictType(str, Enum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"
    G = "G"


def conflict_types(pv: int, u: int, v: int, w: int, ell: int) -> frozenset[ConflictType]:
    tags = set()
    if u - pv <= ell and pv != 0:
        tags.add(ConflictType.L1)
    if v - u <= ell:
        tags.add(ConflictType.L2)
    if w - v <= ell:
        tags.add(ConflictType.L3)
    return frozenset(tags) if tags else frozenset({ConflictType.G})


def classify(g: LabeledGraph, pair: ConflictingPair, ell: int) -> frozenset[ConflictType]:
    return conflict_types(int(g.parents[pair.v]), pair.u, pair.v, pair.w, ell)


# -- walks ----------------------------------------------------------------------


def l1_walk(nav: Navigator, v: int, ell: int) -> Witness | None:
    """Walk forward from ``p(v)`` looking for an edge that jumps over ``v``."""
    lv = nav.label(v)
    par = nav.parent(v)
    if not par:
        return None
    expected = nav.label(par)
    if lv - expected < 2:
        return None
    cur = par
    for _ in range(min(ell, lv - expected)):
        r = nav.dfs_next(cur)
        if r.outcome is Outcome.INCONSISTENT:
            return None
        if r.outcome is Outcome.END:
            return OrderViolation(expected, "next", None, anchor=lv)
        cur = r.vertex
        ly = nav.label(cur)
        if ly != expected + 1:
            return OrderViolation(expected, "next", ly)
        if ly >= lv:
            return None
        top = nav.max_forward_label(cur)
        if top > lv:
            return ConflictingPair(lv, ly, top)
        expected = ly
    return None


def l2_walk(nav: Navigator, v: int, ell: int) -> Witness | None:
    """Walk backward from ``v`` while labels stay above ``p(v)``."""
    lv = nav.label(v)
    lp = nav.parent_label(v)
    cur, expected = v, lv
    for _ in range(ell):
        r = nav.dfs_prev(cur)
        if r.outcome is not Outcome.NEXT:
            return None
        cur = r.vertex
        ly = nav.label(cur)
        if ly != expected - 1:
            return OrderViolation(expected, "prev", ly)
        if ly <= lp:
            return None
        top = nav.max_forward_label(cur)
        if top > lv:
            return ConflictingPair(lv, ly, top)
        expected = ly
    return None


def l3_walk(nav: Navigator, w: int, lu: int, lw: int, ell: int) -> Witness | None:
    """Walk backward from ``w`` looking for ``v`` with ``p(v) < u < v < w``."""
    if lw - lu < 2:
        return None
    cur, expected = w, lw
    for _ in range(ell):
        r = nav.dfs_prev(cur)
        if r.outcome is not Outcome.NEXT:
            return None
        cur = r.vertex
        ly = nav.label(cur)
        if ly != expected - 1:
            return OrderViolation(expected, "prev", ly)
        if ly <= lu:
            return None
        if nav.parent_label(cur) < lu:
            return ConflictingPair(ly, lu, lw)
        expected = ly
    return None


# -- subtests -------------------------------------------------------------------


def _within_cap(o: GraphOracle, cap: float, body: Callable[[], Verdict]) -> Verdict:
    """Run ``body`` under a query cap; running out of queries means accept."""
    try:
        with o.limited(cap):
            return body()
    except BudgetExhausted:
        return ACCEPT


def _plan(o: GraphOracle, params: TesterParams) -> Plan:
    return make_plan(o.n, o.d, params)


def test_L1(o: GraphOracle, params: TesterParams, plan: Plan | None = None) -> Verdict:  # noqa: N802
    plan = plan or _plan(o, params)

    def body() -> Verdict:
        for _ in range(plan.local_samples):
            found = l1_walk(Navigator(o, plan.call_cap), o.sample_vertex(), plan.ell)
            if found is not None:
                return reject(found, "L1")
        return ACCEPT

    return _within_cap(o, plan.cap("L1"), body)


def test_L2(o: GraphOracle, params: TesterParams, plan: Plan | None = None) -> Verdict:  # noqa: N802
    plan = plan or _plan(o, params)

    def body() -> Verdict:
        for _ in range(plan.local_samples):
            found = l2_walk(Navigator(o, plan.call_cap), o.sample_vertex(), plan.ell)
            if found is not None:
                return reject(found, "L2")
        return ACCEPT

    return _within_cap(o, plan.cap("L2"), body)


def test_L3(o: GraphOracle, params: TesterParams, plan: Plan | None = None) -> Verdict:  # noqa: N802
    plan = plan or _plan(o, params)

    def body() -> Verdict:
        for _ in range(plan.edge_samples):
            e = o.sample_edge()
            if e.lu >= e.lw:
                continue
            found = l3_walk(Navigator(o, plan.call_cap), e.w, e.lu, e.lw, plan.ell)
            if found is not None:
                return reject(found, "L3")
        return ACCEPT

    return _within_cap(o, plan.cap("L3"), body)


def _interval_sample(o: GraphOracle, s: int) -> ConflictingPair | None:
    nav = Navigator(o)
    vertex_intervals = []
    for _ in range(s):
        v = o.sample_vertex()
        lv = nav.label(v)
        vertex_intervals.append((nav.parent_label(v), lv))
    edge_intervals = []
    try:
        for _ in range(s):
            e = o.sample_edge()
            if e.lu < e.lw:
                edge_intervals.append((e.lu, e.lw))
    except EmptyGraph:
        pass
    return sweepline_conflicts(vertex_intervals, edge_intervals)


def test_global(o: GraphOracle, params: TesterParams, plan: Plan | None = None) -> Verdict:
    plan = plan or _plan(o, params)

    def body() -> Verdict:
        found = _interval_sample(o, plan.global_samples)
        return ACCEPT if found is None else reject(found, "global")

    return _within_cap(o, plan.cap("global"), body)


def _full_read(o: GraphOracle) -> LabeledGraph:
    labels = [o.label(v) for v in range(1, o.n + 1)]
    direction = "out" if o.directed else None
    edges = []
    for v in range(1, o.n + 1):
        for x in o.neighbors(v, direction):
            if o.directed or v < x:
                edges.append((v, x))
    return build_graph(o.n, o.d, edges, labels, o.directed)


def exact_via_oracle(o: GraphOracle) -> Verdict:
    """Read the whole graph through the oracle and decide exactly."""
    try:
        g = _full_read(o)
    except BudgetExhausted:
        return ACCEPT
    v = check_by_conflicts(g)
    return v if v.accepted else reject(v.witness, "exact")


SUBTESTS = (("L1", test_L1), ("L2", test_L2), ("L3", test_L3), ("global", test_global))


def test_combined(o: GraphOracle, params: TesterParams) -> Verdict:
    """Local walks, then the global sample; reject on the first witness.

    With ``params.fallback`` set and a nominal budget of at least ``d * n``
    queries, the graph is read in full and checked exactly instead.
    """
    plan = _plan(o, params)
    if params.fallback and plan.total_nominal >= o.d * o.n:
        return exact_via_oracle(o)
    for _, run in SUBTESTS:
        try:
            verdict = run(o, params, plan)
        except EmptyGraph:
            continue  # no edges, so no edge to sample and nothing to find
        if verdict.rejected:
            return verdict
    return ACCEPT


def simple_samples(n: int, params: TesterParams) -> int:
    return _ceil(params.c_simple * math.sqrt(n / params.epsilon))


def test_simple(o: GraphOracle, params: TesterParams) -> Verdict:
    """Sample about ``sqrt(n / epsilon)`` vertices and edges and sweep them."""
    s = simple_samples(o.n, params)

    def body() -> Verdict:
        found = _interval_sample(o, s)
        return ACCEPT if found is None else reject(found, "simple")

    return _within_cap(o, params.budget_factor * 2 * s * (o.d + 1), body)


TESTERS: dict[str, Callable[[GraphOracle, TesterParams], Verdict]] = {
    "combined": test_combined,
    "simple": test_simple,
    "l1": test_L1,
    "l2": test_L2,
    "l3": test_L3,
    "global": test_global,
}

TesterParams.__test__ = False  # type: ignore[attr-defined]
for _f in (test_L1, test_L2, test_L3, test_global, test_combined, test_simple):
    _f.__test__ = False  # type: ignore[attr-defined]
