"""Instance generators and the distinguishing game.

Good and bad lower-bound instances share one skeleton: a binary tree whose
leaves are the roots of ``floor(n / 8N)`` arms of ``8N`` vertices each. An arm
is cut into eight segments of ``N`` consecutive relative labels. A segment is
either a path or a set of teeth, where tooth ``N - k + 1`` of the segment
hangs from vertex ``k`` of a base segment. Good arms are G1/G2 and bad arms
are B1/B2. Only B2 numbers its vertices inconsistently. Each local feature of
the arms (where a comb sits, where a side path joins, where the backbone
ends) occurs in one good and one bad arm type, so small neighborhoods have
the same distribution in both families.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .exact import ACCEPT, Verdict
from .graph import (
    ConflictingPair,
    DirectedUnsupported,
    EditableGraph,
    LabeledGraph,
    assemble,
    conflict_matching,
    permute_ids,
)
from .oracle import BudgetExhausted, GraphOracle
from .tester import ConflictType, TesterParams, conflict_types, icbrt, make_plan, test_combined


class TooSmall(ValueError):
    pass


class CannotPlant(RuntimeError):
    pass


class Family(str, Enum):
    GOOD = "Good"
    BAD = "Bad"
    RANDOM_VALID = "RandomValid"
    PERTURBED = "Perturbed"
    CHAIN = "Chain"


@dataclass(frozen=True)
class Instance:
    graph: LabeledGraph
    family: Family
    meta: dict = field(default_factory=dict)


# -- arms -----------------------------------------------------------------------


@dataclass(frozen=True)
class PathSeg:
    """Segment whose vertices form a path in label order.

    The first vertex hangs from the previous label, or from the last vertex of
    segment ``attach`` when given. Segment 0 starts at the arm root.
    """

    attach: int | None = None


@dataclass(frozen=True)
class TeethSeg:
    """Segment of leaves: tooth ``N - k + 1`` hangs from vertex ``k`` of ``base``."""

    base: int


@dataclass(frozen=True)
class ArmSpec:
    name: str
    segments: tuple

    def __post_init__(self):
        if len(self.segments) != 8:
            raise ValueError("an arm has exactly eight segments")

    def edges(self, N: int) -> np.ndarray:
        """Edges over relative labels ``1..8N`` (arm root is label 1)."""
        parts = []
        k = np.arange(1, N + 1)
        for i, seg in enumerate(self.segments):
            first = i * N + 1
            if isinstance(seg, PathSeg):
                if i > 0:
                    hook = first - 1 if seg.attach is None else (seg.attach + 1) * N
                    parts.append(np.array([[hook, first]]))
                if N > 1:
                    run = np.arange(first, first + N - 1)
                    parts.append(np.stack([run, run + 1], axis=1))
            else:
                base = seg.base * N + k
                tooth = i * N + (N - k + 1)
                parts.append(np.stack([base, tooth], axis=1))
        return np.concatenate(parts).astype(np.int64)


_P = PathSeg()
ARM_SPECS = {
    "G1": ArmSpec("G1", (_P, _P, _P, _P, _P, _P, TeethSeg(2), PathSeg(attach=0))),
    "G2": ArmSpec("G2", (_P, _P, _P, _P, _P, _P, _P, TeethSeg(4))),
    "B1": ArmSpec("B1", (_P, _P, _P, _P, _P, _P, _P, PathSeg(attach=0))),
    "B2": ArmSpec("B2", (_P, _P, _P, _P, _P, _P, TeethSeg(2), TeethSeg(4))),
}
GOOD_ARMS = ("G1", "G2")
BAD_ARMS = ("B1", "B2")


@lru_cache(maxsize=64)
def _arm_template(name: str, N: int) -> np.ndarray:
    t = ARM_SPECS[name].edges(N)
    t.setflags(write=False)
    return t


@dataclass(frozen=True)
class Skeleton:
    total: int
    arms: int
    offsets: np.ndarray  # label offset of each arm; its root has label offset + 1
    tree_edges: np.ndarray


@lru_cache(maxsize=16)
def skeleton(n: int, N: int) -> Skeleton:
    """Binary tree over the arm roots plus a tail path for leftover labels.

    Labels follow a DFS that visits a tree node, then its left subtree, then
    its right subtree; a leaf of the tree is an arm root and its whole arm is
    numbered before moving on. When ``8N * A + A - 1`` exceeds ``n`` the
    instance keeps all arms and has that many vertices instead.
    """
    if N < 1 or n < 16 * N:
        raise TooSmall(f"need n >= 16N (n={n}, N={N})")
    arm_count = n // (8 * N)
    offsets: list[int] = []
    edges: list[tuple[int, int]] = []
    nxt = 1

    # iterative pre-order over (count) nodes; a node with count 1 is an arm
    stack: list[tuple[int, int]] = [(arm_count, 0)]
    while stack:
        count, parent = stack.pop()
        here = nxt
        if parent:
            edges.append((parent, here))
        if count == 1:
            offsets.append(here - 1)
            nxt += 8 * N
        else:
            nxt += 1
            left = (count + 1) // 2
            stack.append((count - left, here))
            stack.append((left, here))
    total = nxt - 1
    if total < n:
        tail = np.arange(total + 1, n + 1)
        edges.append((1, total + 1))
        edges.extend(zip(tail[:-1].tolist(), tail[1:].tolist()))
        total = n
    off = np.asarray(offsets, dtype=np.int64)
    te = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    off.setflags(write=False)
    te.setflags(write=False)
    return Skeleton(total, arm_count, off, te)


def _lower_bound(
    n: int, N: int, bad: bool, rng: np.random.Generator, permute: bool
) -> Instance:
    sk = skeleton(n, N)
    names = BAD_ARMS if bad else GOOD_ARMS
    pick = rng.integers(0, 2, size=sk.arms)
    parts = [sk.tree_edges]
    for j, name in enumerate(names):
        offs = sk.offsets[pick == j]
        if len(offs):
            tmpl = _arm_template(name, N)
            parts.append((tmpl[None, :, :] + offs[:, None, None]).reshape(-1, 2))
    edges = np.concatenate(parts)
    g = assemble(sk.total, 3, edges, np.arange(1, sk.total + 1))
    if permute:
        g = permute_ids(g, rng)
    arm_types = [names[j] for j in pick.tolist()]
    meta = {
        "n": n,
        "N": N,
        "arms": sk.arms,
        "arm_types": arm_types,
        "offsets": sk.offsets.tolist(),
        "b2_arms": arm_types.count("B2"),
    }
    return Instance(g, Family.BAD if bad else Family.GOOD, meta)


def gen_good(n: int, N: int, seed: int = 0, permute: bool = False) -> Instance:
    """Good lower-bound instance: every arm is G1 or G2 by a fair coin."""
    inst = _lower_bound(n, N, False, np.random.default_rng(seed), permute)
    inst.meta["seed"] = seed
    return inst


def gen_bad(n: int, N: int, seed: int = 0, permute: bool = False) -> Instance:
    """Bad lower-bound instance: every arm is B1 or B2 by a fair coin."""
    inst = _lower_bound(n, N, True, np.random.default_rng(seed), permute)
    inst.meta["seed"] = seed
    return inst


def quadruples(inst: Instance) -> list[tuple[int, int, int, int]]:
    """Label quadruples ``(2N+k, 7N-k+1, 4N+k, 8N-k+1)`` of every B2 arm."""
    N = inst.meta["N"]
    out = []
    for name, off in zip(inst.meta["arm_types"], inst.meta["offsets"]):
        if name == "B2":
            for k in range(1, N + 1):
                out.append((off + 2 * N + k, off + 7 * N - k + 1, off + 4 * N + k, off + 8 * N - k + 1))
    return out


# -- random valid instances -----------------------------------------------------


def dfs_labels(n: int, adj: list[list[int]], rng: random.Random) -> list[int]:
    """Discovery numbers of a DFS with random root order and neighbor order.

    ``adj[v]`` lists the vertices reachable by one step from ``v`` (out-arcs
    for directed graphs). Returns ``labels[v - 1]`` for ``v = 1..n``.
    """
    label = [0] * (n + 1)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    for row in adj:
        rng.shuffle(row)
    nxt = 1
    for r in order:
        if label[r]:
            continue
        label[r] = nxt
        nxt += 1
        stack = [(r, iter(adj[r]))]
        while stack:
            for x in stack[-1][1]:
                if not label[x]:
                    label[x] = nxt
                    nxt += 1
                    stack.append((x, iter(adj[x])))
                    break
            else:
                stack.pop()
    return label[1:]


def random_bounded_edges(
    n: int, d: int, m: int, rng: random.Random, directed: bool = False
) -> list[tuple[int, int]]:
    """Up to ``m`` random edges keeping every degree at most ``d``."""
    out_deg = [0] * (n + 1)
    in_deg = out_deg if not directed else [0] * (n + 1)
    seen: set[tuple[int, int]] = set()
    edges = []
    tries = 0
    rnd = rng.random
    while len(edges) < m and tries < 20 * m + 100:
        tries += 1
        a = int(rnd() * n) + 1
        b = int(rnd() * n) + 1
        if a == b or out_deg[a] >= d or in_deg[b] >= d:
            continue
        key = (a, b) if directed or a < b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        edges.append(key)
        out_deg[a] += 1
        in_deg[b] += 1
    return edges


def gen_random_valid(
    n: int,
    d: int,
    seed: int = 0,
    density: float | None = None,
    directed: bool = False,
) -> Instance:
    """Random bounded-degree graph numbered by an actual DFS run.

    ``density`` is the fraction of the ``n * d / 2`` edge slots to fill
    (drawn from [0.3, 0.9] when omitted).
    """
    if d < 2:
        raise ValueError("gen_random_valid needs d >= 2")
    rng = random.Random(seed)
    if density is None:
        density = 0.3 + 0.6 * rng.random()
    m = int(density * n * d / 2)
    edges = random_bounded_edges(n, d, m, rng, directed)
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for a, b in edges:
        adj[a].append(b)
        if not directed:
            adj[b].append(a)
    labels = dfs_labels(n, adj, rng)
    g = assemble(n, d, np.asarray(edges, dtype=np.int64).reshape(-1, 2), np.asarray(labels), directed)
    return Instance(g, Family.RANDOM_VALID, {"seed": seed, "density": density})


def gen_chain(n: int, d: int = 3) -> Instance:
    """Path ``1 - 2 - ... - n`` with identity labels."""
    run = np.arange(1, n)
    g = assemble(n, d, np.stack([run, run + 1], axis=1), np.arange(1, n + 1))
    return Instance(g, Family.CHAIN, {})


# -- planting -------------------------------------------------------------------


_GAP_PLAN = {
    ConflictType.L1: ("small", "big", "big"),
    ConflictType.L2: ("big", "small", "big"),
    ConflictType.L3: ("big", "big", "small"),
    ConflictType.G: ("big", "big", "big"),
}


def _vertex_conflicts(h: EditableGraph, z: int) -> list[tuple[int, int]]:
    pz = h.parent(z)
    return [(a, b) for a in range(pz + 1, z) for b in h.out[a] if b > z]


def _edge_conflicts(h: EditableGraph, a: int, b: int) -> list[int]:
    return [z for z in range(a + 1, b) if h.parent(z) < a]


def perturb(
    inst: Instance,
    k: int,
    kind: ConflictType | str,
    seed: int = 0,
    ell: int | None = None,
    max_attempts: int | None = None,
) -> Instance:
    """Plant ``k`` disjoint conflicts of one type into a valid instance.

    Each planting picks labels ``x < u < v < w`` with gaps sized against
    ``ell`` so the type is pure. It rewires ``v`` to hang from ``x`` and adds
    the edge ``{u, w}``. A planting is kept only if ``(v, {u, w})`` is the
    single conflict it creates; regions of different plantings do not touch.
    Path-like bases such as :func:`gen_chain` accept almost every candidate.
    Bushy DFS trees reject most of them, since labels inside ``(u, w)`` tend
    to hang from vertices below ``u``.
    """
    g = inst.graph
    kind = ConflictType(kind)
    if g.directed:
        raise DirectedUnsupported("planting works on undirected graphs")
    n, d = g.n, g.d
    if k > n // 10:
        raise CannotPlant(f"k={k} exceeds n/10 for n={n}")
    ell = ell if ell is not None else icbrt(n)
    ranges = {"small": (1, ell), "big": (ell + 1, 2 * ell)}
    rng = random.Random(seed)
    h = EditableGraph(g)
    used: list[tuple[int, int]] = []
    planted: list[ConflictingPair] = []
    limit = max_attempts if max_attempts is not None else 400 * k + 2000
    attempts = 0
    while len(planted) < k:
        attempts += 1
        if attempts > limit:
            raise CannotPlant(f"planted {len(planted)} of {k} after {limit} attempts")
        g1, g2, g3 = (rng.randint(*ranges[r]) for r in _GAP_PLAN[kind])
        span = g1 + g2 + g3
        if span >= n:
            raise CannotPlant(f"n={n} is too small for gaps of size {span}")
        x = rng.randint(1, n - span)
        u, v, w = x + g1, x + g1 + g2, x + span
        if any(not (w + 1 < a or b + 1 < x) for a, b in used):
            continue
        if h.has(u, w):
            continue
        drop = [y for y in h.out[v] if x < y < v]
        add_xv = not h.has(x, v)
        if (
            len(h.out[x]) + add_xv > d
            or len(h.out[u]) + 1 > d
            or len(h.out[w]) + 1 > d
            or len(h.out[v]) - len(drop) + add_xv > d
        ):
            continue
        for y in drop:
            h.remove(y, v)
        if add_xv:
            h.add(x, v)
        h.add(u, w)
        ok = (
            _vertex_conflicts(h, v) == [(u, w)]
            and not _vertex_conflicts(h, w)
            and not _edge_conflicts(h, x, v)
            and _edge_conflicts(h, u, w) == [v]
            and conflict_types(x, u, v, w, ell) == frozenset({kind})
        )
        if not ok:
            h.remove(u, w)
            if add_xv:
                h.remove(x, v)
            for y in drop:
                h.add(y, v)
            continue
        used.append((x, w))
        planted.append(ConflictingPair(v, u, w))
    meta = {
        "base": inst.family.value,
        "kind": kind.value,
        "ell": ell,
        "planted": sorted(planted),
        "seed": seed,
    }
    return Instance(h.to_graph(), Family.PERTURBED, meta)


# -- certificates -----------------------------------------------------------------


def farness_certificate(inst: Instance) -> int:
    """Certified lower bound on the edits needed to make the numbering valid.

    A maximum matching ``M`` of the conflict graph forces ``|M|`` edits: each
    matched pair ``(v, {u, w})`` needs either ``{u, w}`` removed or a new edge
    ``{x, v}`` with ``p(v) < x < v``, and no single edit serves two matched
    pairs because matched pairs share neither the edge nor the vertex ``v``.
    For bad lower-bound instances the per-arm bound ``ceil(N/2)`` for every
    B2 arm is also available; the larger bound is returned.
    """
    bound = len(conflict_matching(inst.graph))
    if inst.family is Family.BAD:
        bound = max(bound, inst.meta["b2_arms"] * math.ceil(inst.meta["N"] / 2))
    return bound


# -- game -------------------------------------------------------------------------


def floor_cbrt(n: int) -> int:
    k = icbrt(n)
    return k if k**3 == n else k - 1


@dataclass(frozen=True)
class GameTrial:
    trial: int
    bad: bool
    rejected: bool
    queries: int


@dataclass(frozen=True)
class GameResult:
    success: float
    low: float
    high: float
    trials: int
    budget: int
    records: list


def full_budget(n: int, N: int, params: TesterParams) -> int:
    """Query cap of the combined tester on lower-bound instances of size ``n``."""
    total = skeleton(n, N).total
    return math.ceil(make_plan(total, 3, params).total_cap)


def wilson_interval(successes: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(successes, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


def distinguisher_game(
    tester: Callable[[GraphOracle, TesterParams], Verdict] = test_combined,
    n: int = 1 << 12,
    N: int | None = None,
    budget: int | None = None,
    trials: int = 100,
    seed: int = 0,
    params: TesterParams | None = None,
) -> GameResult:
    """Estimate how often a budgeted tester tells G_n from B_n.

    Each trial flips a fair bit, draws the matching family with freshly
    permuted vertex ids, and guesses "bad" exactly when the tester rejects.
    ``budget=None`` gives the tester its full combined cap.
    """
    N = N if N is not None else floor_cbrt(n)
    params = params or TesterParams.lean()
    cap = budget if budget is not None else full_budget(n, N, params)
    if cap < 1:
        raise ValueError("budget must be at least 1")
    seqs = np.random.SeedSequence(seed).spawn(trials)
    wins = 0
    records = []
    for t, ss in enumerate(seqs):
        rng = np.random.default_rng(ss)
        bad = bool(rng.integers(0, 2))
        inst = _lower_bound(n, N, bad, rng, permute=True)
        oracle = GraphOracle(inst.graph, seed=int(rng.integers(0, 2**63 - 1)), budget=cap)
        try:
            verdict = tester(oracle, params)
        except BudgetExhausted:
            verdict = ACCEPT
        rejected = verdict.rejected
        wins += rejected == bad
        records.append(GameTrial(t, bad, rejected, oracle.total))
    lo, hi = wilson_interval(wins, trials)
    return GameResult(wins / trials, lo, hi, trials, cap, records)
