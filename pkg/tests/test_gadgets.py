import collections
import math
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dfs_certify.exact import check_by_conflicts
from dfs_certify.gadgets import (
    ARM_SPECS,
    CannotPlant,
    Family,
    TooSmall,
    distinguisher_game,
    farness_certificate,
    floor_cbrt,
    full_budget,
    gen_bad,
    gen_chain,
    gen_good,
    gen_random_valid,
    perturb,
    quadruples,
    skeleton,
    wilson_interval,
)
from dfs_certify.graph import build_graph, conflict_matching, enumerate_conflicts, is_conflicting_pair
from dfs_certify.tester import ConflictType, TesterParams, classify


def _seed_with(arm_types, n=64, N=4):
    return next(s for s in range(200) if gen_bad(n, N, s).meta["arm_types"] == arm_types)


class TestArms:
    @pytest.mark.parametrize("name", sorted(ARM_SPECS))
    @pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
    def test_arm_is_a_tree_on_8N_vertices(self, name, N):
        e = ARM_SPECS[name].edges(N)
        t = nx.Graph()
        t.add_nodes_from(range(1, 8 * N + 1))
        t.add_edges_from(e.tolist())
        assert nx.is_tree(t)
        assert max(dict(t.degree).values()) <= 3
        ok = build_graph(8 * N, 3, e.tolist())
        assert check_by_conflicts(ok).accepted == (name != "B2")

    def test_comb_matching(self):
        e = {tuple(x) for x in ARM_SPECS["B2"].edges(4).tolist()}
        # tooth 7N - k + 1 hangs from 2N + k; tooth 8N - k + 1 from 4N + k
        for k in range(1, 5):
            assert (8 + k, 28 - k + 1) in e
            assert (16 + k, 32 - k + 1) in e


class TestSkeleton:
    def test_figure_sizes(self):
        sk = skeleton(64, 4)
        assert sk.arms == 2
        assert sk.offsets.tolist() == [1, 33]
        assert sk.total == 65

    def test_tree_labels(self):
        inst = gen_good(64, 4, 0)
        g = inst.graph
        roots = {off + 1 for off in inst.meta["offsets"]}
        arm_labels = {off + i for off in inst.meta["offsets"] for i in range(1, 33)}
        tree = sorted(set(range(1, g.n + 1)) - arm_labels | roots)
        assert [x for x in tree if x not in roots] == [1]
        assert sorted(roots) == [2, 34]

    def test_tail_path(self):
        sk = skeleton(100, 4)  # three arms of 32 plus two tree nodes
        assert sk.total == 100
        assert sk.arms == 3

    def test_too_small(self):
        with pytest.raises(TooSmall):
            gen_good(63, 4)
        with pytest.raises(TooSmall):
            gen_bad(10, 1)


class TestGood:
    @given(st.integers(1, 12), st.integers(2, 6), st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_always_valid(self, N, mult, seed):
        inst = gen_good(16 * N * mult, N, seed)
        assert check_by_conflicts(inst.graph).accepted
        assert inst.family is Family.GOOD

    def test_arm_size(self):
        assert ARM_SPECS["G1"].edges(4).max() == 32

    def test_permuted_ids_keep_validity(self):
        inst = gen_good(512, 8, 3, permute=True)
        assert check_by_conflicts(inst.graph).accepted
        assert inst.graph.labels[1:].tolist() != list(range(1, inst.graph.n + 1))


class TestBad:
    def test_quadruple_from_figure(self):
        inst = gen_bad(64, 4, _seed_with(["B2", "B2"]))
        assert (11, 28, 19, 32) in quadruples(inst)

    def test_quadruples_are_conflicts(self):
        inst = gen_bad(1024, 8, 4)
        g = inst.graph
        quads = quadruples(inst)
        assert len(quads) == inst.meta["b2_arms"] * 8
        for a, b, c, e in quads:
            assert g.has_label_edge(a, b) and g.has_label_edge(c, e)
            assert is_conflicting_pair(g, b, (c, e))

    @given(st.integers(2, 10), st.integers(0, 10**6))
    @settings(max_examples=30)
    def test_rejects_iff_b2(self, N, seed):
        inst = gen_bad(32 * N, N, seed)
        assert check_by_conflicts(inst.graph).rejected == (inst.meta["b2_arms"] > 0)

    def test_matching_per_b2_arm(self):
        inst = gen_bad(64, 4, _seed_with(["B2", "B2"]))
        assert len(conflict_matching(inst.graph)) >= 2 * 4

    def test_certificate_ratio(self):
        for seed in range(10):
            inst = gen_bad(1 << 14, 25, seed)
            assert farness_certificate(inst) / inst.graph.n >= 1 / 33


class TestIndistinguishability:
    @staticmethod
    def _ball_types(inst, count, rng):
        g = inst.graph
        N = inst.meta["N"]
        r = N // 2
        adj = [g.neighbors(v).tolist() for v in range(g.n + 1)]
        joints = set()
        arm_of = {}
        for off, name in zip(inst.meta["offsets"], inst.meta["arm_types"]):
            for i in range(8):
                joints.update((off + i * N + 1, off + (i + 1) * N))
            for x in range(off + 1, off + 8 * N + 1):
                arm_of[x] = (off, name)
        centers = sorted(arm_of)
        cache = {}
        types = collections.Counter()
        while sum(types.values()) < count:
            c = rng.choice(centers)
            dist = {c: 0}
            queue = [c]
            for x in queue:
                if dist[x] < r:
                    for y in adj[x]:
                        if y not in dist:
                            dist[y] = dist[x] + 1
                            queue.append(y)
            if sum(x in joints for x in dist) > 1:
                continue
            off, name = arm_of[c]
            inside = all(off < x <= off + 8 * N for x in dist)
            key = (name, c - off) if inside else None
            if key not in cache or key is None:
                h = nx.Graph()
                h.add_nodes_from((x, {"center": str(x == c)}) for x in dist)
                h.add_edges_from((x, y) for x in dist for y in adj[x] if y in dist and x < y)
                digest = nx.weisfeiler_lehman_graph_hash(h, node_attr="center", iterations=r)
                if key is None:
                    types[digest] += 1
                    continue
                cache[key] = digest
            types[cache[key]] += 1
        return types

    def test_ball_types_match(self):
        rng = random.Random(0)
        n, N, count = 1 << 15, 32, 10_000
        good = self._ball_types(gen_good(n, N, 1), count, rng)
        bad = self._ball_types(gen_bad(n, N, 2), count, rng)
        tv = sum(abs(good[k] - bad[k]) for k in set(good) | set(bad)) / (2 * count)
        assert tv <= 0.05


class TestRandomValid:
    @given(st.integers(1, 200), st.integers(2, 8), st.integers(0, 10**6), st.booleans())
    def test_valid_and_bounded(self, n, d, seed, directed):
        g = gen_random_valid(n, d, seed, directed=directed).graph
        assert check_by_conflicts(g).accepted
        if directed:
            assert np.diff(g.out_ptr).max(initial=0) <= d and np.diff(g.in_ptr).max(initial=0) <= d
        else:
            assert g.degrees()[1:].max(initial=0) <= d

    def test_singleton(self):
        g = gen_random_valid(1, 3, 0).graph
        assert g.n == 1 and g.labels[1] == 1

    def test_degree_histogram(self):
        for seed in range(1000):
            g = gen_random_valid(30, 3, seed).graph
            assert g.degrees()[1:].max(initial=0) <= 3

    def test_bad_d(self):
        with pytest.raises(ValueError):
            gen_random_valid(10, 1)


class TestPerturb:
    def test_single_l2_on_chain(self):
        inst = perturb(gen_chain(1000, 3), 1, "L2", seed=0)
        cs = enumerate_conflicts(inst.graph)
        assert len(cs) == 1
        assert classify(inst.graph, cs[0], 10) == {ConflictType.L2}
        assert inst.meta["ell"] == 10

    @pytest.mark.parametrize("kind", ["L1", "L2", "L3", "G"])
    def test_matching_refinds_planted(self, kind):
        inst = perturb(gen_chain(2000, 3), 20, kind, seed=7)
        g = inst.graph
        planted = inst.meta["planted"]
        assert len(planted) == 20
        assert len(conflict_matching(g)) >= 20
        cs = enumerate_conflicts(g)
        assert cs == planted
        for c in cs:
            assert classify(g, c, inst.meta["ell"]) == {ConflictType(kind)}

    def test_global_gaps(self):
        inst = perturb(gen_chain(3000, 3), 10, "G", seed=2)
        ell = inst.meta["ell"]
        for c in inst.meta["planted"]:
            pv = int(inst.graph.parents[c.v])
            assert c.u - pv > ell and c.v - c.u > ell and c.w - c.v > ell

    def test_errors(self):
        with pytest.raises(CannotPlant):
            perturb(gen_chain(50, 3), 6, "L1")
        with pytest.raises(CannotPlant):
            perturb(gen_chain(30, 3), 1, "G", ell=20)


class TestCertificate:
    def test_examples(self, ga):
        from dfs_certify.gadgets import Instance

        assert farness_certificate(Instance(ga, Family.PERTURBED)) >= 1
        assert farness_certificate(gen_good(256, 4, 0)) == 0
        assert farness_certificate(gen_random_valid(200, 4, 0)) == 0

    def test_bad_bound(self):
        inst = gen_bad(64, 4, _seed_with(["B2", "B2"]))
        assert farness_certificate(inst) >= 2 * math.ceil(4 / 2)


class TestGame:
    def test_tiny_budget_is_a_coin_flip(self):
        res = distinguisher_game(n=512, budget=1, trials=1000, seed=1)
        assert abs(res.success - 0.5) <= 0.05
        assert res.low <= res.success <= res.high

    def test_full_budget(self):
        res = distinguisher_game(n=4096, trials=40, seed=2, params=TesterParams.lean(0.2))
        assert res.budget == full_budget(4096, 16, TesterParams.lean(0.2))
        assert res.success >= 0.75
        for rec in res.records:
            assert not rec.rejected or rec.bad  # never rejects a good instance

    def test_wilson(self):
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-9

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            distinguisher_game(n=512, budget=0, trials=1)

    def test_floor_cbrt(self):
        assert [floor_cbrt(x) for x in (1, 7, 8, 9, 1 << 18)] == [1, 1, 2, 2, 64]
