import math

import pytest
from hypothesis import given, settings, strategies as st

from dfs_certify.exact import OrderViolation, check_by_conflicts, validate_witness
from dfs_certify.gadgets import farness_certificate, gen_bad, gen_chain, gen_good, gen_random_valid, perturb
from dfs_certify.graph import ConflictingPair, build_graph
from dfs_certify.navigator import Navigator
from dfs_certify.oracle import EmptyGraph, GraphOracle
from dfs_certify.tester import (
    TESTERS,
    ConflictType,
    TesterParams,
    classify,
    conflict_types,
    icbrt,
    l1_walk,
    l2_walk,
    l3_walk,
    make_plan,
    simple_samples,
    test_combined,
    test_global,
    test_L1,
    test_L2,
    test_L3,
    test_simple,
)
from strategies import valid_graphs

LEAN = TesterParams.lean(0.2)
ALL = [test_L1, test_L2, test_L3, test_global, test_combined, test_simple]


class TestParams:
    def test_defaults(self):
        p = TesterParams()
        assert (p.c_local, p.budget_factor, p.fallback, p.cube_floor) == (60.0, 10.0, True, True)
        plan = make_plan(1000, 3, p)
        assert plan.ell == 10
        assert plan.c_global == math.ceil(10 * math.sqrt(600))
        assert plan.local_samples == 600 and plan.edge_samples == 1800

    def test_sample_size_roundoff(self):
        assert make_plan(32768, 3, TesterParams(epsilon=1 / 33)).local_samples == 1980

    def test_cube_branch(self):
        plan = make_plan(1000, 3, TesterParams(epsilon=0.1))
        assert plan.global_branch == "cube" and plan.global_samples == 27000
        plan = make_plan(1000, 3, TesterParams(epsilon=0.1, cube_floor=False))
        assert plan.global_branch == "formula"
        assert plan.global_samples == math.ceil(245 * math.sqrt(100) / 0.1)

    @pytest.mark.parametrize("kw", [{"epsilon": 0}, {"epsilon": 1}, {"ell": 0}, {"c_local": 0.5}, {"c_global": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            TesterParams(**kw)

    def test_icbrt(self):
        assert [icbrt(x) for x in (1, 7, 8, 9, 27, 1000, 1001, 32768)] == [1, 2, 2, 3, 3, 10, 11, 32]


class TestConflictTypes:
    def test_tags(self):
        assert conflict_types(1, 2, 3, 4, 1) == {ConflictType.L1, ConflictType.L2, ConflictType.L3}
        assert conflict_types(0, 2, 10, 20, 3) == {ConflictType.G}
        assert conflict_types(0, 9, 10, 20, 3) == {ConflictType.L2}
        assert conflict_types(5, 7, 20, 40, 3) == {ConflictType.L1}
        assert conflict_types(0, 1, 20, 22, 3) == {ConflictType.L3}

    def test_classify(self, ga):
        assert ConflictType.L1 in classify(ga, ConflictingPair(3, 2, 4), 2)


class TestWalks:
    def test_l1_ga(self, ga):
        nav = Navigator(GraphOracle(ga))
        assert l1_walk(nav, 3, 2) == ConflictingPair(3, 2, 4)

    def test_l2_ga(self, ga):
        # walking back from 3 lands on 4 (tree order 1, 2, 4, 3)
        w = l2_walk(Navigator(GraphOracle(ga)), 3, 1)
        assert w == OrderViolation(3, "prev", 4)
        assert validate_witness(ga, w)

    def test_l3_ga(self, ga):
        w = l3_walk(Navigator(GraphOracle(ga)), 4, 2, 4, 1)
        assert w == OrderViolation(4, "prev", 2)
        assert validate_witness(ga, w)

    def test_l3_finds_pair_on_consistent_order(self):
        # labels 1..5 on a path plus the edge {2, 5}; p(3) = 2 so v=3 is safe,
        # but with vertex 4 hanging from 1 the pair (4, {2, 5}) is a conflict
        g = build_graph(5, 3, [(1, 2), (2, 3), (1, 4), (4, 5), (2, 5)])
        w = l3_walk(Navigator(GraphOracle(g)), 5, 2, 5, 3)
        assert w is not None and validate_witness(g, w)

    def test_directed_walks(self):
        g = build_graph(4, 2, [(1, 2), (1, 3), (2, 4)], directed=True)
        assert l1_walk(Navigator(GraphOracle(g)), 3, 2) == ConflictingPair(3, 2, 4)

    @given(valid_graphs(max_n=50))
    def test_walks_silent_on_valid(self, g):
        o = GraphOracle(g)
        for v in range(1, g.n + 1):
            assert l1_walk(Navigator(o), v, 5) is None
            assert l2_walk(Navigator(o), v, 5) is None
        for a, b in g.edges().tolist():
            la, lb = int(g.labels[a]), int(g.labels[b])
            if la > lb:
                a, b, la, lb = b, a, lb, la
            assert l3_walk(Navigator(o), b, la, lb, 5) is None


class TestOneSided:
    @given(valid_graphs(max_n=120), st.integers(0, 1000))
    @settings(max_examples=40)
    def test_valid_always_accepted(self, g, seed):
        for params in (LEAN, TesterParams(epsilon=0.3)):
            for run in ALL:
                if run is test_L3 and g.num_edges == 0:
                    with pytest.raises(EmptyGraph):
                        run(GraphOracle(g, seed=seed), params)
                    continue
                assert run(GraphOracle(g, seed=seed), params).accepted

    def test_good_instances(self):
        for seed in range(5):
            g = gen_good(2048, 8, seed, permute=True).graph
            for run in ALL:
                assert run(GraphOracle(g, seed=seed), LEAN).accepted

    def test_directed_valid(self):
        for seed in range(20):
            g = gen_random_valid(300, 3, seed, directed=True).graph
            assert check_by_conflicts(g).accepted
            for run in ALL:
                assert run(GraphOracle(g, seed=seed), LEAN).accepted


class TestRejection:
    def test_witnesses_validate(self):
        g = gen_bad(4096, 16, 2).graph
        seen = 0
        for seed in range(30):
            for run in ALL:
                v = run(GraphOracle(g, seed=seed), LEAN)
                if v.rejected:
                    seen += 1
                    assert validate_witness(g, v.witness), v
        assert seen > 0

    def test_fallback_reads_everything(self, ga):
        o = GraphOracle(ga)
        v = test_combined(o, TesterParams())
        assert v.rejected and v.source == "exact"
        assert v.witness == ConflictingPair(3, 2, 4)

    @pytest.mark.parametrize(
        "kind,run", [("L1", test_L1), ("L2", test_L2), ("L3", test_L3)]
    )
    def test_local_rates(self, kind, run):
        # an L-type matching of size at least eps * n / 30
        eps, n = 0.1, 1000
        k = math.ceil(eps * n / 30)
        inst = perturb(gen_chain(n, 3), k, kind, seed=1)
        params = TesterParams(epsilon=eps)
        rejected = 0
        for seed in range(300):
            v = run(GraphOracle(inst.graph, seed=seed), params)
            if v.rejected:
                assert validate_witness(inst.graph, v.witness)
                rejected += 1
        assert rejected >= 200

    def test_global_rate(self):
        eps, n = 0.1, 1000
        inst = perturb(gen_chain(n, 3), math.ceil(eps * n / 10), "G", seed=1)
        params = TesterParams(epsilon=eps, cube_floor=False)
        hits = sum(test_global(GraphOracle(inst.graph, seed=s), params).rejected for s in range(150))
        assert hits >= 135

    def test_simple_rate(self):
        # lower-bound bad instances are 1/33-far by their certificate
        inst = gen_bad(4096, 16, 1)
        assert farness_certificate(inst) >= inst.graph.n / 33
        params = TesterParams(epsilon=1 / 33)
        hits = sum(test_simple(GraphOracle(inst.graph, seed=s), params).rejected for s in range(200))
        assert hits >= 134


class TestAccounting:
    @pytest.mark.parametrize("family", ["good", "bad"])
    def test_total_within_cap(self, family):
        maker = gen_good if family == "good" else gen_bad
        g = maker(4096, 16, 0).graph
        plan = make_plan(g.n, g.d, LEAN)
        for seed in range(10):
            o = GraphOracle(g, seed=seed)
            test_combined(o, LEAN)
            assert o.total <= plan.total_cap

    def test_cap_turns_into_accept(self):
        g = gen_bad(4096, 16, 0).graph
        params = TesterParams.lean(0.2, budget_factor=1.0, c_local=1.0)
        for seed in range(10):
            o = GraphOracle(g, seed=seed)
            v = test_L2(o, params)
            assert v.accepted or validate_witness(g, v.witness)
            assert o.total <= make_plan(g.n, g.d, params).cap("L2")

    def test_simple_sample_size(self):
        assert simple_samples(1000, TesterParams(epsilon=0.1)) == 600

    def test_determinism(self):
        g = gen_bad(4096, 16, 5).graph
        for name, run in TESTERS.items():
            a, b = GraphOracle(g, seed=3), GraphOracle(g, seed=3)
            assert run(a, LEAN) == run(b, LEAN)
            assert a.counter == b.counter
