import io

from dfs_certify.bench import (
    COLUMNS,
    BenchRecord,
    bench_instance,
    emit_csv,
    median_queries,
    read_csv,
    run_bench,
    run_trial,
    successive_ratios,
    worker_count,
)
from dfs_certify.oracle import GraphOracle
from dfs_certify.tester import TESTERS, TesterParams

PARAMS = TesterParams.lean(0.3)


def test_columns():
    assert COLUMNS[:11] == [
        "n", "d", "epsilon", "ell", "tester", "seed", "verdict",
        "neighbor_queries", "label_queries", "wall_time_ms", "witness",
    ]


def test_empty_csv():
    buf = io.StringIO()
    emit_csv([], buf)
    assert buf.getvalue() == ",".join(COLUMNS) + "\n"


def test_three_records_four_lines():
    recs = run_bench("combined", [512], 3, PARAMS, workers=1)
    buf = io.StringIO()
    emit_csv(recs, buf)
    assert len(buf.getvalue().splitlines()) == 4
    assert read_csv(io.StringIO(buf.getvalue())) == recs


def test_quoting_of_witness():
    rec = BenchRecord(10, 3, 0.1, 3, "combined", 0, "reject", 1, 2, 0.5, "conflict v=3 edge={2,4}")
    buf = io.StringIO()
    emit_csv([rec], buf)
    assert '"conflict v=3 edge={2,4}"' in buf.getvalue()
    assert read_csv(io.StringIO(buf.getvalue())) == [rec]


def test_counts_match_replay():
    g = bench_instance("bad", 4096, 3, 0)
    for tester in TESTERS:
        rec = run_trial(g, tester, PARAMS, 7)
        o = GraphOracle(g, seed=7)
        verdict = TESTERS[tester](o, PARAMS)
        assert rec.neighbor_queries == o.counter.neighbor_queries
        assert rec.label_queries == o.counter.label_queries
        assert rec.verdict == ("accept" if verdict.accepted else "reject")


def test_parallel_matches_serial():
    a = run_bench("combined", [512, 1024], 3, PARAMS, family="bad", workers=1)
    b = run_bench("combined", [512, 1024], 3, PARAMS, family="bad", workers=2)
    strip = lambda rs: [r.__class__(**{**r.__dict__, "wall_time_ms": 0}) for r in rs]
    assert strip(a) == strip(b)


def test_medians_and_ratios():
    recs = [
        BenchRecord(8, 3, 0.1, 2, "x", s, "accept", q, 0, 0.0)
        for s, q in enumerate([10, 20, 30])
    ] + [BenchRecord(64, 3, 0.1, 4, "x", 0, "accept", 50, 0, 0.0)]
    med = median_queries(recs)
    assert med == {8: 20, 64: 50}
    assert successive_ratios(med) == [2.5]


def test_worker_env(monkeypatch):
    monkeypatch.setenv("DFS_CERTIFY_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("DFS_CERTIFY_THREADS")
    assert worker_count() >= 1
