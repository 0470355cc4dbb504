"""Benchmark runs of the testers and CSV output."""

from __future__ import annotations

import csv
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from typing import IO, Iterable

from .gadgets import floor_cbrt, gen_bad, gen_good, gen_random_valid
from .graph import LabeledGraph
from .oracle import GraphOracle
from .tester import TESTERS, TesterParams, make_plan


@dataclass(frozen=True)
class BenchRecord:
    n: int
    d: int
    epsilon: float
    ell: int
    tester: str
    seed: int
    verdict: str
    neighbor_queries: int
    label_queries: int
    wall_time_ms: float
    witness: str = ""
    global_branch: str = ""
    edge_attempts: int = 0

    @property
    def queries(self) -> int:
        return self.neighbor_queries + self.label_queries


COLUMNS = [f.name for f in fields(BenchRecord)]


def emit_csv(records: Iterable[BenchRecord], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(asdict(r))


def read_csv(stream: IO[str]) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(stream):
        out.append(
            BenchRecord(
                n=int(row["n"]),
                d=int(row["d"]),
                epsilon=float(row["epsilon"]),
                ell=int(row["ell"]),
                tester=row["tester"],
                seed=int(row["seed"]),
                verdict=row["verdict"],
                neighbor_queries=int(row["neighbor_queries"]),
                label_queries=int(row["label_queries"]),
                wall_time_ms=float(row["wall_time_ms"]),
                witness=row["witness"],
                global_branch=row["global_branch"],
                edge_attempts=int(row["edge_attempts"]),
            )
        )
    return out


def run_trial(g: LabeledGraph, tester: str, params: TesterParams, seed: int) -> BenchRecord:
    """Run one tester on one graph with a fresh oracle seeded by ``seed``."""
    oracle = GraphOracle(g, seed=seed)
    start = time.perf_counter()
    verdict = TESTERS[tester](oracle, params)
    elapsed = (time.perf_counter() - start) * 1000
    plan = make_plan(g.n, g.d, params)
    c = oracle.counter
    return BenchRecord(
        n=g.n,
        d=g.d,
        epsilon=params.epsilon,
        ell=plan.ell,
        tester=tester,
        seed=seed,
        verdict="accept" if verdict.accepted else "reject",
        neighbor_queries=c.neighbor_queries,
        label_queries=c.label_queries,
        wall_time_ms=round(elapsed, 3),
        witness="" if verdict.witness is None else str(verdict.witness),
        global_branch=plan.global_branch,
        edge_attempts=oracle.edge_attempts,
    )


@lru_cache(maxsize=4)
def bench_instance(family: str, n: int, d: int, seed: int) -> LabeledGraph:
    """Instance used for size ``n``: lower-bound families use ``N = floor(n^(1/3))``."""
    if family == "good":
        return gen_good(n, floor_cbrt(n), seed).graph
    if family == "bad":
        return gen_bad(n, floor_cbrt(n), seed).graph
    if family == "random":
        return gen_random_valid(n, d, seed).graph
    raise ValueError(f"unknown family {family!r}")


def _task(args) -> BenchRecord:
    family, n, d, inst_seed, tester, params, seed = args
    return run_trial(bench_instance(family, n, d, inst_seed), tester, params, seed)


def worker_count() -> int:
    env = os.environ.get("DFS_CERTIFY_THREADS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def run_bench(
    tester: str,
    sizes: Iterable[int],
    trials: int,
    params: TesterParams,
    seed: int = 0,
    family: str = "good",
    d: int = 3,
    workers: int | None = None,
) -> list[BenchRecord]:
    """One instance per size, ``trials`` oracle seeds per instance."""
    tasks = [
        (family, n, d, seed, tester, params, seed + t) for n in sizes for t in range(trials)
    ]
    workers = workers or worker_count()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_task, tasks))
    else:
        records = [_task(t) for t in tasks]
    return sorted(records, key=lambda r: (r.n, r.seed))


def median_queries(records: Iterable[BenchRecord]) -> dict[int, float]:
    by_n: dict[int, list[int]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.queries)
    return {n: statistics.median(q) for n, q in sorted(by_n.items())}


def successive_ratios(medians: dict[int, float]) -> list[float]:
    vals = [medians[n] for n in sorted(medians)]
    return [b / a for a, b in zip(vals, vals[1:])]
