"""Command line entry point ``dfs-certify``."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import asdict

from . import fileio
from .bench import emit_csv, median_queries, run_bench, successive_ratios
from .exact import check_by_conflicts, check_by_simulation
from .gadgets import (
    CannotPlant,
    TooSmall,
    distinguisher_game,
    floor_cbrt,
    gen_bad,
    gen_chain,
    gen_good,
    gen_random_valid,
    perturb,
)
from .graph import GraphError
from .oracle import GraphOracle
from .tester import TESTERS, TesterParams, icbrt
from .transforms import check_fin, test_fin


def _params(args) -> TesterParams:
    base = TesterParams.lean if getattr(args, "lean", False) else TesterParams
    kw = {"seed": args.seed}
    if getattr(args, "ell", None) is not None:
        kw["ell"] = args.ell
    if getattr(args, "c_global", None) is not None:
        kw["c_global"] = args.c_global
    if getattr(args, "no_fallback", False):
        kw["fallback"] = False
    return base(epsilon=args.eps, **kw)


def _cmd_gen(args) -> int:
    if args.family == "good":
        inst = gen_good(args.n, args.N or floor_cbrt(args.n), args.seed)
    elif args.family == "bad":
        inst = gen_bad(args.n, args.N or floor_cbrt(args.n), args.seed)
    elif args.family == "random":
        inst = gen_random_valid(args.n, args.d, args.seed)
    else:
        base = gen_chain(args.n, max(args.d, 3)) if args.base == "chain" else gen_random_valid(args.n, args.d, args.seed)
        inst = perturb(base, args.k, args.kind, args.seed)
    if args.out == "-":
        fileio.write_graph(inst.graph, sys.stdout)
    else:
        fileio.save_graph(inst.graph, args.out)
        print(f"wrote {inst.family.value} instance n={inst.graph.n} d={inst.graph.d} to {args.out}")
    return 0


def _report(name: str | None, verdict) -> None:
    prefix = f"{name}: " if name else ""
    if verdict.accepted:
        print(f"{prefix}accept")
    else:
        print(f"{prefix}{verdict.witness}")


def _cmd_check(args) -> int:
    g = fileio.read_graph(args.file)
    if args.fin:
        verdict = check_fin(g)
        _report(None, verdict)
        return 0 if verdict.accepted else 1
    modes = ["conflicts", "simulation"] if args.mode == "both" else [args.mode]
    run = {"conflicts": check_by_conflicts, "simulation": check_by_simulation}
    ok = True
    for mode in modes:
        verdict = run[mode](g)
        _report(mode if len(modes) > 1 else None, verdict)
        ok &= verdict.accepted
    return 0 if ok else 1


def _cmd_test(args) -> int:
    g = fileio.read_graph(args.file)
    params = _params(args)
    oracle = GraphOracle(g, seed=args.seed)
    if args.fin:
        verdict = test_fin(oracle, params)
    else:
        verdict = TESTERS[args.tester](oracle, params)
    _report(None, verdict)
    c = oracle.counter
    print(f"queries neighbor={c.neighbor_queries} label={c.label_queries} total={c.total}")
    return 0 if verdict.accepted else 1


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    params = _params(args)
    records = run_bench(args.tester, sizes, args.trials, params, args.seed, args.family, args.d)
    if args.csv == "-":
        emit_csv(records, sys.stdout)
    else:
        with open(args.csv, "w", newline="") as fh:
            emit_csv(records, fh)
    med = median_queries(records)
    for n, m in med.items():
        print(f"n={n} median_queries={m:g}", file=sys.stderr)
    for r in successive_ratios(med):
        print(f"ratio {r:.3f}", file=sys.stderr)
    return 0


def _cmd_game(args) -> int:
    N = args.N or floor_cbrt(args.n)
    params = TesterParams.lean(args.eps)
    budget = None if args.budget == "full" else int(args.budget)
    res = distinguisher_game(n=args.n, N=N, budget=budget, trials=args.trials, seed=args.seed, params=params)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["trial", "bad", "rejected", "queries"], lineterminator="\n")
            w.writeheader()
            for rec in res.records:
                w.writerow(asdict(rec))
    print(f"success={res.success:.4f} wilson95=[{res.low:.4f},{res.high:.4f}] trials={res.trials} budget={res.budget}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfs-certify", description="Check and test DFS numberings.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=["good", "bad", "random", "perturbed"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--N", type=int, default=None, help="segment length (default floor(n^(1/3)))")
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kind", choices=["L1", "L2", "L3", "G"], default="G")
    g.add_argument("--k", type=int, default=1, help="number of planted conflicts")
    g.add_argument("--base", choices=["chain", "random"], default="chain")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("check", help="exact check of a graph file")
    c.add_argument("file")
    c.add_argument("--fin", action="store_true", help="check a finishing-order numbering")
    c.add_argument("--mode", choices=["conflicts", "simulation", "both"], default="conflicts")
    c.set_defaults(func=_cmd_check)

    def tester_opts(q):
        q.add_argument("--eps", type=float, default=0.1)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--ell", type=int, default=None)
        q.add_argument("--c-global", type=float, default=None)
        q.add_argument("--no-fallback", action="store_true")
        q.add_argument("--lean", action="store_true", help="benchmark profile: no fallback, small global constant")

    t = sub.add_parser("test", help="run a sublinear tester on a graph file")
    t.add_argument("file")
    t.add_argument("--tester", choices=sorted(TESTERS), default="combined")
    t.add_argument("--fin", action="store_true")
    tester_opts(t)
    t.set_defaults(func=_cmd_test)

    b = sub.add_parser("bench", help="benchmark a tester across sizes")
    b.add_argument("--tester", choices=sorted(TESTERS), default="combined")
    b.add_argument("--sizes", required=True, help="comma separated sizes")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--family", choices=["good", "bad", "random"], default="good")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--csv", default="-")
    tester_opts(b)
    b.set_defaults(func=_cmd_bench)

    m = sub.add_parser("game", help="distinguishing game between good and bad families")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--N", type=int, default=None)
    m.add_argument("--budget", default="full", help="query budget per trial or 'full'")
    m.add_argument("--trials", type=int, default=100)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--eps", type=float, default=0.1)
    m.add_argument("--csv", default=None)
    m.set_defaults(func=_cmd_game)
    return p


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except fileio.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, TooSmall, CannotPlant, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
