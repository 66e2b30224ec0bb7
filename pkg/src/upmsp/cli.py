"""Command line entry point: ``upmsp generate|solve|bench|exact|lb``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .bounds import lower_bounds
from .engine import ALGORITHMS, AlgorithmConfig, FireflyParams, run
from .exact import solve_exact
from .instance import GeneratorSpec, generate, load, save
from .neighborhood import LocalSearchConfig, SchemeProbabilities
from .schedule import format_schedule


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", type=Path, default=None, help="output file or directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _emit(args, text: str) -> None:
    if args.out is not None and args.command in ("solve", "lb", "exact"):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--max-evals", type=int, default=500_000)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--beta0", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--alpha-decay", type=float, default=0.97)
    p.add_argument("--um", type=int, default=2, help="local-search calls per generation")
    p.add_argument("--ls-pswap", type=float, default=0.2)
    p.add_argument("--ls-prevert", type=float, default=0.5)
    p.add_argument("--ls-budget-factor", type=float, default=0.7)


def _config(args, algorithm: str, seed: int) -> AlgorithmConfig:
    return AlgorithmConfig(
        algorithm=algorithm,
        population=args.population,
        max_evaluations=args.max_evals,
        fa=FireflyParams(gamma=args.gamma, beta0=args.beta0, alpha=args.alpha,
                         alpha_decay=args.alpha_decay),
        local_search=LocalSearchConfig(
            probabilities=SchemeProbabilities(p_swap=args.ls_pswap, p_revert=args.ls_prevert),
            budget_factor=args.ls_budget_factor),
        ls_invocations=args.um,
        seed=seed,
    )


def cmd_generate(args) -> int:
    specs = [GeneratorSpec(args.seed + r, args.machines, args.jobs, args.p_low, args.p_high,
                           args.s_low, args.s_high) for r in range(args.count)]
    if args.out is None:
        if args.count != 1:
            raise SystemExit("--count > 1 needs --out <directory>")
        from .instance import serialize
        sys.stdout.write(serialize(generate(specs[0])))
        return 0
    out = Path(args.out)
    if args.count == 1 and out.suffix:
        save(generate(specs[0]), out)
        return 0
    out.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        save(generate(spec), out / f"{spec.id}.upmsp")
    return 0


def cmd_solve(args) -> int:
    instance = load(args.instance)
    result = run(instance, _config(args, args.algorithm, args.seed))
    lb = lower_bounds(instance).lb
    if args.trace_out:
        Path(args.trace_out).write_text(result.trace_csv())
    if args.format == "json":
        text = json.dumps({
            "instance_id": instance.id, "algorithm": args.algorithm, "seed": args.seed,
            "best_cmax": result.best_fitness, "evals": result.evaluations_used,
            "wall_ms": round(result.wall_time, 1), "lb": float(lb),
            "rho_pct": bench.rho(result.best_fitness, lb) if lb > 0 else None,
            "schedule": [list(s) for s in result.best_schedule.sequences],
        }, indent=1) + "\n"
    else:
        text = ",".join(bench.RESULTS_HEADER) + "\n" + ",".join([
            instance.id, args.algorithm, str(args.seed), str(result.best_fitness),
            str(result.evaluations_used), f"{result.wall_time:.1f}", f"{float(lb):.4f}",
            f"{bench.rho(result.best_fitness, lb):.4f}" if lb > 0 else ""]) + "\n"
    if args.dump_schedule:
        text += format_schedule(result.best_schedule) + "\n"
    _emit(args, text)
    return 0


def cmd_bench(args) -> int:
    if args.preset:
        templates = bench.preset(args.preset, desk=args.desk)
    else:
        templates = []
    if args.algorithms:
        base = templates[0] if templates else None
        templates = [_config(args, a, 0) if base is None else base.with_(algorithm=a)
                     for a in args.algorithms.split(",")]
    if not templates:
        raise SystemExit("choose --preset and/or --algorithms")
    if args.population_override:
        templates = [t.with_(population=args.population_override) for t in templates]
    if args.max_evals_override:
        templates = [t.with_(max_evaluations=args.max_evals_override) for t in templates]
    if args.instance:
        suite = [Path(p) for p in args.instance]
    else:
        suite = bench.generated_suite(_ints(args.machines), _ints(args.jobs),
                                      args.instances_per_size, args.seed,
                                      (args.p_low, args.p_high), (args.s_low, args.s_high))
    spec = bench.ExperimentSpec(
        suite=suite, algorithms=templates, replications=args.replications,
        seed_base=args.seed, out=args.out or Path("bench_out"), format=args.format,
        workers=args.workers, record_timing=args.timing, svg=not args.no_svg,
    )
    report = bench.run_experiment(spec)
    sys.stdout.write(report.aggregate_csv())
    return 0


def cmd_exact(args) -> int:
    instance = load(args.instance)
    res = solve_exact(instance, max_jobs=args.max_jobs, node_cap=args.node_cap,
                      time_cap=args.time_cap)
    if args.format == "json":
        text = json.dumps({"optimum": res.optimum, "proven": res.proven, "nodes": res.nodes,
                           "witness": [list(s) for s in res.witness.sequences]}, indent=1) + "\n"
    else:
        text = (f"optimum {res.optimum}\nproven {str(res.proven).lower()}\nnodes {res.nodes}\n"
                + format_schedule(res.witness) + "\n")
    _emit(args, text)
    return 0


def cmd_lb(args) -> int:
    b = lower_bounds(load(args.instance))
    if args.format == "json":
        text = json.dumps({"lb1": float(b.lb1), "lb2": b.lb2, "lb": float(b.lb),
                           "lb_ceil": b.lb_ceil}) + "\n"
    else:
        text = str(b) + "\n"
    _emit(args, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="upmsp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write random instances")
    g.add_argument("--machines", "-m", type=int, required=True)
    g.add_argument("--jobs", "-n", type=int, required=True)
    g.add_argument("--count", type=int, default=1, help="instances (seeds seed..seed+count-1)")
    for name, default in (("p-low", 50), ("p-high", 100), ("s-low", 50), ("s-high", 100)):
        g.add_argument(f"--{name}", type=int, default=default)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="run one algorithm on one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--algorithm", choices=ALGORITHMS, default="FA")
    s.add_argument("--dump-schedule", action="store_true")
    s.add_argument("--trace-out", type=Path, default=None)
    _search_args(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", parents=[common], help="replicated experiment")
    b.add_argument("--preset", choices=("exp1", "exp2", "exp3"))
    b.add_argument("--desk", action="store_true", help="divide preset maxFE by 10")
    b.add_argument("--algorithms", help="comma separated, e.g. FA,FAIWO")
    b.add_argument("--instance", nargs="*", help="instance files (default: generated suite)")
    b.add_argument("--machines", default="2,4,6,8,10,12")
    b.add_argument("--jobs", default="20,40,60,80,100,120")
    b.add_argument("--instances-per-size", type=int, default=1)
    b.add_argument("--replications", type=int, default=15)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--timing", action="store_true", help="fill wall_ms in results.csv")
    b.add_argument("--no-svg", action="store_true")
    b.add_argument("--population-override", type=int, default=None)
    b.add_argument("--max-evals-override", type=int, default=None)
    for name, default in (("p-low", 50), ("p-high", 100), ("s-low", 50), ("s-high", 100)):
        b.add_argument(f"--{name}", type=int, default=default)
    _search_args(b)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("exact", parents=[common], help="branch-and-bound optimum (tiny n)")
    e.add_argument("--instance", required=True)
    e.add_argument("--node-cap", type=int, default=None)
    e.add_argument("--time-cap", type=float, default=None, help="milliseconds")
    e.add_argument("--max-jobs", type=int, default=9)
    e.set_defaults(func=cmd_exact)

    lb = sub.add_parser("lb", parents=[common], help="lower bounds lb1 lb2 lb")
    lb.add_argument("--instance", required=True)
    lb.set_defaults(func=cmd_lb)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
