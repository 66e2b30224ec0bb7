"""Replicated experiments: per-run results, per-cell statistics, deviation
metrics, convergence traces and a small SVG chart per instance.

Output layout under ``out``::

    results.csv      instance_id,algorithm,seed,best_cmax,evals,wall_ms,lb,rho_pct
    aggregate.csv    instance_id,algorithm,mean,best,worst,median,std,rho_pct,delta_pct
    timing.csv       wall-clock per run (never byte-stable, kept apart)
    traces/<instance>__<algorithm>__r<k>.csv
    charts/<instance>.svg

``wall_ms`` in ``results.csv`` is left empty unless timing is requested,
so that repeated runs of one spec produce byte-identical result files.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, Union

from .bounds import lower_bounds
from .engine import AlgorithmConfig, RunResult, run
from .instance import GeneratorSpec, Instance, generate, load

log = logging.getLogger(__name__)

RESULTS_HEADER = ["instance_id", "algorithm", "seed", "best_cmax", "evals", "wall_ms", "lb", "rho_pct"]
AGGREGATE_HEADER = ["instance_id", "algorithm", "mean", "best", "worst", "median", "std",
                    "rho_pct", "delta_pct"]

InstanceSource = Union[Instance, GeneratorSpec, str, Path]


def rho(cmax: float, lb: float) -> float:
    """Percent deviation of a makespan above the lower bound."""
    if lb <= 0:
        raise ValueError("degenerate bound")
    return (float(cmax) - float(lb)) / float(lb) * 100.0


def delta(cmax_other: float, cmax_fa: float) -> float:
    """Percent deviation from the FA control; positive means worse than FA."""
    if cmax_fa <= 0:
        raise ValueError("degenerate control makespan")
    return (float(cmax_other) - float(cmax_fa)) / float(cmax_fa) * 100.0


@dataclass(frozen=True)
class CellStatistics:
    mean: float
    best: int
    worst: int
    median: float
    std: float
    mean_wall_ms: float = 0.0

    @classmethod
    def of(cls, values: Sequence[int], walls: Sequence[float] = ()) -> "CellStatistics":
        if not values:
            raise ValueError("no samples")
        return cls(
            mean=statistics.fmean(values),
            best=min(values),
            worst=max(values),
            median=float(statistics.median(values)),
            std=statistics.stdev(values) if len(values) > 1 else 0.0,
            mean_wall_ms=statistics.fmean(walls) if walls else 0.0,
        )


@dataclass(frozen=True)
class DeviationReport:
    rho: float | None
    delta: float | None


@dataclass
class ExperimentSpec:
    suite: list[InstanceSource]
    algorithms: list[AlgorithmConfig]
    replications: int = 15
    seed_base: int = 0
    out: Path | None = None
    format: str = "csv"
    workers: int | None = None  # None: UPMSP_WORKERS or logical CPUs
    record_timing: bool = False
    svg: bool = True

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.suite or not self.algorithms:
            raise ValueError("need at least one instance and one algorithm")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    def labels(self) -> list[str]:
        names = [a.algorithm for a in self.algorithms]
        out = []
        for a in self.algorithms:
            if names.count(a.algorithm) == 1:
                out.append(a.algorithm)
            else:
                out.append(f"{a.algorithm}_psi{a.population}")
        if len(set(out)) != len(out):
            raise ValueError(f"algorithm templates are not distinguishable: {out}")
        return out


@dataclass
class Cell:
    instance_id: str
    algorithm: str
    runs: list[tuple[int, RunResult]]  # (seed, result), ordered by replication
    lb: Fraction
    stats: CellStatistics
    deviation: DeviationReport


@dataclass
class ExperimentReport:
    cells: list[Cell] = field(default_factory=list)

    def cell(self, instance_id: str, algorithm: str) -> Cell:
        for c in self.cells:
            if c.instance_id == instance_id and c.algorithm == algorithm:
                return c
        raise KeyError((instance_id, algorithm))

    def results_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        for c in self.cells:
            for seed, r in c.runs:
                w.writerow([c.instance_id, c.algorithm, seed, r.best_fitness, r.evaluations_used,
                            f"{r.wall_time:.1f}" if timing else "", _fmt(c.lb),
                            _fmt(rho(r.best_fitness, c.lb)) if c.lb > 0 else ""])
        return buf.getvalue()

    def aggregate_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for c in self.cells:
            s, d = c.stats, c.deviation
            w.writerow([c.instance_id, c.algorithm, _fmt(s.mean), s.best, s.worst, _fmt(s.median),
                        _fmt(s.std), "" if d.rho is None else _fmt(d.rho),
                        "" if d.delta is None else _fmt(d.delta)])
        return buf.getvalue()

    def timing_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance_id", "algorithm", "seed", "wall_ms"])
        for c in self.cells:
            for seed, r in c.runs:
                w.writerow([c.instance_id, c.algorithm, seed, f"{r.wall_time:.1f}"])
        return buf.getvalue()

    def to_json(self, timing: bool = False) -> str:
        cells = []
        for c in self.cells:
            cells.append({
                "instance_id": c.instance_id,
                "algorithm": c.algorithm,
                "lb": float(c.lb),
                "mean": c.stats.mean, "best": c.stats.best, "worst": c.stats.worst,
                "median": c.stats.median, "std": c.stats.std,
                "rho_pct": c.deviation.rho, "delta_pct": c.deviation.delta,
                "runs": [{
                    "seed": seed, "best_cmax": r.best_fitness, "evals": r.evaluations_used,
                    **({"wall_ms": round(r.wall_time, 1)} if timing else {}),
                    "trace": [list(p) for p in r.trace],
                } for seed, r in c.runs],
            })
        return json.dumps({"cells": cells}, indent=1) + "\n"


def _fmt(x) -> str:
    return f"{float(x):.4f}"


def resolve(source: InstanceSource) -> Instance:
    if isinstance(source, Instance):
        return source
    if isinstance(source, GeneratorSpec):
        return generate(source)
    return load(source)


def _job(args):
    instance, config = args
    return run(instance, config)


def _workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("UPMSP_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    instances = [resolve(s) for s in spec.suite]
    labels = spec.labels()
    jobs = []
    keys = []
    for inst in instances:
        for label, template in zip(labels, spec.algorithms):
            for r in range(spec.replications):
                seed = spec.seed_base + r
                jobs.append((inst, replace(template, seed=seed)))
                keys.append((inst.id, label, seed))

    workers = _workers(spec.workers)
    if workers == 1 or len(jobs) == 1:
        results = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))
    by_key = dict(zip(keys, results))

    report = ExperimentReport()
    control = next((lab for lab, a in zip(labels, spec.algorithms) if a.algorithm == "FA"), None)
    if control is None:
        log.warning("no FA cell in the experiment; delta is omitted")
    for inst in instances:
        lb = lower_bounds(inst).lb
        stats = {}
        for label in labels:
            runs = [(spec.seed_base + r, by_key[(inst.id, label, spec.seed_base + r)])
                    for r in range(spec.replications)]
            stats[label] = (runs, CellStatistics.of([x.best_fitness for _, x in runs],
                                                    [x.wall_time for _, x in runs]))
        fa_mean = stats[control][1].mean if control else None
        for label in labels:
            runs, st = stats[label]
            dev = DeviationReport(
                rho=rho(st.mean, lb) if lb > 0 else None,
                delta=delta(st.mean, fa_mean) if fa_mean else None,
            )
            report.cells.append(Cell(inst.id, label, runs, lb, st, dev))

    if spec.out is not None:
        write_report(report, spec)
    return report


def trace_name(instance_id: str, algorithm: str, replication: int) -> str:
    return f"{instance_id}__{algorithm}__r{replication}.csv"


def write_report(report: ExperimentReport, spec: ExperimentSpec) -> None:
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    if spec.format == "json":
        (out / "report.json").write_text(report.to_json(spec.record_timing))
    else:
        (out / "results.csv").write_text(report.results_csv(spec.record_timing))
        (out / "aggregate.csv").write_text(report.aggregate_csv())
        traces = out / "traces"
        traces.mkdir(exist_ok=True)
        for c in report.cells:
            for r, (_, res) in enumerate(c.runs):
                (traces / trace_name(c.instance_id, c.algorithm, r)).write_text(res.trace_csv())
    (out / "timing.csv").write_text(report.timing_csv())
    if spec.svg:
        charts = out / "charts"
        charts.mkdir(exist_ok=True)
        for inst_id in dict.fromkeys(c.instance_id for c in report.cells):
            cells = [c for c in report.cells if c.instance_id == inst_id]
            (charts / f"{inst_id}.svg").write_text(convergence_svg(inst_id, cells))


# --- presets ----------------------------------------------------------------

SUITE_MACHINES = (2, 4, 6, 8, 10, 12)
SUITE_JOBS = (20, 40, 60, 80, 100, 120)


def preset(name: str, desk: bool = False) -> list[AlgorithmConfig]:
    """Algorithm templates for the three experiments; ``desk`` divides maxFE by 10."""
    scale = 10 if desk else 1
    if name == "exp1":
        return [AlgorithmConfig(a, population=40, max_evaluations=500_000 // scale)
                for a in ("FA", "DE", "PSO", "ABC", "TLBO", "IWO")]
    if name == "exp2":
        return [AlgorithmConfig("FA", population=p, max_evaluations=500_000 // scale)
                for p in (20, 30, 40)]
    if name == "exp3":
        return [AlgorithmConfig(a, population=200, max_evaluations=5_000 // scale)
                for a in ("FA", "FADE", "FAPSO", "FAABC", "FATLBO", "FAIWO")]
    raise ValueError(f"unknown preset {name!r}")


def generated_suite(machines: Iterable[int], jobs: Iterable[int], per_size: int, seed: int,
                    p: tuple[int, int] = (50, 100), s: tuple[int, int] = (50, 100)) -> list[GeneratorSpec]:
    suite = []
    for m in machines:
        for n in jobs:
            for r in range(per_size):
                suite.append(GeneratorSpec(seed + r, m, n, p[0], p[1], s[0], s[1]))
    return suite


# --- SVG ----------------------------------------------------------------------

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000")


def mean_curve(runs: Sequence[RunResult], points: int = 100) -> list[tuple[int, float]]:
    """Best-so-far averaged over runs on an even grid of evaluation counts."""
    horizon = max(r.evaluations_used for r in runs)
    grid = sorted({max(1, round(horizon * k / points)) for k in range(points + 1)})
    curve = []
    for e in grid:
        vals = []
        for r in runs:
            v = r.trace[0][1]
            for ev, c in r.trace:
                if ev > e:
                    break
                v = c
            vals.append(v)
        curve.append((e, sum(vals) / len(vals)))
    return curve


def convergence_svg(title: str, cells: Sequence[Cell], width: int = 640, height: int = 400) -> str:
    curves = [(c.algorithm, mean_curve([r for _, r in c.runs])) for c in cells]
    xs = [e for _, cv in curves for e, _ in cv]
    ys = [v for _, cv in curves for _, v in cv]
    x0, x1 = 0, max(xs) or 1
    y0, y1 = min(ys), max(ys)
    if y1 == y0:
        y1 = y0 + 1
    ml, mr, mt, mb = 60, 120, 30, 40
    pw, ph = width - ml - mr, height - mt - mb

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (1 - (y - y0) / (y1 - y0)) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{ml}" y="18" font-size="13">{title}: best-so-far makespan</text>',
             f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#999"/>',
             f'<text x="{ml}" y="{height - 10}" font-size="11">0</text>',
             f'<text x="{ml + pw - 40}" y="{height - 10}" font-size="11">{x1} evals</text>',
             f'<text x="4" y="{mt + 10}" font-size="11">{y1:.0f}</text>',
             f'<text x="4" y="{mt + ph}" font-size="11">{y0:.0f}</text>']
    for idx, (name, cv) in enumerate(curves):
        colour = _COLOURS[idx % len(_COLOURS)]
        pts = " ".join(f"{sx(e):.1f},{sy(v):.1f}" for e, v in cv)
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{ml + pw + 8}" y="{mt + 14 + 16 * idx}" font-size="11" '
                     f'fill="{colour}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
