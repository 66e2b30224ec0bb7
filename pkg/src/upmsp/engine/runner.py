from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..instance import AdjustedTimes, Instance, adjusted_times
from ..schedule import Schedule
from .config import AlgorithmConfig
from .firefly import FireflySwarm, polish_best
from .partners import partner_update
from .population import BudgetExhausted, Evaluator, Population, init_population

# consecutive generations without a single evaluation before a run gives up
_STALL_LIMIT = 1000


@dataclass(frozen=True)
class RunResult:
    best_fitness: int
    best_schedule: Schedule
    trace: tuple[tuple[int, int], ...]  # (evaluations, best makespan so far)
    evaluations_used: int
    wall_time: float  # milliseconds
    initial_best: int
    generations: int

    def trace_csv(self) -> str:
        return "evals,best_cmax\n" + "".join(f"{e},{c}\n" for e, c in self.trace)


def generation(pop: Population, config: AlgorithmConfig, swarm: FireflySwarm | None,
               evaluator: Evaluator, rng: np.random.Generator) -> None:
    """One generation of ``config.algorithm``.

    FA and the FA hybrids start with a firefly sweep and local search on the
    best firefly; hybrids then apply one sweep of their partner.  Standalone
    partners run their sweep and then polish their best individual.
    """
    kind = config.partner_kind
    if swarm is not None:
        swarm.generation(pop, evaluator, rng)
        polish_best(pop, evaluator, config.local_search, config.ls_invocations, rng)
        if kind is not None:
            partner_update(pop, kind, config.partner, evaluator, rng)
    else:
        partner_update(pop, kind, config.partner, evaluator, rng)
        polish_best(pop, evaluator, config.local_search, config.ls_invocations, rng)


def run(instance: Instance, config: AlgorithmConfig, ap: AdjustedTimes | None = None) -> RunResult:
    """Search until ``config.max_evaluations`` fitness evaluations are spent."""
    ap = ap if ap is not None else adjusted_times(instance)
    rng = np.random.default_rng(config.seed)
    evaluator = Evaluator(instance, ap, config.max_evaluations)
    swarm = FireflySwarm(config.fa) if config.uses_fa else None
    start = time.perf_counter()
    pop = init_population(instance, config.population, rng, evaluator)
    initial_best = int(evaluator.best_cost)
    generations = 0
    stalled = 0
    try:
        while evaluator.remaining > 0 and stalled < _STALL_LIMIT:
            before = evaluator.count
            generation(pop, config, swarm, evaluator, rng)
            generations += 1
            stalled = stalled + 1 if evaluator.count == before else 0
    except BudgetExhausted:
        pass
    wall = (time.perf_counter() - start) * 1000.0

    trace = list(evaluator.trace)
    if trace[-1][0] != evaluator.count:
        trace.append((evaluator.count, trace[-1][1]))
    return RunResult(
        best_fitness=int(evaluator.best_cost),
        best_schedule=evaluator.best_schedule,
        trace=tuple(trace),
        evaluations_used=evaluator.count,
        wall_time=wall,
        initial_best=initial_best,
        generations=generations,
    )
