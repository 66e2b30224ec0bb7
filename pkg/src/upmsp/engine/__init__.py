"""Population-based search: firefly core, partner sweeps and hybrids."""
from .config import (
    ALGORITHMS,
    HYBRIDS,
    PARTNERS,
    STANDALONE,
    AlgorithmConfig,
    FireflyParams,
    PartnerParams,
)
from .firefly import FireflySwarm, attractiveness, polish_best
from .partners import partner_update
from .population import BudgetExhausted, Evaluator, Individual, Population, init_population
from .runner import RunResult, generation, run


def fa_generation(pop: Population, swarm: FireflySwarm, evaluator: Evaluator, rng,
                  local_search=None, invocations: int = 2) -> None:
    """Firefly sweep followed by local search on the best firefly."""
    swarm.generation(pop, evaluator, rng)
    if local_search is not None and invocations:
        polish_best(pop, evaluator, local_search, invocations, rng)


__all__ = [
    "ALGORITHMS",
    "HYBRIDS",
    "PARTNERS",
    "STANDALONE",
    "AlgorithmConfig",
    "FireflyParams",
    "PartnerParams",
    "FireflySwarm",
    "attractiveness",
    "polish_best",
    "partner_update",
    "BudgetExhausted",
    "Evaluator",
    "Individual",
    "Population",
    "init_population",
    "RunResult",
    "generation",
    "run",
    "fa_generation",
]
