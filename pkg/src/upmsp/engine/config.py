from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..neighborhood import LocalSearchConfig

STANDALONE = ("FA", "DE", "PSO", "ABC", "TLBO", "IWO")
PARTNERS = ("DE", "PSO", "ABC", "TLBO", "IWO")
HYBRIDS = tuple("FA" + p for p in PARTNERS)
ALGORITHMS = STANDALONE + HYBRIDS


@dataclass(frozen=True)
class FireflyParams:
    gamma: float = 1.0
    beta0: float = 2.0
    alpha: float = 0.2
    alpha_decay: float = 0.97
    alpha_min: float = 0.01

    def __post_init__(self):
        if self.gamma <= 0 or self.beta0 <= 0:
            raise ValueError("gamma and beta0 must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 < self.alpha_decay <= 1.0:
            raise ValueError("alpha_decay must lie in (0, 1]")


@dataclass(frozen=True)
class PartnerParams:
    de_f: float = 0.5
    de_cr: float = 0.9
    pso_inertia: float = 0.729
    pso_cognitive: float = 1.49445
    pso_social: float = 1.49445
    pso_vmax_factor: float = 0.5  # times m
    abc_limit: int | None = None  # None: population * jobs
    iwo_seeds_min: int = 1
    iwo_seeds_max: int = 5
    iwo_sigma_init: float | None = None  # None: m / 2
    iwo_sigma_final: float = 0.01
    iwo_modulation: float = 3.0


@dataclass(frozen=True)
class AlgorithmConfig:
    algorithm: str = "FA"
    population: int = 40
    max_evaluations: int = 500_000
    fa: FireflyParams = field(default_factory=FireflyParams)
    partner: PartnerParams = field(default_factory=PartnerParams)
    local_search: LocalSearchConfig = field(default_factory=LocalSearchConfig)
    ls_invocations: int = 2  # "um": improve() calls on the best individual per generation
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.max_evaluations < self.population:
            raise ValueError("max_evaluations must be >= population")
        if self.ls_invocations < 0:
            raise ValueError("ls_invocations must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def uses_fa(self) -> bool:
        return self.algorithm.startswith("FA")

    @property
    def partner_kind(self) -> str | None:
        if self.algorithm == "FA":
            return None
        return self.algorithm[2:] if self.uses_fa else self.algorithm

    def with_(self, **changes) -> "AlgorithmConfig":
        return replace(self, **changes)
