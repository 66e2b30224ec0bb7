from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..instance import AdjustedTimes, Instance
from ..schedule import Schedule, decode, encode, makespan


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested past ``max_evaluations``."""


class Evaluator:
    """Counts fitness evaluations and keeps the best schedule seen so far.

    Every makespan computed during a run goes through here, so the
    best-so-far record and the trace can never miss an improvement.
    """

    def __init__(self, instance: Instance, ap: AdjustedTimes, max_evaluations: int):
        self.instance = instance
        self.ap = ap
        self.max_evaluations = max_evaluations
        self.count = 0
        self.best_cost = math.inf
        self.best_schedule: Schedule | None = None
        self.trace: list[tuple[int, int]] = []

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.count

    @property
    def progress(self) -> float:
        return self.count / self.max_evaluations

    def __call__(self, schedule: Schedule) -> int:
        if self.count >= self.max_evaluations:
            raise BudgetExhausted
        self.count += 1
        cost = makespan(schedule, self.ap)
        if cost < self.best_cost:
            self.best_cost = cost
            self.best_schedule = schedule
            self.trace.append((self.count, cost))
        return cost

    def keys(self, position: np.ndarray) -> tuple[Schedule, int]:
        schedule = decode(position, self.instance.machines)
        return schedule, self(schedule)


@dataclass
class Individual:
    position: np.ndarray
    schedule: Schedule
    fitness: int

    @property
    def intensity(self) -> float:
        return 1.0 / (1.0 + self.fitness)


@dataclass
class Population:
    """Positions, decoded schedules and makespans, kept index-aligned.

    ``state`` carries per-algorithm memory (PSO velocities and personal
    bests, ABC trial counters) between sweeps.
    """

    positions: np.ndarray  # (psi, n)
    schedules: list[Schedule]
    fitness: np.ndarray  # (psi,) int64
    state: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.schedules)

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.positions[i], self.schedules[i], int(self.fitness[i]))

    @property
    def intensity(self) -> np.ndarray:
        return 1.0 / (1.0 + self.fitness)

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    def set(self, i: int, position: np.ndarray, schedule: Schedule, cost: int) -> None:
        self.positions[i] = position
        self.schedules[i] = schedule
        self.fitness[i] = cost

    def set_schedule(self, i: int, schedule: Schedule, cost: int) -> None:
        if schedule != self.schedules[i]:
            self.set(i, encode(schedule), schedule, cost)


def init_population(instance: Instance, size: int, rng: np.random.Generator,
                    evaluator: Evaluator) -> Population:
    """Uniform random keys on ``[0, m)^n``, each decoded and evaluated once."""
    if size < 2:
        raise ValueError("population size must be >= 2")
    m, n = instance.machines, instance.jobs
    positions = rng.random((size, n)) * m
    np.minimum(positions, np.nextafter(m, 0.0), out=positions)
    schedules = []
    fitness = np.zeros(size, dtype=np.int64)
    for i in range(size):
        schedule, cost = evaluator.keys(positions[i])
        schedules.append(schedule)
        fitness[i] = cost
    return Population(positions, schedules, fitness)
