"""Firefly moves on random-key positions."""
from __future__ import annotations

import math

import numba
import numpy as np

from ..neighborhood import LocalSearchConfig, search
from .config import FireflyParams
from .population import Evaluator, Population


def attractiveness(r: float, gamma: float, beta0: float) -> float:
    """``beta0 * exp(-gamma * r**2)``."""
    if r < 0:
        raise ValueError("distance must be nonnegative")
    return beta0 * math.exp(-gamma * r * r)


@numba.njit(cache=True)
def _move(x, f, i, fi, noise, alpha, beta0, gamma, upper):
    """Position of firefly ``i`` after moving toward every brighter firefly.

    ``noise`` holds one row of uniforms per partner; with no brighter
    partner the firefly takes a random step using row ``i``.
    """
    psi, n = x.shape
    xi = x[i].copy()
    moved = False
    for j in range(psi):
        if f[j] < fi:
            r2 = 0.0
            for d in range(n):
                diff = x[j, d] - xi[d]
                r2 += diff * diff
            beta = beta0 * math.exp(-gamma * r2)
            for d in range(n):
                xi[d] += beta * (x[j, d] - xi[d]) + alpha * (noise[j, d] - 0.5)
            moved = True
    if not moved:
        for d in range(n):
            xi[d] += alpha * (noise[i, d] - 0.5)
    period = 2.0 * upper
    top = np.nextafter(upper, 0.0)
    for d in range(n):
        y = xi[d] % period
        if y >= upper:
            y = period - y
        if y >= upper:
            y = top
        xi[d] = y
    return xi


class FireflySwarm:
    """Holds the step size that decays across generations."""

    def __init__(self, params: FireflyParams):
        self.params = params
        self.alpha = params.alpha

    def generation(self, pop: Population, evaluator: Evaluator, rng: np.random.Generator) -> None:
        """One sweep: every firefly moves toward each brighter one.

        A firefly with no brighter partner takes a pure random step.  Each
        firefly is decoded and evaluated once, after its own sweep, so later
        fireflies see the updated positions and makespans.
        """
        p = self.params
        m = float(evaluator.instance.machines)
        x, f = pop.positions, pop.fitness
        psi, n = x.shape
        noise = rng.random((psi, psi, n))
        for i in range(psi):
            xi = _move(x, f, i, f[i], noise[i], self.alpha, p.beta0, p.gamma, m)
            schedule, cost = evaluator.keys(xi)
            pop.set(i, xi, schedule, cost)
        self.alpha = max(p.alpha_min, self.alpha * p.alpha_decay)


def polish_best(pop: Population, evaluator: Evaluator, config: LocalSearchConfig,
                invocations: int, rng: np.random.Generator) -> None:
    """Run local search on the population's best individual and write it back."""
    b = pop.best_index()
    for _ in range(invocations):
        schedule, cost = search(pop.schedules[b], evaluator.ap, config, rng,
                                evaluate=evaluator, current=int(pop.fitness[b]))
        pop.set_schedule(b, schedule, cost)
