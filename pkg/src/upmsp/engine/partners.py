"""Canonical update sweeps of the partner algorithms, on random-key positions.

Each sweep mutates the population in place.  Positions leaving ``[0, m)``
are reflected back before decoding.
"""
from __future__ import annotations

import numpy as np

from ..neighborhood import roulette_select
from ..schedule import reflect
from .config import PARTNERS, PartnerParams
from .population import Evaluator, Population


def _others(rng: np.random.Generator, psi: int, exclude: int, count: int) -> list[int]:
    pool = [k for k in range(psi) if k != exclude]
    if len(pool) >= count:
        return rng.choice(pool, size=count, replace=False).tolist()
    return rng.choice(pool, size=count, replace=True).tolist()


def _greedy(pop: Population, i: int, trial: np.ndarray, evaluator: Evaluator) -> bool:
    """Evaluate ``trial`` and keep it if no worse than individual ``i``."""
    schedule, cost = evaluator.keys(trial)
    if cost <= pop.fitness[i]:
        pop.set(i, trial, schedule, cost)
        return True
    return False


def de_sweep(pop: Population, params: PartnerParams, evaluator: Evaluator, rng) -> None:
    """DE/rand/1/bin with greedy replacement.

    With ``de_cr == 0`` no component is forced from the mutant, so the sweep
    is a true no-op.
    """
    m = evaluator.instance.machines
    psi, n = pop.positions.shape
    for i in range(psi):
        r1, r2, r3 = _others(rng, psi, i, 3)
        x = pop.positions
        mutant = x[r1] + params.de_f * (x[r2] - x[r3])
        cross = rng.random(n) < params.de_cr
        if params.de_cr > 0:
            cross[int(rng.integers(n))] = True
        if not cross.any():
            continue
        trial = reflect(np.where(cross, mutant, x[i]), m)
        if np.array_equal(trial, x[i]):
            continue
        _greedy(pop, i, trial, evaluator)


def pso_sweep(pop: Population, params: PartnerParams, evaluator: Evaluator, rng) -> None:
    m = evaluator.instance.machines
    psi, n = pop.positions.shape
    st = pop.state
    if "velocity" not in st:
        st["velocity"] = np.zeros((psi, n))
        st["pbest"] = pop.positions.copy()
        st["pbest_fit"] = pop.fitness.copy()
    v, pbest, pfit = st["velocity"], st["pbest"], st["pbest_fit"]
    # other passes may have moved the swarm since the last sweep
    better = pop.fitness < pfit
    pbest[better] = pop.positions[better]
    pfit[better] = pop.fitness[better]
    g = int(np.argmin(pfit))
    vmax = params.pso_vmax_factor * m
    for i in range(psi):
        x = pop.positions[i]
        v[i] = (params.pso_inertia * v[i]
                + params.pso_cognitive * rng.random(n) * (pbest[i] - x)
                + params.pso_social * rng.random(n) * (pbest[g] - x))
        np.clip(v[i], -vmax, vmax, out=v[i])
        xi = reflect(x + v[i], m)
        schedule, cost = evaluator.keys(xi)
        pop.set(i, xi, schedule, cost)
        if cost < pfit[i]:
            pbest[i] = xi
            pfit[i] = cost
            if cost < pfit[g]:
                g = i


def abc_sweep(pop: Population, params: PartnerParams, evaluator: Evaluator, rng) -> None:
    """Employed, onlooker and scout phases."""
    m = evaluator.instance.machines
    psi, n = pop.positions.shape
    trials = pop.state.setdefault("trials", np.zeros(psi, dtype=np.int64))
    limit = params.abc_limit if params.abc_limit is not None else psi * n

    def neighbour(i: int) -> None:
        k = _others(rng, psi, i, 1)[0]
        d = int(rng.integers(n))
        v = pop.positions[i].copy()
        v[d] += rng.uniform(-1.0, 1.0) * (v[d] - pop.positions[k, d])
        v = reflect(v, m)
        if np.array_equal(v, pop.positions[i]):
            trials[i] += 1
            return
        schedule, cost = evaluator.keys(v)
        if cost < pop.fitness[i]:
            pop.set(i, v, schedule, cost)
            trials[i] = 0
        else:
            trials[i] += 1

    for i in range(psi):
        neighbour(i)
    weights = pop.intensity.tolist()
    for _ in range(psi):
        neighbour(roulette_select(weights, rng))
    best = pop.best_index()
    worn = int(np.argmax(trials))
    if trials[worn] > limit and worn != best:
        xi = rng.random(n) * m
        schedule, cost = evaluator.keys(xi)
        pop.set(worn, xi, schedule, cost)
        trials[worn] = 0


def tlbo_sweep(pop: Population, params: PartnerParams, evaluator: Evaluator, rng) -> None:
    """Teacher phase for every learner, then the learner phase."""
    m = evaluator.instance.machines
    psi, n = pop.positions.shape
    for i in range(psi):
        teacher = pop.positions[pop.best_index()]
        mean = pop.positions.mean(axis=0)
        tf = 1 + int(rng.integers(2))
        trial = reflect(pop.positions[i] + rng.random(n) * (teacher - tf * mean), m)
        _greedy_strict(pop, i, trial, evaluator)
    for i in range(psi):
        k = _others(rng, psi, i, 1)[0]
        xi, xk = pop.positions[i], pop.positions[k]
        step = (xi - xk) if pop.fitness[i] < pop.fitness[k] else (xk - xi)
        trial = reflect(xi + rng.random(n) * step, m)
        _greedy_strict(pop, i, trial, evaluator)


def _greedy_strict(pop: Population, i: int, trial: np.ndarray, evaluator: Evaluator) -> None:
    schedule, cost = evaluator.keys(trial)
    if cost < pop.fitness[i]:
        pop.set(i, trial, schedule, cost)


def iwo_sweep(pop: Population, params: PartnerParams, evaluator: Evaluator, rng) -> None:
    """Fitness-ranked seeding with shrinking dispersion, truncated back to psi.

    Dispersion follows ``(1 - t)^q (sigma_init - sigma_final) + sigma_final``
    with ``t`` the fraction of the evaluation budget already spent.
    """
    m = evaluator.instance.machines
    psi, n = pop.positions.shape
    sigma_init = params.iwo_sigma_init if params.iwo_sigma_init is not None else m / 2
    t = evaluator.progress
    sigma = (1.0 - t) ** params.iwo_modulation * (sigma_init - params.iwo_sigma_final) \
        + params.iwo_sigma_final
    f = pop.fitness
    fbest, fworst = int(f.min()), int(f.max())
    smin, smax = params.iwo_seeds_min, params.iwo_seeds_max

    positions = [pop.positions[i] for i in range(psi)]
    schedules = list(pop.schedules)
    fitness = f.tolist()
    try:
        for i in range(psi):
            if fworst == fbest:
                count = smax
            else:
                count = int(smin + (fworst - f[i]) / (fworst - fbest) * (smax - smin))
            for _ in range(count):
                seed = reflect(pop.positions[i] + sigma * rng.standard_normal(n), m)
                schedule, cost = evaluator.keys(seed)
                positions.append(seed)
                schedules.append(schedule)
                fitness.append(cost)
    finally:
        # competitive exclusion, stable so parents win ties
        keep = sorted(range(len(fitness)), key=fitness.__getitem__)[:psi]
        pop.positions[:] = np.array([positions[k] for k in keep])
        pop.schedules[:] = [schedules[k] for k in keep]
        pop.fitness[:] = [fitness[k] for k in keep]


SWEEPS = {
    "DE": de_sweep,
    "PSO": pso_sweep,
    "ABC": abc_sweep,
    "TLBO": tlbo_sweep,
    "IWO": iwo_sweep,
}
assert set(SWEEPS) == set(PARTNERS)


def partner_update(pop: Population, kind: str, params: PartnerParams, evaluator: Evaluator,
                   rng: np.random.Generator) -> None:
    if len(pop) < 2:
        raise ValueError("partner update needs at least two individuals")
    try:
        sweep = SWEEPS[kind]
    except KeyError:
        raise ValueError(f"unknown partner kind {kind!r}") from None
    sweep(pop, params, evaluator, rng)
