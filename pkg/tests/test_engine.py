import math

import numpy as np
import pytest

from upmsp.engine import (
    ALGORITHMS,
    AlgorithmConfig,
    BudgetExhausted,
    Evaluator,
    FireflyParams,
    FireflySwarm,
    PartnerParams,
    attractiveness,
    fa_generation,
    init_population,
    partner_update,
    run,
)
from upmsp.instance import GeneratorSpec, adjusted_times, generate
from upmsp.neighborhood import LocalSearchConfig
from upmsp.schedule import decode, makespan, validate


@pytest.fixture(scope="module")
def mid():
    inst = generate(GeneratorSpec(21, 3, 12))
    return inst, adjusted_times(inst)


def _pop(inst, ap, size=10, seed=0, budget=10_000):
    ev = Evaluator(inst, ap, budget)
    rng = np.random.default_rng(seed)
    return init_population(inst, size, rng, ev), ev, rng


def test_attractiveness_values():
    assert attractiveness(0.0, 1.0, 2.0) == 2.0
    assert attractiveness(1.0, 1.0, 2.0) == pytest.approx(2 / math.e)
    assert attractiveness(1.0, 1.0, 2.0) == pytest.approx(0.7358, abs=1e-4)
    with pytest.raises(ValueError):
        attractiveness(-1.0, 1.0, 2.0)


def test_init_population(mid):
    inst, ap = mid
    pop, ev, _ = _pop(inst, ap, size=15)
    assert ev.count == 15
    assert pop.positions.shape == (15, 12)
    assert ((pop.positions >= 0) & (pop.positions < 3)).all()
    for i in range(15):
        assert pop.schedules[i] == decode(pop.positions[i], 3)
        assert pop.fitness[i] == makespan(pop.schedules[i], ap)
    assert ev.best_cost == pop.fitness.min()


def test_identical_fireflies_only_random_walk(mid):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap, size=6)
    pop.positions[:] = pop.positions[0]
    pop.fitness[:] = pop.fitness[0]
    before = pop.positions.copy()
    swarm = FireflySwarm(FireflyParams(alpha=0.2))
    swarm.generation(pop, ev, rng)
    # equal brightness: nobody is attracted, each step is bounded by alpha/2
    # unless an earlier firefly became brighter during the sweep
    first = np.abs(pop.positions[0] - before[0])
    assert (first <= 0.1 + 1e-12).all()
    assert swarm.alpha == pytest.approx(0.2 * 0.97)


def test_alpha_floor(mid):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap, size=4)
    swarm = FireflySwarm(FireflyParams(alpha=0.02, alpha_decay=0.5, alpha_min=0.01))
    for _ in range(5):
        swarm.generation(pop, ev, rng)
    assert swarm.alpha == 0.01


def test_fa_generation_keeps_population_consistent(mid):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap, size=8)
    swarm = FireflySwarm(FireflyParams())
    for _ in range(5):
        fa_generation(pop, swarm, ev, rng, LocalSearchConfig(), 2)
    assert ((pop.positions >= 0) & (pop.positions < 3)).all()
    for i in range(8):
        assert pop.schedules[i] == decode(pop.positions[i], 3)
        assert pop.fitness[i] == makespan(pop.schedules[i], ap)
    assert ev.best_cost <= pop.fitness.min()


def test_de_identity_parameters_leave_positions(mid):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap)
    before = pop.positions.copy()
    partner_update(pop, "DE", PartnerParams(de_f=0.0, de_cr=0.0), ev, rng)
    assert np.array_equal(pop.positions, before)


@pytest.mark.parametrize("kind", ["DE", "ABC", "TLBO"])
def test_greedy_partners_never_worsen_anyone(mid, kind):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap, size=12)
    for _ in range(5):
        before = pop.fitness.copy()
        best = pop.fitness.min()
        partner_update(pop, kind, PartnerParams(), ev, rng)
        if kind == "ABC":
            # scouts may reset stale non-best individuals
            assert pop.fitness.min() <= best
        else:
            assert (pop.fitness <= before).all()


@pytest.mark.parametrize("kind", ["PSO", "IWO"])
def test_other_partners_keep_consistency(mid, kind):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap, size=10)
    for _ in range(5):
        partner_update(pop, kind, PartnerParams(), ev, rng)
    assert len(pop) == 10
    assert ((pop.positions >= 0) & (pop.positions < 3)).all()
    for i in range(10):
        assert pop.fitness[i] == makespan(decode(pop.positions[i], 3), ap)


def test_partner_update_rejects_unknown(mid):
    inst, ap = mid
    pop, ev, rng = _pop(inst, ap)
    with pytest.raises(ValueError):
        partner_update(pop, "GA", PartnerParams(), ev, rng)


def test_evaluator_budget(mid):
    inst, ap = mid
    ev = Evaluator(inst, ap, 3)
    s = decode(np.zeros(12), 3)
    for _ in range(3):
        ev(s)
    with pytest.raises(BudgetExhausted):
        ev(s)
    assert ev.count == 3 and ev.remaining == 0 and ev.progress == 1.0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_run_spends_exact_budget(mid, algorithm):
    inst, ap = mid
    res = run(inst, AlgorithmConfig(algorithm, population=10, max_evaluations=1500, seed=4), ap)
    assert res.evaluations_used == 1500
    assert not validate(res.best_schedule, inst)
    assert makespan(res.best_schedule, ap) == res.best_fitness
    assert res.best_fitness <= res.initial_best
    evals = [e for e, _ in res.trace]
    costs = [c for _, c in res.trace]
    assert evals == sorted(evals) and evals[-1] == 1500
    assert all(a >= b for a, b in zip(costs, costs[1:]))
    assert costs[-1] == res.best_fitness


def test_budget_equal_to_population(mid):
    inst, ap = mid
    res = run(inst, AlgorithmConfig("FA", population=10, max_evaluations=10), ap)
    assert res.evaluations_used == 10
    assert res.best_fitness == res.initial_best
    assert res.generations == 0


def test_config_validation():
    with pytest.raises(ValueError):
        AlgorithmConfig("GA")
    with pytest.raises(ValueError):
        AlgorithmConfig(population=10, max_evaluations=5)
    assert AlgorithmConfig("FAIWO").partner_kind == "IWO"
    assert AlgorithmConfig("IWO").uses_fa is False


def test_fa_solves_t1(t1, t1_ap):
    res = run(t1, AlgorithmConfig("FA", population=10, max_evaluations=5000, seed=0), t1_ap)
    assert res.best_fitness == 10


def test_run_deterministic(mid):
    inst, ap = mid
    cfg = AlgorithmConfig("FAPSO", population=8, max_evaluations=2000, seed=17)
    a, b = run(inst, cfg, ap), run(inst, cfg, ap)
    assert a.trace == b.trace and a.best_schedule == b.best_schedule
    c = run(inst, cfg.with_(seed=18), ap)
    assert c.trace != a.trace


def test_trace_csv(mid):
    inst, ap = mid
    res = run(inst, AlgorithmConfig(population=5, max_evaluations=200), ap)
    lines = res.trace_csv().splitlines()
    assert lines[0] == "evals,best_cmax"
    assert lines[-1] == f"200,{res.best_fitness}"
