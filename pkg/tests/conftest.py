from pathlib import Path

import numpy as np
import pytest

from upmsp.instance import GeneratorSpec, Instance, adjusted_times, generate

FIXTURES = Path(__file__).parent / "fixtures"


def make_t1() -> Instance:
    P = [[4, 6], [5, 3], [7, 4]]
    S1 = [[1, 1, 1], [0, 2, 2], [2, 0, 2], [2, 2, 0]]
    S2 = [[2, 2, 2], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
    return Instance(2, 3, np.array(P), np.array([S1, S2]), "T1")


@pytest.fixture
def t1() -> Instance:
    return make_t1()


@pytest.fixture
def t1_ap(t1):
    return adjusted_times(t1)


@pytest.fixture
def t1_text() -> str:
    return (FIXTURES / "t1.upmsp").read_text()


def tiny_instances(count: int, seed: int = 1000, machines=(1, 2, 3), jobs=(3, 4, 5, 6),
                   low: int = 1, high: int = 9) -> list[Instance]:
    """Seeded small instances cycling through the given sizes."""
    rng = np.random.default_rng(seed)
    out = []
    for r in range(count):
        m = int(rng.choice(machines))
        n = int(rng.choice(jobs))
        out.append(generate(GeneratorSpec(seed + r, m, n, low, high, low, high)))
    return out
