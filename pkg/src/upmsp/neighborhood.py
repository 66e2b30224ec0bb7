"""Mutation-based local search over schedules: swap, insert and revert moves.

Each :func:`improve` call picks a starting scheme by roulette over the
scheme probabilities, then runs the swap, insert and revert branches in
cyclic order from that scheme.  Every branch makes ``move_budget`` random
attempts on the two randomly drawn machines; an attempt is kept only if it
strictly lowers the makespan.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .instance import AdjustedTimes
from .schedule import Schedule, makespan

__all__ = [
    "SchemeProbabilities",
    "LocalSearchConfig",
    "roulette_select",
    "apply_swap",
    "apply_insert",
    "apply_revert",
    "improve",
    "search",
]

SWAP, INSERT, REVERT = 0, 1, 2
_REDRAWS = 10


@dataclass(frozen=True)
class SchemeProbabilities:
    p_swap: float = 0.2
    p_revert: float = 0.5
    p_insert: float | None = None

    def __post_init__(self):
        if self.p_insert is None:
            object.__setattr__(self, "p_insert", 1.0 - (self.p_swap + self.p_revert))
        probs = (self.p_swap, self.p_revert, self.p_insert)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"scheme probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"scheme probabilities must sum to 1, got {sum(probs)}")

    def by_scheme(self) -> tuple[float, float, float]:
        """Weights ordered as (swap, insert, revert)."""
        return (self.p_swap, self.p_insert, self.p_revert)


@dataclass(frozen=True)
class LocalSearchConfig:
    probabilities: SchemeProbabilities = field(default_factory=SchemeProbabilities)
    passes: int = 1
    budget_factor: float = 0.7
    move_budget: int | None = None  # None: derive from machine count

    def __post_init__(self):
        if self.passes < 1:
            raise ValueError("passes must be >= 1")
        if self.move_budget is not None and self.move_budget < 1:
            raise ValueError("move_budget must be >= 1")
        if self.budget_factor <= 0:
            raise ValueError("budget_factor must be positive")

    def budget_for(self, machines: int) -> int:
        if self.move_budget is not None:
            return self.move_budget
        return max(1, round(self.budget_factor * machines))


def roulette_select(weights: Sequence[float], rng: np.random.Generator) -> int:
    """Fitness-proportionate choice: index ``i`` with probability ``w_i / sum(w)``."""
    cum = list(itertools.accumulate(weights))
    if not cum or any(w < 0 for w in weights) or cum[-1] <= 0:
        raise ValueError("degenerate roulette")
    u = rng.random() * cum[-1]
    i = bisect.bisect_right(cum, u)
    # guard against u landing exactly on the total through rounding
    return min(i, len(cum) - 1)


# --- moves -------------------------------------------------------------------

def _check(schedule: Schedule, job: int, machine: int) -> int:
    seq = schedule.sequences[machine - 1]
    try:
        return seq.index(job)
    except ValueError:
        raise ValueError(f"stale position: job {job} is not on machine {machine}") from None


def _rebuild(schedule: Schedule, changed: dict[int, list[int]]) -> Schedule:
    seqs = list(schedule.sequences)
    assignment = list(schedule.assignment)
    for k, seq in changed.items():
        seqs[k - 1] = tuple(seq)
        for j in seq:
            assignment[j - 1] = k
    return Schedule(tuple(assignment), tuple(seqs))


def apply_swap(schedule: Schedule, a: int, l: int, b: int, k: int) -> Schedule:
    """Exchange jobs ``a`` (on machine ``l``) and ``b`` (on machine ``k``)."""
    if a == b:
        raise ValueError("swap needs two distinct jobs")
    pa, pb = _check(schedule, a, l), _check(schedule, b, k)
    if l == k:
        seq = list(schedule.sequences[l - 1])
        seq[pa], seq[pb] = b, a
        return _rebuild(schedule, {l: seq})
    sl, sk = list(schedule.sequences[l - 1]), list(schedule.sequences[k - 1])
    sl[pa], sk[pb] = b, a
    return _rebuild(schedule, {l: sl, k: sk})


def apply_insert(schedule: Schedule, a: int, source: int, target: int, position: int) -> Schedule:
    """Move job ``a`` from ``source`` to index ``position`` of ``target``.

    ``position`` refers to the target sequence after ``a`` has been removed,
    so ``source == target`` gives an intra-machine reinsertion.
    """
    pa = _check(schedule, a, source)
    src = list(schedule.sequences[source - 1])
    del src[pa]
    dst = src if source == target else list(schedule.sequences[target - 1])
    if not 0 <= position <= len(dst):
        raise ValueError(f"stale position {position} for machine {target} of length {len(dst)}")
    dst.insert(position, a)
    if source == target:
        return _rebuild(schedule, {target: dst})
    return _rebuild(schedule, {source: src, target: dst})


def apply_revert(schedule: Schedule, machine: int, a: int, b: int) -> Schedule:
    """Reverse positions ``a..b`` (inclusive) of ``machine``'s sequence."""
    seq = list(schedule.sequences[machine - 1])
    if not 0 <= a <= b < len(seq):
        raise ValueError(f"span [{a}..{b}] out of range for length {len(seq)}")
    seq[a:b + 1] = seq[a:b + 1][::-1]
    return _rebuild(schedule, {machine: seq})


# --- search ------------------------------------------------------------------

def _randint(rng: np.random.Generator, n: int) -> int:
    return min(int(rng.random() * n), n - 1)


def _other_machine(rng, m: int, pi: int) -> int:
    k = 1 + _randint(rng, m - 1)
    return k if k < pi else k + 1


def _draw_swap(s: Schedule, pi: int, rng, m: int):
    for _ in range(_REDRAWS):
        k = _other_machine(rng, m, pi)
        sp, sk = s.sequences[pi - 1], s.sequences[k - 1]
        if sp and sk:
            return sp[_randint(rng, len(sp))], sk[_randint(rng, len(sk))], k
    return None


def _draw_insert(s: Schedule, pi: int, rng, m: int):
    sp = s.sequences[pi - 1]
    if not sp:
        return None
    a = sp[_randint(rng, len(sp))]
    k = 1 + _randint(rng, m)
    room = len(s.sequences[k - 1]) - (1 if k == pi else 0)
    return a, k, _randint(rng, room + 1)


def _draw_revert(s: Schedule, pi: int, rng):
    seq = s.sequences[pi - 1]
    if len(seq) < 2:
        return None
    a, b = _randint(rng, len(seq)), _randint(rng, len(seq))
    return (a, b) if a <= b else (b, a)


def _machines_pair(rng, m: int) -> tuple[int, ...]:
    if m == 1:
        return (1,)
    l = 1 + _randint(rng, m)
    return (l, _other_machine(rng, m, l))


def improve(
    schedule: Schedule,
    ap: AdjustedTimes,
    config: LocalSearchConfig,
    rng: np.random.Generator,
    evaluate: Callable[[Schedule], int] | None = None,
) -> Schedule:
    """Return a schedule whose makespan is no larger than ``schedule``'s."""
    return search(schedule, ap, config, rng, evaluate)[0]


def search(
    schedule: Schedule,
    ap: AdjustedTimes,
    config: LocalSearchConfig,
    rng: np.random.Generator,
    evaluate: Callable[[Schedule], int] | None = None,
    current: int | None = None,
) -> tuple[Schedule, int]:
    """Like :func:`improve` but also returns the final makespan.

    ``evaluate`` defaults to a plain makespan computation; the engine passes
    its budget-counting evaluator.  ``current`` is the known makespan of the
    input, if available, and saves one evaluation.
    """
    if evaluate is None:
        evaluate = lambda s: makespan(s, ap)  # noqa: E731
    m = ap.machines
    budget = config.budget_for(m)
    best = schedule
    best_cost = current if current is not None else evaluate(schedule)
    weights = config.probabilities.by_scheme()

    for _ in range(config.passes):
        first = roulette_select(weights, rng)
        pair = _machines_pair(rng, m)
        for offset in range(3):
            scheme = (first + offset) % 3
            if scheme == SWAP and m == 1:
                continue
            for _ in range(budget):
                if scheme == REVERT:
                    candidates = (pair[_randint(rng, len(pair))],)
                else:
                    candidates = pair
                for pi in candidates:
                    trial = None
                    if scheme == SWAP:
                        drawn = _draw_swap(best, pi, rng, m)
                        if drawn:
                            a, b, k = drawn
                            trial = apply_swap(best, a, pi, b, k)
                    elif scheme == INSERT:
                        drawn = _draw_insert(best, pi, rng, m)
                        if drawn:
                            a, k, pos = drawn
                            trial = apply_insert(best, a, pi, k, pos)
                    else:
                        drawn = _draw_revert(best, pi, rng)
                        if drawn:
                            trial = apply_revert(best, pi, *drawn)
                    if trial is None or trial == best:
                        continue
                    cost = evaluate(trial)
                    if cost < best_cost:
                        best, best_cost = trial, cost
    return best, best_cost
