"""Exact optimum for tiny instances.

:func:`solve_exact` is a depth-first branch and bound that fills machines
one after another: at each node it either appends an unscheduled job to
the open machine's chain or closes that machine and opens the next one.
Every schedule is generated exactly once and partial chain sums are exact,
so pruning on ``max(closed finish, residual bound) >= incumbent`` is safe.

:func:`brute_force` enumerates every permutation cut into ``m`` ordered
blocks and prices it straight from the processing and setup matrices; it
shares no code with the branch and bound and serves as its check.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .instance import Instance, adjusted_times
from .schedule import Schedule

__all__ = ["ExactResult", "solve_exact", "brute_force"]


@dataclass(frozen=True)
class ExactResult:
    optimum: int
    witness: Schedule
    nodes: int
    proven: bool


class _Stop(Exception):
    pass


def solve_exact(instance: Instance, max_jobs: int = 9, node_cap: int | None = None,
                time_cap: float | None = None) -> ExactResult:
    """``time_cap`` is in milliseconds."""
    m, n = instance.machines, instance.jobs
    if n > max_jobs:
        raise ValueError(f"instance has {n} jobs, exact search limited to {max_jobs}")
    ap = adjusted_times(instance)
    rows = ap.rows
    # mins_from[k][j]: cheapest adjusted time of job j on machines k.. (0-based)
    masked = ap.ap.copy()
    for k in range(m):
        masked[k, np.arange(1, n + 1), np.arange(1, n + 1)] = np.iinfo(np.int64).max
    per_machine = masked[:, :, 1:].min(axis=1)  # (m, n)
    mins_from = [np.minimum.accumulate(per_machine[::-1], axis=0)[::-1][k].tolist()
                 for k in range(m)]

    incumbent, witness = _greedy(rows, m, n)
    nodes = 0
    deadline = None if time_cap is None else time.perf_counter() + time_cap / 1000.0
    chains: list[list[int]] = [[] for _ in range(m)]

    def bound(k: int, load: int, remaining: list[int]) -> float:
        if not remaining:
            return load
        mins = mins_from[k]
        total = load
        largest = 0
        for j in remaining:
            v = mins[j - 1]
            total += v
            if v > largest:
                largest = v
        return max(total / (m - k), largest)

    def dfs(k: int, prev: int, load: int, closed: int, remaining: list[int]) -> None:
        nonlocal nodes, incumbent, witness
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise _Stop
        if deadline is not None and nodes % 1024 == 0 and time.perf_counter() > deadline:
            raise _Stop
        if not remaining:
            value = max(closed, load)
            if value < incumbent:
                incumbent = value
                witness = Schedule.from_sequences(chains, n)
            return
        rk = rows[k]
        children = sorted(remaining, key=lambda j: rk[prev][j])
        for j in children:
            t = load + rk[prev][j]
            rest = [r for r in remaining if r != j]
            if max(closed, t, bound(k, t, rest)) >= incumbent:
                continue
            chains[k].append(j)
            dfs(k, j, t, closed, rest)
            chains[k].pop()
        if k + 1 < m:
            c = max(closed, load)
            if max(c, bound(k + 1, 0, remaining)) < incumbent:
                dfs(k + 1, 0, 0, c, remaining)

    proven = True
    try:
        dfs(0, 0, 0, 0, list(range(1, n + 1)))
    except _Stop:
        proven = False
    return ExactResult(int(incumbent), witness, nodes, proven)


def _greedy(rows, m: int, n: int) -> tuple[int, Schedule]:
    """Append each job, in index order, where it finishes earliest."""
    chains: list[list[int]] = [[] for _ in range(m)]
    finish = [0] * m
    for j in range(1, n + 1):
        k = min(range(m), key=lambda k: finish[k]
                + rows[k][chains[k][-1] if chains[k] else 0][j])
        finish[k] += rows[k][chains[k][-1] if chains[k] else 0][j]
        chains[k].append(j)
    return max(finish), Schedule.from_sequences(chains, n)


def brute_force(instance: Instance) -> tuple[int, Schedule]:
    """Minimum makespan over every assignment and order, by enumeration."""
    m, n = instance.machines, instance.jobs
    P = instance.processing.tolist()
    S = instance.setup.tolist()
    best = math.inf
    best_seqs = None
    for perm in itertools.permutations(range(1, n + 1)):
        # m-1 cut points in 0..n (non-decreasing) split perm into m chains
        for cuts in itertools.combinations_with_replacement(range(n + 1), m - 1):
            bounds = (0, *cuts, n)
            worst = 0
            for k in range(m):
                t = 0
                prev = 0
                for j in perm[bounds[k]:bounds[k + 1]]:
                    t += S[k][prev][j - 1] + P[j - 1][k]
                    prev = j
                worst = max(worst, t)
                if worst >= best:
                    break
            if worst < best:
                best = worst
                best_seqs = [perm[bounds[k]:bounds[k + 1]] for k in range(m)]
    return int(best), Schedule.from_sequences(best_seqs, n)
