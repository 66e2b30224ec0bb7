"""Two-stage schedules: machine assignment plus per-machine job sequences.

A search point is a vector of ``n`` keys in ``[0, m)``.  The integer part of
a job's key selects its machine and the fractional part ranks it within
that machine's sequence (ties broken by job index).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import AdjustedTimes, Instance

__all__ = [
    "Schedule",
    "EvaluationReport",
    "decode",
    "encode",
    "reflect",
    "validate",
    "evaluate",
    "makespan",
    "chain_finish",
    "format_schedule",
    "parse_schedule",
]


@dataclass(frozen=True)
class Schedule:
    """``sequences[k-1]`` lists the jobs on machine ``k`` in processing order."""

    assignment: tuple[int, ...]
    sequences: tuple[tuple[int, ...], ...]

    @classmethod
    def from_sequences(cls, sequences, jobs: int | None = None) -> "Schedule":
        sequences = tuple(tuple(int(j) for j in seq) for seq in sequences)
        if jobs is None:
            jobs = sum(len(s) for s in sequences)
        assignment = [0] * jobs
        for k, seq in enumerate(sequences, start=1):
            for j in seq:
                if 1 <= j <= jobs:
                    assignment[j - 1] = k
        return cls(tuple(assignment), sequences)

    @property
    def machines(self) -> int:
        return len(self.sequences)

    def position(self, job: int) -> tuple[int, int]:
        """Return ``(machine, index)`` of ``job``."""
        k = self.assignment[job - 1]
        return k, self.sequences[k - 1].index(job)

    def __str__(self) -> str:
        return format_schedule(self)


@dataclass(frozen=True)
class EvaluationReport:
    completion: tuple[int, ...]  # C_j for j = 1..n
    per_machine_finish: tuple[int, ...]
    makespan: int


def reflect(x: np.ndarray, upper: float) -> np.ndarray:
    """Fold positions back into ``[0, upper)`` by mirror reflection."""
    period = 2.0 * upper
    y = np.mod(x, period)
    y = np.where(y >= upper, period - y, y)
    # period - y == upper exactly when y == upper
    return np.where(y >= upper, np.nextafter(upper, 0.0), y)


def decode(keys, instance: Instance | int) -> Schedule:
    m = instance if isinstance(instance, int) else instance.machines
    if isinstance(keys, np.ndarray):
        keys = keys.tolist()
    n = len(keys)
    if not isinstance(instance, int) and n != instance.jobs:
        raise ValueError(f"expected {instance.jobs} keys, got {n}")
    # the integer part is the machine, so sorting on the raw key orders jobs
    # by machine and then by fractional part; job index breaks ties
    buckets: list[list[int]] = [[] for _ in range(m)]
    assignment = [0] * n
    for key, j in sorted(zip(keys, range(1, n + 1))):
        k = int(key)
        if k >= m:
            k = m - 1
        elif k < 0:
            k = 0
        buckets[k].append(j)
        assignment[j - 1] = k + 1
    return Schedule(tuple(assignment), tuple(map(tuple, buckets)))


def encode(schedule: Schedule) -> np.ndarray:
    """Return keys that decode back to ``schedule`` (evenly spaced ranks)."""
    keys = np.zeros(len(schedule.assignment))
    for k, seq in enumerate(schedule.sequences):
        q = len(seq)
        for r, j in enumerate(seq):
            keys[j - 1] = k + (r + 0.5) / q
    return keys


def validate(schedule: Schedule, instance: Instance) -> list[str]:
    """Return the list of violated rules; an empty list means feasible."""
    m, n = instance.machines, instance.jobs
    problems: list[str] = []
    if len(schedule.sequences) != m:
        problems.append(f"machine count: {len(schedule.sequences)} sequences for {m} machines")
    if len(schedule.assignment) != n:
        problems.append(f"assignment length {len(schedule.assignment)} != {n} jobs")
    seen: dict[int, int] = {}
    for k, seq in enumerate(schedule.sequences, start=1):
        local: set[int] = set()
        for j in seq:
            if not isinstance(j, (int, np.integer)) or not 1 <= j <= n:
                problems.append(f"unknown job {j!r} on machine {k}")
                continue
            if j in local:
                problems.append(f"repeat within sequence: job {j} on machine {k}")
                continue
            local.add(j)
            if j in seen:
                problems.append(f"job multiplicity: job {j} on machines {seen[j]} and {k}")
            else:
                seen[j] = k
    for j in range(1, n + 1):
        if j not in seen:
            problems.append(f"job multiplicity: job {j} unscheduled")
        elif len(schedule.assignment) == n and schedule.assignment[j - 1] != seen[j]:
            problems.append(f"assignment mismatch: job {j} assigned to "
                            f"{schedule.assignment[j - 1]} but sequenced on {seen[j]}")
    for k in schedule.assignment:
        if not 1 <= k <= m:
            problems.append(f"machine index {k} out of range")
    return problems


def chain_finish(rows_k: list, seq) -> int:
    """Sum of adjusted times along one machine's chain (``rows_k = ap.rows[k-1]``)."""
    t = 0
    prev = 0
    for j in seq:
        t += rows_k[prev][j]
        prev = j
    return t


def makespan(schedule: Schedule, ap: AdjustedTimes) -> int:
    rows = ap.rows
    best = 0
    for k, seq in enumerate(schedule.sequences):
        rk = rows[k]
        t = 0
        prev = 0
        for j in seq:
            t += rk[prev][j]
            prev = j
        if t > best:
            best = t
    return best


def evaluate(schedule: Schedule, ap: AdjustedTimes) -> EvaluationReport:
    n = ap.jobs
    if len(schedule.assignment) != n or len(schedule.sequences) != ap.machines:
        raise ValueError("schedule does not match the adjusted-time tables")
    completion = [0] * n
    finish = []
    for k, seq in enumerate(schedule.sequences):
        rk = ap.rows[k]
        t = 0
        prev = 0
        for j in seq:
            t += rk[prev][j]
            completion[j - 1] = t
            prev = j
        finish.append(t)
    return EvaluationReport(tuple(completion), tuple(finish), max(finish))


def format_schedule(schedule: Schedule) -> str:
    return "\n".join(f"{k}: " + " ".join(map(str, seq)) if seq else f"{k}:"
                     for k, seq in enumerate(schedule.sequences, start=1))


def parse_schedule(text: str, jobs: int | None = None) -> Schedule:
    sequences = []
    for line in text.strip().splitlines():
        head, _, rest = line.partition(":")
        if int(head) != len(sequences) + 1:
            raise ValueError(f"machine lines out of order at {line!r}")
        sequences.append(tuple(int(t) for t in rest.split()))
    return Schedule.from_sequences(sequences, jobs)
