"""Makespan lower bounds from minimal adjusted processing times."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .instance import AdjustedTimes, Instance, adjusted_times

__all__ = ["BoundReport", "min_adjusted", "min_adjusted_all", "lower_bounds", "residual_bound"]


@dataclass(frozen=True)
class BoundReport:
    lb1: Fraction
    lb2: int
    lb: Fraction

    @property
    def lb_ceil(self) -> int:
        return math.ceil(self.lb)

    def __str__(self) -> str:
        return f"{float(self.lb1):.2f} {float(self.lb2):.2f} {float(self.lb):.2f}"


def _ap(x: Instance | AdjustedTimes) -> AdjustedTimes:
    return x if isinstance(x, AdjustedTimes) else adjusted_times(x)


def min_adjusted_all(x: Instance | AdjustedTimes, machines: Sequence[int] | None = None) -> list[int]:
    """Per job, the smallest adjusted time over machines and any predecessor.

    ``machines`` (1-based) restricts the minimum to a subset of machines.
    """
    ap = _ap(x).ap
    n = ap.shape[1] - 1
    if machines is not None:
        ap = ap[[k - 1 for k in machines]]
    # the diagonal is stored as 0 and must not win the minimum
    masked = ap[:, :, 1:].copy()
    masked[:, np.arange(1, n + 1), np.arange(n)] = np.iinfo(np.int64).max
    return masked.min(axis=(0, 1)).tolist()


def min_adjusted(x: Instance | AdjustedTimes, job: int) -> int:
    n = _ap(x).jobs
    if not 1 <= job <= n:
        raise ValueError(f"job {job} out of range 1..{n}")
    return min_adjusted_all(x)[job - 1]


def lower_bounds(x: Instance | AdjustedTimes) -> BoundReport:
    ap = _ap(x)
    mins = min_adjusted_all(ap)
    lb1 = Fraction(sum(mins), ap.machines)
    lb2 = max(mins)
    return BoundReport(lb1, lb2, max(lb1, Fraction(lb2)))


def residual_bound(mins: Iterable[int], machines: int, load: int = 0) -> Fraction:
    """Bound for spreading the jobs with minimal times ``mins`` over ``machines``
    machines when ``load`` time units are already committed among them."""
    mins = list(mins)
    if not mins:
        return Fraction(load, machines)
    return max(Fraction(load + sum(mins), machines), Fraction(max(mins)))
