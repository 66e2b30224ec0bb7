"""Firefly-based solvers for unrelated parallel machine scheduling with
sequence-dependent setup times (makespan objective)."""
from .instance import (
    AdjustedTimes,
    GeneratorSpec,
    Instance,
    InstanceFormatError,
    adjusted_times,
    generate,
    load,
    parse,
    save,
    serialize,
)
from .schedule import Schedule, decode, encode, evaluate, makespan, validate
from .bounds import BoundReport, lower_bounds, min_adjusted

__version__ = "0.1.0"
