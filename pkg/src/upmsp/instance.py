"""Problem data for unrelated parallel machines with sequence-dependent setups.

Jobs are numbered ``1..n`` and machines ``1..m``.  Index ``0`` in the
predecessor axis of a setup matrix is the dummy job, so row 0 of machine
``k``'s setup matrix holds the initial setups before the first job on ``k``.

Arrays are stored 0-based on the machine axis::

    processing[j - 1, k - 1]   -> P_{j,k}
    setup[k - 1, i, j - 1]     -> S_{i,j,k}   (i = 0 is the dummy job)

The text format (``UPMSP v1``)::

    UPMSP v1
    m 2 n 3
    P
    4 6
    ...
    S 1
    1 1 1        # row 0: initial setups
    0 2 2
    ...
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "Instance",
    "AdjustedTimes",
    "GeneratorSpec",
    "InstanceFormatError",
    "generate",
    "parse",
    "serialize",
    "load",
    "save",
    "adjusted_times",
]

FORMAT_TAG = "UPMSP v1"


class InstanceFormatError(ValueError):
    """Raised when a UPMSP v1 stream cannot be parsed."""

    def __init__(self, line: int, cause: str):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    machines: int
    jobs: int
    processing: np.ndarray  # (n, m)
    setup: np.ndarray  # (m, n + 1, n)
    id: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "processing", _frozen(self.processing))
        object.__setattr__(self, "setup", _frozen(self.setup))
        m, n = self.machines, self.jobs
        if m < 1 or n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
        if self.processing.shape != (n, m):
            raise ValueError(f"processing must be {n}x{m}, got {self.processing.shape}")
        if self.setup.shape != (m, n + 1, n):
            raise ValueError(f"setup must be {m}x{n + 1}x{n}, got {self.setup.shape}")
        if (self.processing < 0).any() or (self.setup < 0).any():
            raise ValueError("times must be nonnegative")
        diag = self.setup[:, np.arange(1, n + 1), np.arange(n)]
        if diag.any():
            raise ValueError("diagonal setup entries must be 0")

    def p(self, job: int, machine: int) -> int:
        return int(self.processing[job - 1, machine - 1])

    def s(self, machine: int, pred: int, job: int) -> int:
        return int(self.setup[machine - 1, pred, job - 1])

    def scaled(self, c: int) -> "Instance":
        return Instance(self.machines, self.jobs, self.processing * c, self.setup * c,
                        f"{self.id}*{c}")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.machines == other.machines and self.jobs == other.jobs
                and self.id == other.id
                and np.array_equal(self.processing, other.processing)
                and np.array_equal(self.setup, other.setup))

    def __hash__(self):
        return hash((self.id, self.machines, self.jobs, self.processing.tobytes(),
                     self.setup.tobytes()))


@dataclass(frozen=True, eq=False)
class AdjustedTimes:
    """Setup plus processing, ``ap[k-1, i, j] = S_{i,j,k} + P_{j,k}``.

    Column 0 is padding (the dummy job is never a successor) so jobs index
    the last axis directly.  ``rows`` mirrors ``ap`` as nested lists, which
    is what the evaluators read in their inner loops.
    """

    ap: np.ndarray  # (m, n + 1, n + 1)
    rows: list = field(repr=False)

    @property
    def machines(self) -> int:
        return self.ap.shape[0]

    @property
    def jobs(self) -> int:
        return self.ap.shape[1] - 1

    def __call__(self, machine: int, pred: int, job: int) -> int:
        return int(self.ap[machine - 1, pred, job])


def adjusted_times(instance: Instance) -> AdjustedTimes:
    m, n = instance.machines, instance.jobs
    ap = np.zeros((m, n + 1, n + 1), dtype=np.int64)
    ap[:, :, 1:] = instance.setup + instance.processing.T[:, None, :]
    for k in range(m):
        ap[k, np.arange(1, n + 1), np.arange(1, n + 1)] = 0
    ap.setflags(write=False)
    return AdjustedTimes(ap, ap.tolist())


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    machines: int
    jobs: int
    p_low: int = 50
    p_high: int = 100
    s_low: int = 50
    s_high: int = 100

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.machines < 1 or self.jobs < 1:
            raise ValueError("machines and jobs must be positive")
        if not 0 <= self.p_low <= self.p_high:
            raise ValueError("need 0 <= p_low <= p_high")
        if not 0 <= self.s_low <= self.s_high:
            raise ValueError("need 0 <= s_low <= s_high")

    @property
    def id(self) -> str:
        return (f"gen_m{self.machines}_n{self.jobs}_p{self.p_low}-{self.p_high}"
                f"_s{self.s_low}-{self.s_high}_seed{self.seed}")


def generate(spec: GeneratorSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    m, n = spec.machines, spec.jobs
    processing = rng.integers(spec.p_low, spec.p_high, size=(n, m), endpoint=True)
    setup = rng.integers(spec.s_low, spec.s_high, size=(m, n + 1, n), endpoint=True)
    for k in range(m):
        setup[k, np.arange(1, n + 1), np.arange(n)] = 0
    return Instance(m, n, processing, setup, spec.id)


# --- text format -----------------------------------------------------------

_COMMENT = re.compile(r"#.*")


def _tokens(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw).strip()
        if line:
            out.append((lineno, line.split()))
    return out


def _ints(lineno: int, toks: list[str], count: int, what: str) -> list[int]:
    if len(toks) != count:
        raise InstanceFormatError(lineno, f"wrong matrix dimensions: {what} expects "
                                          f"{count} values, got {len(toks)}")
    try:
        vals = [int(t) for t in toks]
    except ValueError:
        raise InstanceFormatError(lineno, f"non-integer value in {what}") from None
    for v in vals:
        if v < 0:
            raise InstanceFormatError(lineno, f"negative value {v} in {what}")
    return vals


def parse(text: str | TextIO, name: str | None = None) -> Instance:
    """Parse a UPMSP v1 stream.

    The instance id is taken from a ``# name: <id>`` comment if present,
    else from ``name`` (usually the source filename).
    """
    if not isinstance(text, str):
        text = text.read()
    declared = re.search(r"^#\s*name:\s*(\S+)", text, re.MULTILINE)
    lines = _tokens(text)
    pos = 0

    def take(expect: str | None = None):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise InstanceFormatError(last + 1, "unexpected end of input"
                                      + (f", expected '{expect}'" if expect else ""))
        item = lines[pos]
        pos += 1
        return item

    lineno, toks = take(FORMAT_TAG)
    if " ".join(toks) != FORMAT_TAG:
        raise InstanceFormatError(lineno, f"malformed header: expected '{FORMAT_TAG}'")
    lineno, toks = take("m <int> n <int>")
    if len(toks) != 4 or toks[0] != "m" or toks[2] != "n":
        raise InstanceFormatError(lineno, "malformed header: expected 'm <int> n <int>'")
    try:
        m, n = int(toks[1]), int(toks[3])
    except ValueError:
        raise InstanceFormatError(lineno, "malformed header: non-integer size") from None
    if m < 1 or n < 1:
        raise InstanceFormatError(lineno, "malformed header: sizes must be positive")

    lineno, toks = take("P")
    if toks != ["P"]:
        raise InstanceFormatError(lineno, "malformed header: expected block 'P'")
    processing = [_ints(*take(), m, f"P row {j}") for j in range(1, n + 1)]

    setup = []
    for k in range(1, m + 1):
        lineno, toks = take(f"S {k}")
        if toks != ["S", str(k)]:
            raise InstanceFormatError(lineno, f"malformed header: expected block 'S {k}'")
        rows = []
        for i in range(n + 1):
            lineno, toks = take()
            row = _ints(lineno, toks, n, f"S {k} row {i}")
            if i >= 1 and row[i - 1] != 0:
                raise InstanceFormatError(lineno, f"nonzero diagonal in S {k} row {i}")
            rows.append(row)
        setup.append(rows)
    if pos != len(lines):
        raise InstanceFormatError(lines[pos][0], "wrong matrix dimensions: trailing data")

    ident = declared.group(1) if declared else (name or "instance")
    return Instance(m, n, np.array(processing), np.array(setup), ident)


def serialize(instance: Instance) -> str:
    buf = io.StringIO()
    buf.write(f"{FORMAT_TAG}\n")
    buf.write(f"# name: {instance.id}\n")
    buf.write(f"m {instance.machines} n {instance.jobs}\n")
    buf.write("P\n")
    _write_rows(buf, instance.processing)
    for k in range(instance.machines):
        buf.write(f"S {k + 1}\n")
        _write_rows(buf, instance.setup[k])
    return buf.getvalue()


def _write_rows(buf: io.StringIO, rows: Iterable[Iterable[int]]) -> None:
    for row in rows:
        buf.write(" ".join(str(int(v)) for v in row))
        buf.write("\n")


def load(path: str | Path) -> Instance:
    path = Path(path)
    return parse(path.read_text(), name=path.stem)


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(serialize(instance))
