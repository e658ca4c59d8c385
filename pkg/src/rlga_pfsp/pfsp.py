"""Permutation flow-shop instances, Taillard file I/O and makespan evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class ParseError(ValueError):
    """Raised when a Taillard-format file cannot be read."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidPermutation(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    """A PFSP instance. ``proc_times[machine][job]`` holds integer durations."""

    id: str
    proc_times: tuple[tuple[int, ...], ...]
    upper_bound: Optional[int] = None
    lower_bound: Optional[int] = None
    seed: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.proc_times)
        object.__setattr__(self, "proc_times", rows)
        if not rows or not rows[0]:
            raise ValueError("instance needs at least one machine and one job")
        n = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"machine {i} has {len(row)} times, expected {n}")
            if any(v < 0 for v in row):
                raise ValueError(f"negative processing time on machine {i}")
        if (
            self.lower_bound is not None
            and self.upper_bound is not None
            and self.lower_bound > self.upper_bound
        ):
            raise ValueError("lower_bound exceeds upper_bound")

    @property
    def n_jobs(self) -> int:
        return len(self.proc_times[0])

    @property
    def n_machines(self) -> int:
        return len(self.proc_times)

    @property
    def size_class(self) -> str:
        return f"{self.n_jobs}_{self.n_machines}"

    def as_array(self) -> np.ndarray:
        return np.array(self.proc_times, dtype=np.int64)


def validate_permutation(instance: Instance, perm: Sequence[int]) -> list[str]:
    """Return a list of violations; an empty list means ``perm`` is a valid job order."""
    n = instance.n_jobs
    problems = []
    if len(perm) != n:
        problems.append(f"length {len(perm)} != n_jobs {n}")
    seen = set()
    for pos, job in enumerate(perm):
        if not isinstance(job, (int, np.integer)) or not 0 <= job < n:
            problems.append(f"job {job!r} at position {pos} out of range")
        elif job in seen:
            problems.append(f"duplicate job {job} at position {pos}")
        else:
            seen.add(int(job))
    return problems


def _completion(proc: tuple[tuple[int, ...], ...], seq: Sequence[int]) -> int:
    # single-row rolling recurrence: c[i] = max(c[i], c[i-1]) + p[i][job]
    m = len(proc)
    c = [0] * m
    for job in seq:
        prev = 0
        for i in range(m):
            ci = c[i]
            if prev > ci:
                ci = prev
            ci += proc[i][job]
            c[i] = ci
            prev = ci
    return c[-1] if seq else 0


def makespan(instance: Instance, perm: Sequence[int]) -> int:
    problems = validate_permutation(instance, perm)
    if problems:
        raise InvalidPermutation("; ".join(problems))
    return _completion(instance.proc_times, perm)


def partial_makespan(instance: Instance, seq: Sequence[int]) -> int:
    """Makespan of a partial job sequence (no bijection check)."""
    return _completion(instance.proc_times, seq)


def random_permutation(n_jobs: int, rng: np.random.Generator) -> tuple[int, ...]:
    if n_jobs < 1:
        raise ValueError("n_jobs must be >= 1")
    return tuple(int(j) for j in rng.permutation(n_jobs))


_INT = re.compile(r"^-?\d+$")


def parse_taillard(text: str, stem: str = "instance") -> list[Instance]:
    """Parse one or more concatenated Taillard flow-shop blocks.

    Non-numeric banner lines ("number of jobs, ...", "processing times :")
    are skipped. Each block is a header line ``n m [seed [ub [lb]]]``
    followed by ``m`` rows of ``n`` integers.
    """
    lines = [
        (no, ln.split())
        for no, ln in enumerate(text.splitlines(), start=1)
        if ln.strip()
    ]
    instances = []
    k = 0
    while k < len(lines):
        no, toks = lines[k]
        if not _INT.match(toks[0]):
            k += 1
            continue
        if len(toks) < 2 or not all(_INT.match(t) for t in toks[:5]):
            raise ParseError(f"malformed header {' '.join(toks)!r}", no)
        n, m = int(toks[0]), int(toks[1])
        if n < 1 or m < 1:
            raise ParseError("job and machine counts must be positive", no)
        seed = int(toks[2]) if len(toks) > 2 else None
        ub = int(toks[3]) if len(toks) > 3 else None
        lb = int(toks[4]) if len(toks) > 4 else None
        k += 1
        rows = []
        while len(rows) < m:
            if k >= len(lines):
                raise ParseError(f"expected {m} machine rows, found {len(rows)}", no)
            rno, rtoks = lines[k]
            k += 1
            if not _INT.match(rtoks[0]):
                if rows:
                    raise ParseError("non-numeric line inside processing times", rno)
                continue
            if not all(_INT.match(t) for t in rtoks):
                raise ParseError("non-integer processing time", rno)
            if len(rtoks) != n:
                raise ParseError(f"row has {len(rtoks)} values, expected {n}", rno)
            vals = [int(t) for t in rtoks]
            if any(v < 0 for v in vals):
                raise ParseError("negative processing time", rno)
            rows.append(vals)
        try:
            inst = Instance(
                id=f"{stem}_{len(instances) + 1}",
                proc_times=tuple(tuple(r) for r in rows),
                upper_bound=ub,
                lower_bound=lb,
                seed=seed,
            )
        except ValueError as exc:
            raise ParseError(str(exc), no) from exc
        instances.append(inst)
    return instances


def serialize_taillard(instances: Sequence[Instance]) -> str:
    out = []
    for inst in instances:
        out.append("number of jobs, number of machines, initial seed, upper bound and lower bound :")
        header = [inst.n_jobs, inst.n_machines]
        tail = [inst.seed, inst.upper_bound, inst.lower_bound]
        # trailing fields are positional, so stop at the first missing one
        for v in tail:
            if v is None:
                break
            header.append(v)
        out.append(" ".join(f"{v:>10d}" for v in header))
        out.append("processing times :")
        for row in inst.proc_times:
            out.append(" ".join(f"{v:>3d}" for v in row))
    return "\n".join(out) + "\n"


def load_instances(path: str | Path) -> list[Instance]:
    path = Path(path)
    return parse_taillard(path.read_text(), stem=path.stem)
