"""Taillard's benchmark generator and bundled instance files.

Taillard instances are reproducible from a published seed using a
Lehmer (Park-Miller) generator, so the 20x5 set ships regenerated from
its seeds rather than as downloaded data.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path
from typing import Optional

from .pfsp import Instance, load_instances, parse_taillard

DATA_ENV = "RLGA_PFSP_DATA"

# (time seed, upper bound, lower bound) for ta001..ta010
TAI20_5 = [
    (873654221, 1278, 1232),
    (379008056, 1359, 1290),
    (1866992158, 1081, 1073),
    (216771124, 1293, 1268),
    (495070989, 1235, 1198),
    (402959317, 1195, 1180),
    (1369363414, 1239, 1226),
    (2021925980, 1206, 1170),
    (573109518, 1230, 1206),
    (88325120, 1108, 1082),
]


def _unif(state: int, low: int, high: int) -> tuple[int, int]:
    m, a, b, c = 2147483647, 16807, 127773, 2836
    k = state // b
    state = a * (state % b) - k * c
    if state < 0:
        state += m
    return state, low + int(state / m * (high - low + 1))


def generate(seed: int, n_jobs: int, n_machines: int, id: str = "generated",
             upper_bound: Optional[int] = None,
             lower_bound: Optional[int] = None) -> Instance:
    """Processing times drawn machine by machine, U[1, 99]."""
    state = seed
    rows = []
    for _ in range(n_machines):
        row = []
        for _ in range(n_jobs):
            state, v = _unif(state, 1, 99)
            row.append(v)
        rows.append(tuple(row))
    return Instance(id=id, proc_times=tuple(rows), upper_bound=upper_bound,
                    lower_bound=lower_bound, seed=seed)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("rlga_pfsp") / "data" / name))


def resolve_path(path: str | Path) -> Path:
    """Find an instance file as given, under $RLGA_PFSP_DATA, or in the bundled data."""
    p = Path(path)
    if p.exists():
        return p
    data_dir = os.environ.get(DATA_ENV)
    if data_dir and (Path(data_dir) / p).exists():
        return Path(data_dir) / p
    if bundled_path(p.name).exists():
        return bundled_path(p.name)
    raise FileNotFoundError(f"instance file not found: {path}")


def parse_selector(spec: str) -> tuple[str, Optional[list[int]]]:
    """Split ``path[:i,j,...]`` into the path and 1-based block indices."""
    head, sep, tail = spec.rpartition(":")
    if sep and tail and all(t.strip().isdigit() for t in tail.split(",")):
        return head, [int(t) for t in tail.split(",")]
    return spec, None


def select_instances(spec: str) -> list[Instance]:
    path, indices = parse_selector(spec)
    insts = load_instances(resolve_path(path))
    if indices is None:
        return insts
    out = []
    for i in indices:
        if not 1 <= i <= len(insts):
            raise ValueError(f"{path} has {len(insts)} instances, no block {i}")
        out.append(insts[i - 1])
    return out


def ta20_5(index: int) -> Instance:
    """Taillard 20x5 instance by 1-based index (1 -> ta001)."""
    text = bundled_path("tai20_5.txt").read_text()
    return parse_taillard(text, stem="tai20_5")[index - 1]
