"""Comparison methods: fixed-parameter GA, NEH, Johnson's rule and CDS."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .agent import RunResult
from .ga import GenerationParams, Method, ga_step, init_population
from .pfsp import Instance, makespan, partial_makespan

STANDARD_PARAMS = GenerationParams(Method.ROULETTE, 0.5, 0.5)


def standard_ga(instance: Instance, pop_size: int, iterations: int,
                rng: np.random.Generator,
                params: GenerationParams = STANDARD_PARAMS) -> RunResult:
    pop = init_population(instance, pop_size, rng)
    history = []
    for t in range(iterations):
        pop, _ = ga_step(instance, pop, params, rng)
        history.append({"episode": 0, "generation": t, "best_fitness": pop.best.fitness})
    return RunResult(best=pop.best, history=history)


def neh(instance: Instance) -> tuple[int, ...]:
    p = instance.as_array()
    totals = p.sum(axis=0)
    # descending total time, lower index first on ties
    order = sorted(range(instance.n_jobs), key=lambda j: (-int(totals[j]), j))
    seq: list[int] = []
    for job in order:
        best_pos, best_val = 0, None
        for pos in range(len(seq) + 1):
            val = partial_makespan(instance, seq[:pos] + [job] + seq[pos:])
            if best_val is None or val < best_val:
                best_pos, best_val = pos, val
        seq.insert(best_pos, job)
    return tuple(seq)


def johnson_rule(times: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    """Optimal order for a two-machine flow shop given ``(a_j, b_j)`` per job."""
    # a == b may go to either group; putting it first reproduces published CDS values
    first = sorted((a, j) for j, (a, b) in enumerate(times) if a <= b)
    last = sorted((-b, j) for j, (a, b) in enumerate(times) if a > b)
    return tuple(j for _, j in first) + tuple(j for _, j in last)


def cds(instance: Instance) -> tuple[int, ...]:
    m = instance.n_machines
    if m < 2:
        raise ValueError("CDS needs at least two machines")
    p = instance.as_array()
    best, best_val = None, None
    for k in range(1, m):
        a = p[:k].sum(axis=0)
        b = p[m - k:].sum(axis=0)
        seq = johnson_rule(list(zip(a.tolist(), b.tolist())))
        val = makespan(instance, seq)
        if best_val is None or val < best_val:
            best, best_val = seq, val
    return best
