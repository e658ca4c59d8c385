"""Genetic algorithm substrate for the PFSP.

Populations are kept sorted by makespan (index 0 is the best). All
randomness comes from the ``numpy.random.Generator`` handed in by the
caller, so a run is reproducible from its seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .pfsp import Instance, makespan, random_permutation


class Method(str, Enum):
    ELITISM = "Elitism"
    ROULETTE = "Roulette"
    RANK = "Rank"


@dataclass(frozen=True)
class Individual:
    perm: tuple[int, ...]
    fitness: int

    @classmethod
    def evaluate(cls, instance: Instance, perm: Sequence[int]) -> "Individual":
        perm = tuple(int(j) for j in perm)
        return cls(perm, makespan(instance, perm))


@dataclass(frozen=True)
class Population:
    members: tuple[Individual, ...]
    generation: int = 0

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def best(self) -> Individual:
        return self.members[0]

    def fitnesses(self) -> np.ndarray:
        return np.array([ind.fitness for ind in self.members], dtype=float)


@dataclass(frozen=True)
class GenerationParams:
    method: Method
    p_s: float
    p_mut: float

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not 0.0 < self.p_s <= 1.0:
            raise ValueError(f"selection rate {self.p_s} outside (0, 1]")
        if not 0.0 <= self.p_mut <= 1.0:
            raise ValueError(f"mutation rate {self.p_mut} outside [0, 1]")


@dataclass
class PairOutcome:
    parents: tuple[int, int]
    children: tuple[int, int]


@dataclass
class StepOutcome:
    old_best: int
    new_best: int
    pairs: list[PairOutcome] = field(default_factory=list)
    mutated: int = 0


def _sorted(members: Sequence[Individual]) -> tuple[Individual, ...]:
    # stable: equal fitness keeps insertion order
    return tuple(sorted(members, key=lambda ind: ind.fitness))


def init_population(instance: Instance, size: int, rng: np.random.Generator) -> Population:
    if size < 2:
        raise ValueError("population size must be >= 2")
    members = [
        Individual.evaluate(instance, random_permutation(instance.n_jobs, rng))
        for _ in range(size)
    ]
    return Population(_sorted(members), generation=0)


def n_pairs(pop_size: int, p_s: float) -> int:
    return math.ceil(p_s * pop_size / 2)


def selection_probabilities(pop: Population, method: Method) -> np.ndarray:
    """Per-member sampling probabilities for Roulette and Rank selection."""
    M = pop.size
    if method is Method.ROULETTE:
        f = pop.fitnesses()
        w = (f.max() - f) + 1.0
        return w / w.sum()
    if method is Method.RANK:
        ranks = np.arange(1, M + 1)
        return 2.0 * (M - ranks + 1) / (M * (M + 1))
    raise ValueError(f"{method} has no sampling distribution")


def _partner(first: int, draw, limit: int) -> int:
    second = draw()
    for _ in range(limit):
        if second != first:
            break
        second = draw()
    return second


def select_parents(pop: Population, method: Method | str, p_s: float,
                   rng: np.random.Generator) -> list[tuple[Individual, Individual]]:
    M = pop.size
    if M < 2:
        raise ValueError("selection needs at least two members")
    if not 0.0 < p_s <= 1.0:
        raise ValueError(f"selection rate {p_s} outside (0, 1]")
    method = Method(method)
    K = n_pairs(M, p_s)
    members = pop.members
    pairs = []
    if method is Method.ELITISM:
        pool = max(2, min(M, math.ceil(p_s * M)))
        deck: list[int] = []
        for _ in range(K):
            if len(deck) < 2:
                deck.extend(int(i) for i in rng.permutation(pool))
            a = deck.pop()
            b = deck.pop()
            if a == b:
                b = _partner(a, lambda: int(rng.integers(pool)), M)
            pairs.append((members[a], members[b]))
        return pairs
    probs = selection_probabilities(pop, method)
    draw = lambda: int(rng.choice(M, p=probs))  # noqa: E731
    for _ in range(K):
        a = draw()
        b = _partner(a, draw, M)
        pairs.append((members[a], members[b]))
    return pairs


def _fill(outer: Sequence[int], inner: Sequence[int], c1: int, c2: int) -> tuple[int, ...]:
    child = list(outer)
    kept = set(outer[:c1]) | set(outer[c2:])
    missing = [j for j in inner if j not in kept]
    child[c1:c2] = missing
    return tuple(child)


def draw_cuts(n: int, rng: np.random.Generator) -> tuple[int, int]:
    c1, c2 = sorted(int(c) for c in rng.choice(n + 1, size=2, replace=False))
    return c1, c2


def crossover_two_point_v1(p1: Sequence[int], p2: Sequence[int],
                           rng: Optional[np.random.Generator] = None,
                           cuts: Optional[tuple[int, int]] = None):
    """Two-point crossover, version I.

    Child 1 keeps ``p1`` outside ``[c1, c2)``; the interior holds the
    remaining jobs in the order they occur in ``p2``. Child 2 swaps roles.
    """
    n = len(p1)
    if len(p2) != n:
        raise ValueError("parents differ in length")
    if n < 2:
        return tuple(p1), tuple(p2)
    if cuts is None:
        c1, c2 = draw_cuts(n, rng)
    else:
        c1, c2 = cuts
        if not 0 <= c1 < c2 <= n:
            raise ValueError(f"bad cut points {cuts}")
    return _fill(p1, p2, c1, c2), _fill(p2, p1, c1, c2)


def shift(perm: Sequence[int], i: int, j: int) -> tuple[int, ...]:
    """Remove the job at ``i`` and reinsert it so it ends up at ``j``."""
    seq = list(perm)
    job = seq.pop(i)
    seq.insert(j, job)
    return tuple(seq)


def shift_mutation(perm: Sequence[int], rng: np.random.Generator) -> tuple[int, ...]:
    n = len(perm)
    if n < 2:
        return tuple(perm)
    i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
    return shift(perm, i, j)


def update_population(pop: Population, offspring: Sequence[Individual]) -> Population:
    merged = _sorted(list(pop.members) + list(offspring))
    return Population(merged[: pop.size], generation=pop.generation + 1)


def average_fitness(pop: Population) -> float:
    return float(np.mean(pop.fitnesses()))


def population_entropy(pop: Population) -> float:
    """Shannon entropy (bits) of the fitness-share distribution f_m / sum(f)."""
    f = pop.fitnesses()
    if np.any(f <= 0):
        raise ValueError("entropy needs strictly positive fitness values")
    if f.size == 1:
        return 0.0
    p = f / f.sum()
    return float(-(p * np.log2(p)).sum())


def ga_step(instance: Instance, pop: Population, params: GenerationParams,
            rng: np.random.Generator) -> tuple[Population, StepOutcome]:
    """One generation: select, cross every pair, mutate, evaluate, replace."""
    old_best = pop.best.fitness
    outcome = StepOutcome(old_best=old_best, new_best=old_best)
    offspring = []
    for a, b in select_parents(pop, params.method, params.p_s, rng):
        kids = list(crossover_two_point_v1(a.perm, b.perm, rng))
        for k in range(2):
            if rng.random() < params.p_mut:
                kids[k] = shift_mutation(kids[k], rng)
                outcome.mutated += 1
        c1 = Individual.evaluate(instance, kids[0])
        c2 = Individual.evaluate(instance, kids[1])
        offspring += [c1, c2]
        outcome.pairs.append(PairOutcome((a.fitness, b.fitness), (c1.fitness, c2.fitness)))
    new_pop = update_population(pop, offspring)
    outcome.new_best = new_pop.best.fitness
    return new_pop, outcome
