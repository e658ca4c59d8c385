"""RL control of the GA: state encoding, action codec, rewards and the
offline (DQN), frozen-inference and online (Sarsa(0)) run loops."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ga import (
    GenerationParams,
    Individual,
    Method,
    Population,
    StepOutcome,
    average_fitness,
    ga_step,
    init_population,
    population_entropy,
)
from .pfsp import Instance
from .qnet import N_ACTIONS, QNetwork, forward, train_step

log = logging.getLogger(__name__)

METHODS = (Method.ELITISM, Method.ROULETTE, Method.RANK)
RATES = (1 / 6, 1 / 2, 5 / 6)


@dataclass(frozen=True)
class AgentState:
    avg_fitness_norm: float
    entropy_norm: float

    def as_array(self) -> np.ndarray:
        return np.array([self.avg_fitness_norm, self.entropy_norm])


@dataclass(frozen=True)
class Action:
    index: int
    method: Method
    p_s: float
    p_mut: float

    def params(self) -> GenerationParams:
        return GenerationParams(self.method, self.p_s, self.p_mut)


def decode_action(index: int) -> Action:
    if not 0 <= index < N_ACTIONS:
        raise ValueError(f"action index {index} outside 0..{N_ACTIONS - 1}")
    m, rest = divmod(int(index), 9)
    s, p = divmod(rest, 3)
    return Action(int(index), METHODS[m], RATES[s], RATES[p])


def encode_action(method: Method | str, p_s: float, p_mut: float) -> int:
    m = METHODS.index(Method(method))
    s = min(range(3), key=lambda k: abs(RATES[k] - p_s))
    p = min(range(3), key=lambda k: abs(RATES[k] - p_mut))
    if not (math.isclose(RATES[s], p_s) and math.isclose(RATES[p], p_mut)):
        raise ValueError(f"rates ({p_s}, {p_mut}) are not action representatives")
    return m * 9 + s * 3 + p


@dataclass
class RlParams:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.5
    beta: float = 1.0
    replay_capacity: int = 10_000
    batch_size: int = 32
    target_sync_interval: int = 100
    policy_mode: str = "epsilon_greedy"
    # learner sees total_reward / initial_best; raw rewards are makespan units
    normalize_reward: bool = True
    hidden: tuple[int, ...] = (32, 32)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.policy_mode not in ("epsilon_greedy", "softmax"):
            raise ValueError(f"unknown policy_mode {self.policy_mode!r}")
        self.hidden = tuple(int(h) for h in self.hidden)

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (2, *self.hidden, N_ACTIONS)


@dataclass(frozen=True)
class GaBudget:
    episodes: int
    iterations: int
    pop_size: int

    def __post_init__(self):
        if min(self.episodes, self.iterations) < 1 or self.pop_size < 2:
            raise ValueError(f"invalid GA budget {self}")


@dataclass
class Transition:
    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    a_next: Optional[int] = None
    terminal: bool = False


def encode_state(pop: Population, initial_best: float) -> AgentState:
    if initial_best <= 0:
        raise ValueError("initial_best must be positive")
    H = population_entropy(pop)
    M = pop.size
    ent = H / math.log2(M) if M > 1 else 0.0
    return AgentState(average_fitness(pop) / initial_best, ent)


def softmax_policy(q, beta: float = 1.0) -> np.ndarray:
    if beta <= 0:
        raise ValueError("beta must be positive")
    z = beta * np.asarray(q, dtype=float)
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def epsilon_greedy(q, epsilon: float, rng: np.random.Generator) -> int:
    q = np.asarray(q)
    if rng.random() < epsilon:
        return int(rng.integers(q.size))
    return int(np.argmax(q))  # first maximum on ties


def choose_action(q, rl: RlParams, rng: np.random.Generator) -> int:
    if rl.policy_mode == "softmax":
        return int(rng.choice(len(q), p=softmax_policy(q, rl.beta)))
    return epsilon_greedy(q, rl.epsilon, rng)


def children_reward(parent_f: Sequence[float], child_f: Sequence[float]) -> float:
    """Positive when the two children are jointly shorter than their parents."""
    return (parent_f[0] + parent_f[1]) - (child_f[0] + child_f[1])


def selection_reward(old_best: float, new_best: float) -> float:
    return old_best - new_best


def total_reward(outcome: StepOutcome) -> float:
    r = sum(children_reward(p.parents, p.children) for p in outcome.pairs)
    return r + selection_reward(outcome.old_best, outcome.new_best)


def q_target(tr: Transition, gamma: float, target_net: QNetwork) -> float:
    if tr.terminal:
        return float(tr.r)
    return float(tr.r + gamma * np.max(forward(target_net, tr.s_next)))


def batch_targets(batch: Sequence[Transition], gamma: float, target_net: QNetwork) -> np.ndarray:
    """Vectorised ``q_target`` over a replay batch."""
    r = np.array([t.r for t in batch], dtype=float)
    live = np.array([not t.terminal for t in batch])
    q_next = forward(target_net, np.array([t.s_next for t in batch])).max(axis=1)
    return r + gamma * q_next * live


def sarsa_update(net: QNetwork, tr: Transition, alpha: float, gamma: float) -> float:
    """Semi-gradient Sarsa(0) step on ``net`` (in place); returns the loss."""
    if tr.terminal:
        y = float(tr.r)
    else:
        if tr.a_next is None:
            raise ValueError("non-terminal Sarsa transition needs a_next")
        y = float(tr.r + gamma * forward(net, tr.s_next)[tr.a_next])
    return train_step(net, [(tr.s, tr.a, y)], alpha)


class ReplayBuffer:
    def __init__(self, capacity: int):
        self.items: deque[Transition] = deque(maxlen=capacity)

    def __len__(self):
        return len(self.items)

    def push(self, tr: Transition) -> None:
        self.items.append(tr)

    def sample(self, k: int, rng: np.random.Generator) -> list[Transition]:
        k = min(k, len(self.items))
        idx = rng.choice(len(self.items), size=k, replace=False)
        return [self.items[int(i)] for i in idx]


class DQNLearner:
    """Replay buffer plus a periodically synchronised target network."""

    def __init__(self, net: QNetwork, rl: RlParams):
        self.net = net
        self.target = net.copy()
        self.rl = rl
        self.buffer = ReplayBuffer(rl.replay_capacity)
        self.steps = 0

    def observe(self, tr: Transition, rng: np.random.Generator) -> float:
        self.buffer.push(tr)
        batch = self.buffer.sample(self.rl.batch_size, rng)
        y = batch_targets(batch, self.rl.gamma, self.target)
        loss = train_step(self.net, list(zip([t.s for t in batch], [t.a for t in batch], y)),
                          self.rl.alpha)
        self.steps += 1
        if self.steps % self.rl.target_sync_interval == 0:
            self.target = self.net.copy()
        return loss


@dataclass
class RunResult:
    best: Individual
    history: list[dict] = field(default_factory=list)
    net: Optional[QNetwork] = None
    log: list[dict] = field(default_factory=list)
    per_instance: dict[str, Individual] = field(default_factory=dict)

    @property
    def generations(self) -> int:
        return len(self.history)


def _episode_start(instance: Instance, budget: GaBudget, rng):
    pop = init_population(instance, budget.pop_size, rng)
    return pop, float(pop.best.fitness)


def _learning_reward(outcome: StepOutcome, initial_best: float, rl: RlParams) -> float:
    r = total_reward(outcome)
    return r / initial_best if rl.normalize_reward else r


def train_offline(instances: Sequence[Instance], budget: GaBudget, rl: RlParams,
                  rng: np.random.Generator, net: Optional[QNetwork] = None) -> RunResult:
    """DQN training; episode ``e`` runs on ``instances[e % len(instances)]``.

    ``best`` is the best individual seen on ``instances[0]``;
    ``per_instance`` holds the best for every training instance.
    """
    if not instances:
        raise ValueError("no training instances")
    net = net or QNetwork.init(rng, rl.layer_dims)
    learner = DQNLearner(net, rl)
    best: dict[str, Individual] = {}
    result = RunResult(best=None, net=net)
    for ep in range(budget.episodes):
        instance = instances[ep % len(instances)]
        pop, init_best = _episode_start(instance, budget, rng)
        s = encode_state(pop, init_best).as_array()
        ret, losses = 0.0, []
        for t in range(budget.iterations):
            a = choose_action(forward(net, s), rl, rng)
            pop, outcome = ga_step(instance, pop, decode_action(a).params(), rng)
            r = _learning_reward(outcome, init_best, rl)
            s_next = encode_state(pop, init_best).as_array()
            tr = Transition(s, a, r, s_next, terminal=t == budget.iterations - 1)
            losses.append(learner.observe(tr, rng))
            ret += r
            s = s_next
        cur = best.get(instance.id)
        if cur is None or pop.best.fitness < cur.fitness:
            best[instance.id] = pop.best
        rec = {"episode": ep, "instance": instance.id, "cumulative_reward": ret,
               "mean_loss": float(np.mean(losses)), "best_fitness": pop.best.fitness}
        result.log.append(rec)
        log.info("train episode %d %s reward=%.4f loss=%.6f best=%d", ep, instance.id,
                 ret, rec["mean_loss"], pop.best.fitness)
    result.best = best[instances[0].id]
    result.per_instance = best
    return result


def run_frozen(net: QNetwork, instance: Instance, budget: GaBudget,
               rng: np.random.Generator) -> RunResult:
    """Greedy control with fixed weights; no rewards, no learning."""
    best = None
    history = []
    for ep in range(budget.episodes):
        pop, init_best = _episode_start(instance, budget, rng)
        for t in range(budget.iterations):
            st = encode_state(pop, init_best)
            a = int(np.argmax(forward(net, st.as_array())))
            pop, _ = ga_step(instance, pop, decode_action(a).params(), rng)
            history.append({"episode": ep, "generation": t, "action": a,
                            "best_fitness": pop.best.fitness,
                            "entropy": st.entropy_norm})
        if best is None or pop.best.fitness < best.fitness:
            best = pop.best
    return RunResult(best=best, history=history, net=net)


def run_online(instance: Instance, budget: GaBudget, rl: RlParams,
               rng: np.random.Generator, net: Optional[QNetwork] = None) -> RunResult:
    """Sarsa(0) control that learns while solving; weights persist across episodes."""
    net = net or QNetwork.init(rng, rl.layer_dims)
    best = None
    history, episode_log = [], []
    for ep in range(budget.episodes):
        pop, init_best = _episode_start(instance, budget, rng)
        st = encode_state(pop, init_best)
        s = st.as_array()
        a = choose_action(forward(net, s), rl, rng)
        ret, losses = 0.0, []
        for t in range(budget.iterations):
            pop, outcome = ga_step(instance, pop, decode_action(a).params(), rng)
            r = _learning_reward(outcome, init_best, rl)
            nxt = encode_state(pop, init_best)
            s_next = nxt.as_array()
            terminal = t == budget.iterations - 1
            a_next = None if terminal else choose_action(forward(net, s_next), rl, rng)
            losses.append(sarsa_update(net, Transition(s, a, r, s_next, a_next, terminal),
                                       rl.alpha, rl.gamma))
            history.append({"episode": ep, "generation": t, "action": a,
                            "best_fitness": pop.best.fitness, "entropy": st.entropy_norm,
                            "reward": total_reward(outcome)})
            ret += r
            st, s, a = nxt, s_next, a_next
        episode_log.append({"episode": ep, "instance": instance.id, "cumulative_reward": ret,
                            "mean_loss": float(np.mean(losses)),
                            "best_fitness": pop.best.fitness})
        if best is None or pop.best.fitness < best.fitness:
            best = pop.best
    return RunResult(best=best, history=history, net=net, log=episode_log)
