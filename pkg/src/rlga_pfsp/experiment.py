"""Seeded experiment grid over (instance x method x seed) and CSV output."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import baselines
from .agent import GaBudget, RlParams, run_frozen, run_online, train_offline
from .pfsp import Instance, makespan
from .qnet import QNetwork, load_model, save_model
from .taillard import select_instances

log = logging.getLogger(__name__)

METHODS = ("offline_train", "offline_frozen", "online", "standard_ga", "neh", "cds")
DETERMINISTIC = ("neh", "cds")

# per size class: training budget, CPU test budget (online and frozen), standard GA
TRAIN_BUDGETS = {
    "20_5": GaBudget(50, 100, 50),
    "50_10": GaBudget(100, 200, 100),
    "100_10": GaBudget(200, 300, 200),
}
TEST_BUDGETS = {
    "20_5": GaBudget(3, 50, 30),
    "50_10": GaBudget(5, 75, 100),
    "100_10": GaBudget(8, 100, 120),
}
GA_BUDGETS = {
    "20_5": GaBudget(1, 50, 30),
    "50_10": GaBudget(1, 100, 100),
    "100_10": GaBudget(1, 200, 200),
}

RUN_FIELDS = ["instance", "method", "seed", "best_makespan", "time_s", "generations"]


class ConfigError(ValueError):
    pass


@dataclass
class RunRecord:
    instance: str
    method: str
    seed: Optional[int]
    best_makespan: int
    permutation: tuple[int, ...]
    time_s: float
    generations: int
    trace: Optional[list[int]] = None


@dataclass
class ExperimentConfig:
    instances: list[str]
    methods: list[str]
    seeds: list[int] = field(default_factory=lambda: [0])
    size_class: Optional[str] = None
    budgets: dict[str, GaBudget] = field(default_factory=dict)
    rl: RlParams = field(default_factory=RlParams)
    output: Optional[str] = None
    model: Optional[str] = None
    trace: bool = False

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("method list is empty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}")
        if not self.instances:
            raise ConfigError("no instances configured")
        stochastic = set(self.methods) - set(DETERMINISTIC)
        if stochastic and not self.seeds:
            raise ConfigError("stochastic methods need at least one seed")
        if self.size_class is not None and self.size_class not in TRAIN_BUDGETS:
            raise ConfigError(f"unknown size class {self.size_class!r}")
        if "offline_frozen" in self.methods:
            if not self.model:
                raise ConfigError("offline_frozen needs a model path")
            if "offline_train" not in self.methods and not Path(self.model).exists():
                raise ConfigError(f"model file {self.model} does not exist")

    def budget(self, method: str, instance: Instance) -> GaBudget:
        if method in self.budgets:
            return self.budgets[method]
        cls = self.size_class or instance.size_class
        table = {"offline_train": TRAIN_BUDGETS, "standard_ga": GA_BUDGETS}.get(method, TEST_BUDGETS)
        if cls not in table:
            raise ConfigError(f"no default budget for {method} on class {cls}; set one explicitly")
        return table[cls]


def _budget(raw, name: str) -> GaBudget:
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    try:
        return GaBudget(int(raw.get("episodes", 1)), int(raw["iterations"]), int(raw["pop_size"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad budget in section {name!r}: {exc}") from exc


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a YAML experiment file; keyword overrides replace top-level keys."""
    try:
        doc = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    doc.update({k: v for k, v in overrides.items() if v is not None})
    rl_keys = {f.name for f in fields(RlParams)}
    rl_raw = doc.get("rl") or {}
    bad = set(rl_raw) - rl_keys
    if bad:
        raise ConfigError(f"unknown rl keys {sorted(bad)}")
    try:
        rl = RlParams(**rl_raw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    budgets = {m: _budget(doc[m], m) for m in METHODS if m in doc and doc[m]}
    return ExperimentConfig(
        instances=list(doc.get("instances") or []),
        methods=list(doc.get("methods") or []),
        seeds=[int(s) for s in doc.get("seeds", [0])],
        size_class=doc.get("class"),
        budgets=budgets,
        rl=rl,
        output=doc.get("output"),
        model=doc.get("model"),
        trace=bool(doc.get("trace", False)),
    )


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, round(time.perf_counter() - t0, 3)


def run_method(method: str, instance: Instance, seed: Optional[int], cfg: ExperimentConfig,
               net: Optional[QNetwork] = None) -> RunRecord:
    """Run one grid cell; timing covers the optimisation call only."""
    rng = np.random.default_rng(seed)
    trace = None
    if method in DETERMINISTIC:
        fn = baselines.neh if method == "neh" else baselines.cds
        perm, secs = _timed(lambda: fn(instance))
        gens = 0
    else:
        b = cfg.budget(method, instance)
        if method == "standard_ga":
            res, secs = _timed(lambda: baselines.standard_ga(instance, b.pop_size, b.iterations, rng))
        elif method == "online":
            res, secs = _timed(lambda: run_online(instance, b, cfg.rl, rng))
        elif method == "offline_frozen":
            res, secs = _timed(lambda: run_frozen(net, instance, b, rng))
        else:
            raise ConfigError(f"{method} is not a per-cell method")
        perm = res.best.perm
        gens = res.generations
        if cfg.trace:
            trace = [h["best_fitness"] for h in res.history]
    return RunRecord(instance.id, method, seed, makespan(instance, perm), tuple(perm),
                     secs, gens, trace)


def _verified(rec: RunRecord, inst: Instance) -> RunRecord:
    if makespan(inst, rec.permutation) != rec.best_makespan:
        raise RuntimeError(f"makespan mismatch for {rec.instance}/{rec.method}/{rec.seed}")
    return rec


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    instances: list[Instance] = []
    for spec in cfg.instances:
        try:
            instances.extend(select_instances(spec))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load instances {spec!r}: {exc}") from exc
    by_id = {inst.id: inst for inst in instances}
    records = []
    net = None
    if "offline_train" in cfg.methods:
        # one model over all configured instances, trained with the first seed
        seed = cfg.seeds[0]
        b = cfg.budget("offline_train", instances[0])
        res, secs = _timed(lambda: train_offline(instances, b, cfg.rl, np.random.default_rng(seed)))
        net = res.net
        if cfg.model:
            save_model(net, cfg.model)
        for inst in instances:
            ind = res.per_instance.get(inst.id)
            if ind is not None:
                records.append(RunRecord(inst.id, "offline_train", seed, ind.fitness, ind.perm,
                                         secs, b.episodes * b.iterations))
    if "offline_frozen" in cfg.methods and net is None:
        net = load_model(cfg.model)
    for inst in instances:
        for method in cfg.methods:
            if method == "offline_train":
                continue
            seeds = [None] if method in DETERMINISTIC else cfg.seeds
            for seed in seeds:
                log.info("running %s %s seed=%s", inst.id, method, seed)
                records.append(run_method(method, inst, seed, cfg, net))
    order = {m: k for k, m in enumerate(cfg.methods)}
    records.sort(key=lambda r: (list(by_id).index(r.instance), order[r.method],
                                -1 if r.seed is None else r.seed))
    return [_verified(r, by_id[r.instance]) for r in records]


def emit_results(records: list[RunRecord], out_dir: str | Path) -> dict[str, Path]:
    """Write runs.csv, summary.csv and permutations.csv into ``out_dir``."""
    if not records:
        raise ValueError("no records to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / f"{k}.csv" for k in ("runs", "summary", "permutations")}
    with paths["runs"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_FIELDS)
        for r in records:
            w.writerow([r.instance, r.method, "" if r.seed is None else r.seed,
                        r.best_makespan, f"{r.time_s:.3f}", r.generations])
    with paths["permutations"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "method", "seed", "permutation"])
        for r in records:
            w.writerow([r.instance, r.method, "" if r.seed is None else r.seed,
                        " ".join(map(str, r.permutation))])
    with paths["summary"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "method", "runs", "min", "mean", "max", "mean_time_s"])
        for (inst, method), cell in summarize(records).items():
            w.writerow([inst, method, cell["runs"], cell["min"], f"{cell['mean']:.2f}",
                        cell["max"], f"{cell['mean_time_s']:.3f}"])
    if any(r.trace for r in records):
        paths["traces"] = out / "traces.csv"
        with paths["traces"].open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["instance", "method", "seed", "generation", "best_fitness"])
            for r in records:
                for g, f in enumerate(r.trace or []):
                    w.writerow([r.instance, r.method, "" if r.seed is None else r.seed, g, f])
    return paths


def summarize(records: list[RunRecord]) -> dict[tuple[str, str], dict]:
    cells: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.instance, r.method), []).append(r)
    out = {}
    for key, rs in cells.items():
        vals = [r.best_makespan for r in rs]
        out[key] = {"runs": len(rs), "min": min(vals), "mean": float(np.mean(vals)),
                    "max": max(vals), "mean_time_s": float(np.mean([r.time_s for r in rs]))}
    return out


def read_runs(path: str | Path) -> list[dict]:
    """Parse runs.csv back into typed rows."""
    rows = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({
                "instance": row["instance"],
                "method": row["method"],
                "seed": int(row["seed"]) if row["seed"] else None,
                "best_makespan": int(row["best_makespan"]),
                "time_s": float(row["time_s"]),
                "generations": int(row["generations"]),
            })
    return rows


def read_permutations(path: str | Path) -> dict[tuple, tuple[int, ...]]:
    with Path(path).open(newline="") as fh:
        return {
            (row["instance"], row["method"], int(row["seed"]) if row["seed"] else None):
                tuple(int(j) for j in row["permutation"].split())
            for row in csv.DictReader(fh)
        }
