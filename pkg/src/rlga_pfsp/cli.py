"""Command-line entry point: ``rlga-pfsp {train,solve,bench,baselines}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from .agent import GaBudget, RlParams, train_offline
from .experiment import (
    METHODS,
    TRAIN_BUDGETS,
    ConfigError,
    ExperimentConfig,
    emit_results,
    load_config,
    run_experiment,
    run_method,
    summarize,
)
from .qnet import load_model, save_model
from .taillard import select_instances

log = logging.getLogger("rlga_pfsp")


def _budget_override(args, default: GaBudget | None) -> GaBudget | None:
    vals = (args.episodes, args.iterations, args.pop_size)
    if all(v is None for v in vals):
        return default
    if default is None:
        default = GaBudget(1, 50, 30)
    return GaBudget(args.episodes or default.episodes, args.iterations or default.iterations,
                    args.pop_size or default.pop_size)


def _rl(args) -> RlParams:
    return RlParams(alpha=args.alpha, gamma=args.gamma, epsilon=args.epsilon, beta=args.beta,
                    policy_mode=args.policy)


def _add_budget(p):
    p.add_argument("--episodes", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--pop-size", type=int)


def _add_rl(p):
    d = RlParams()
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--epsilon", type=float, default=d.epsilon)
    p.add_argument("--beta", type=float, default=d.beta)
    p.add_argument("--policy", choices=["epsilon_greedy", "softmax"], default=d.policy_mode)


def cmd_train(args) -> int:
    instances = [inst for spec in args.instances for inst in select_instances(spec)]
    budget = _budget_override(args, TRAIN_BUDGETS[args.size_class])
    res = train_offline(instances, budget, _rl(args), np.random.default_rng(args.seed))
    save_model(res.net, args.out)
    if args.log:
        with open(args.log, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["episode", "instance", "cumulative_reward",
                                               "mean_loss", "best_fitness"])
            w.writeheader()
            w.writerows(res.log)
    print(f"model written to {args.out} ({budget.episodes} episodes)")
    return 0


def cmd_solve(args) -> int:
    insts = select_instances(args.instance)
    inst = insts[0]
    if args.method == "offline_train":
        raise ConfigError("use the train subcommand for offline training")
    budgets = {}
    b = _budget_override(args, None)
    if b is not None:
        budgets[args.method] = b
    cfg = ExperimentConfig([args.instance], [args.method], [args.seed], size_class=args.size_class,
                           budgets=budgets, rl=_rl(args), model=args.model)
    net = load_model(args.model) if args.method == "offline_frozen" else None
    rec = run_method(args.method, inst, args.seed, cfg, net)
    print(json.dumps({"instance": rec.instance, "method": rec.method, "seed": rec.seed,
                      "best_makespan": rec.best_makespan, "permutation": list(rec.permutation),
                      "time_s": rec.time_s, "generations": rec.generations}))
    return 0


def cmd_bench(args) -> int:
    cfg = load_config(args.config, output=args.output)
    records = run_experiment(cfg)
    out = cfg.output or "results"
    paths = emit_results(records, out)
    for key, cell in _summary_lines(records):
        print(key, cell)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0


def _summary_lines(records):
    for (inst, method), c in summarize(records).items():
        yield f"{inst:<12} {method:<15}", (f"min={c['min']} mean={c['mean']:.1f} "
                                           f"max={c['max']} t={c['mean_time_s']:.3f}s")


def cmd_baselines(args) -> int:
    cfg = ExperimentConfig(args.instances, ["neh", "cds"], [])
    records = run_experiment(cfg)
    for r in records:
        print(f"{r.instance:<12} {r.method:<5} {r.best_makespan:>6}  {r.time_s:.3f}s")
    if args.output:
        emit_results(records, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlga-pfsp",
                                     description="RL-controlled GA for permutation flow shops")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train an offline (DQN) model")
    p.add_argument("--instances", nargs="+", required=True,
                   help="instance files, optionally path:1,7 to pick blocks")
    p.add_argument("--class", dest="size_class", choices=sorted(TRAIN_BUDGETS), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", help="per-episode training log (CSV)")
    _add_budget(p)
    _add_rl(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("solve", help="solve one instance with one method")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--class", dest="size_class", choices=sorted(TRAIN_BUDGETS))
    _add_budget(p)
    _add_rl(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a configured experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("baselines", help="NEH and CDS on the given instances")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_baselines)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
