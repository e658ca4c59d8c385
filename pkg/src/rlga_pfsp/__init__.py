"""Genetic algorithm for permutation flow-shop scheduling whose selection and
mutation settings are chosen each generation by a Q-learning agent."""

from .agent import (
    Action,
    AgentState,
    GaBudget,
    RlParams,
    decode_action,
    encode_action,
    run_frozen,
    run_online,
    train_offline,
)
from .baselines import cds, johnson_rule, neh, standard_ga
from .ga import GenerationParams, Individual, Method, Population, ga_step, init_population
from .pfsp import Instance, load_instances, makespan, parse_taillard, validate_permutation
from .qnet import QNetwork, load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "Action", "AgentState", "GaBudget", "RlParams", "decode_action", "encode_action",
    "run_frozen", "run_online", "train_offline", "cds", "johnson_rule", "neh", "standard_ga",
    "GenerationParams", "Individual", "Method", "Population", "ga_step", "init_population",
    "Instance", "load_instances", "makespan", "parse_taillard", "validate_permutation",
    "QNetwork", "load_model", "save_model",
]
