"""
HeatVQE: variational linear solvers for the implicitly discretized heat equation.

Public entry points are re-exported here; the figure campaigns live in
heatvqe.campaigns and the command line in heatvqe.cli.
"""

import logging

from .config import CampaignConfig, make_rng, random_b
from .errors import (
    CapExceededError,
    ConfigError,
    DivergentConditionError,
    EvolutionError,
    HeatVQEError,
    NonHermitianError,
    SingularSystemError,
    SummaryError,
    TreeExhaustedError,
)
from .modules.heat import FourierSystem, GridParams, HeatProblem, time_step_evolve
from .modules.solvers import get_all_solver_names, get_solver_class

__version__ = "0.1.0"

logger = logging.getLogger("HeatVQE")
logger.addHandler(logging.NullHandler())

__all__ = [
    "CampaignConfig",
    "CapExceededError",
    "ConfigError",
    "DivergentConditionError",
    "EvolutionError",
    "FourierSystem",
    "GridParams",
    "HeatProblem",
    "HeatVQEError",
    "NonHermitianError",
    "SingularSystemError",
    "SummaryError",
    "TreeExhaustedError",
    "get_all_solver_names",
    "get_solver_class",
    "make_rng",
    "random_b",
    "time_step_evolve",
]
