"""Multi-step time evolution and per-step infidelity growth."""

import numpy as np

from ..errors import ConfigError
from ..modules.heat import GridParams, HeatProblem, time_step_evolve
from ..modules.solvers import get_solver_class
from ..records import ExperimentRecord
from .base_campaign import BaseCampaign


def cosine_profile(n: int) -> np.ndarray:
    """chi_j = 1 + cos(2 pi j / N)."""
    j = np.arange(2 ** n)
    return 1.0 + np.cos(2 * np.pi * j / 2 ** n)


class EvolveCampaign(BaseCampaign):
    CAMPAIGN_NAME = "evolve"
    CAMPAIGN_PRIORITY = 20
    DESCRIPTION = "eps_i per implicit step and the growth bound eps_{i+1} <= (5 + c) eps_i"
    COLUMNS = ("solver", "n", "c", "step", "infidelity", "growth_ratio", "bound", "bound_holds")
    DEFAULTS = {"qubits": (3,), "c_values": (2.0,), "steps": 4, "solvers": ("ata",)}

    @classmethod
    def prepare(cls, config):
        config = super().prepare(config)
        for name in config.solvers:
            try:
                solver = get_solver_class(name)
            except KeyError as e:
                raise ConfigError(str(e)) from e
            for n in config.qubits:
                for c in config.c_values:
                    if not solver.supports(n, c):
                        raise ConfigError(f"solver {name} does not support n={n}, c={c:g}")
        return config

    @classmethod
    def plan(cls, config):
        return [
            {"solver": s, "n": n, "c": c}
            for s in config.solvers for n in config.qubits for c in config.c_values
        ]

    @classmethod
    def rows_per_task(cls, config, task):
        return config.steps

    @classmethod
    def run_task(cls, config, task, rng, logger):
        n, c = task["n"], task["c"]
        problem = HeatProblem(GridParams.from_c(n, c, config.steps), cosine_profile(n))
        options = {}
        if task["solver"] == "ata":
            options = {"target": config.target if config.target is not None else 0.99,
                       "max_depth": config.max_depth}
        traj = time_step_evolve(problem, get_solver_class(task["solver"]), options=options, logger=logger)
        ratios = [None] + traj.growth_ratios()
        records = []
        for step, eps in enumerate(traj.infidelity, start=1):
            ratio = ratios[step - 1]
            records.append(ExperimentRecord(
                experiment=cls.CAMPAIGN_NAME, n=n, c=c, method=task["solver"], metric="infidelity",
                value=eps, seed=config.seed,
                extra={"solver": task["solver"], "step": step, "infidelity": eps,
                       "growth_ratio": ratio, "bound": traj.bound,
                       "bound_holds": ratio is None or ratio <= traj.bound},
            ))
        return records

    @classmethod
    def summarize(cls, config, records, logger):
        return {"bound_holds": bool(all(r.extra["bound_holds"] for r in records))}
