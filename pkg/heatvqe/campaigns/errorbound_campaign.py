"""Accumulated arithmetic error over many implicit steps."""

from ..modules.heat import error_accumulation, error_recursion, total_error_estimate
from ..records import ExperimentRecord
from .base_campaign import BaseCampaign


class ErrorBoundCampaign(BaseCampaign):
    CAMPAIGN_NAME = "errorbound"
    CAMPAIGN_PRIORITY = 10
    DESCRIPTION = "closed-form error accumulation against the step recursion"
    COLUMNS = ("c", "n_tau", "closed_form", "recursion", "total_estimate")
    DEFAULTS = {"c_values": (0.1, 0.5, 1.0, 2.0), "steps": 10, "eps_tilde": 1e-3}

    @classmethod
    def plan(cls, config):
        return [{"c": c} for c in config.c_values]

    @classmethod
    def rows_per_task(cls, config, task):
        return config.steps

    @classmethod
    def run_task(cls, config, task, rng, logger):
        c, eps = task["c"], config.eps_tilde
        history = error_recursion(eps, c, config.steps)
        records = []
        for n_tau in range(1, config.steps + 1):
            closed = error_accumulation(eps, c, n_tau)
            records.append(ExperimentRecord(
                experiment=cls.CAMPAIGN_NAME, n=0, c=c, method="error-model", metric="closed_form",
                value=closed, seed=config.seed,
                extra={"n_tau": n_tau, "closed_form": closed, "recursion": history[n_tau - 1],
                       "total_estimate": total_error_estimate(eps, c, n_tau)},
            ))
        return records

    @classmethod
    def summarize(cls, config, records, logger):
        worst = max(abs(r.extra["closed_form"] - r.extra["recursion"]) / r.extra["recursion"] for r in records)
        return {"max_relative_gap": worst}
