"""Fully depolarized (p = 1) Ansatz tree fidelity against n."""

import numpy as np

from ..config import C_SAMPLE_RANGE, random_b, sample_c_values
from ..modules.ansatz_tree import NOISE_DEPTH, collapsed_fidelity, run_with_noise
from ..modules.heat import FourierSystem
from ..records import ExperimentRecord
from .base_campaign import BaseCampaign


class NoiseFloorCampaign(BaseCampaign):
    """
    Set extra["simulate"] to grow every tree under p = 1 instead of using
    the closed-form endpoint F(b, A'^-1 b).
    """

    CAMPAIGN_NAME = "fig13"
    CAMPAIGN_PRIORITY = 30
    DESCRIPTION = "mean fidelity at p = 1 against n"
    COLUMNS = ("n", "p", "mean_fidelity", "std_fidelity", "samples")
    DEFAULTS = {"qubits": (2, 3, 4, 5, 6, 7, 8), "samples": 50, "c_samples": 20}

    @classmethod
    def plan(cls, config):
        return [{"n": n} for n in config.qubits]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        n = task["n"]
        simulate = bool(config.extra.get("simulate", False))
        fids = []
        for c in sample_c_values(rng, config.c_samples, *C_SAMPLE_RANGE):
            for _ in range(config.samples):
                system = FourierSystem.heat(n, float(c), random_b(n, rng))
                if simulate:
                    fids.append(run_with_noise(system, 1.0, max_depth=NOISE_DEPTH, logger=logger).fidelity)
                else:
                    fids.append(collapsed_fidelity(system))
        return [ExperimentRecord(
            experiment=cls.CAMPAIGN_NAME, n=n, c=float("nan"), method="ata-noise", metric="mean_fidelity",
            value=float(np.mean(fids)), seed=config.seed,
            extra={"p": 1.0, "mean_fidelity": float(np.mean(fids)), "std_fidelity": float(np.std(fids)),
                   "samples": len(fids)},
        )]

    @classmethod
    def summarize(cls, config, records, logger):
        means = [r.value for r in sorted(records, key=lambda r: r.n)]
        return {
            "mean_fidelity_by_n": {str(r.n): r.value for r in records},
            "decreasing_in_n": bool(all(b < a for a, b in zip(means, means[1:]))),
        }
