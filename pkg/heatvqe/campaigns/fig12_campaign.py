"""Ansatz tree fidelity under depolarizing noise on the Hadamard tests."""

import numpy as np

from ..config import C_SAMPLE_RANGE, random_b, sample_c_values
from ..modules.ansatz_tree import NOISE_DEPTH, run_with_noise
from ..modules.heat import FourierSystem
from ..records import ExperimentRecord, describe
from .base_campaign import BaseCampaign


class NoiseSweepCampaign(BaseCampaign):
    CAMPAIGN_NAME = "fig12"
    CAMPAIGN_PRIORITY = 40
    DESCRIPTION = "mean ATA fidelity against the depolarizing probability p"
    COLUMNS = ("n", "p", "mean_fidelity", "std_fidelity", "samples")
    DEFAULTS = {
        "qubits": (2, 3, 4),
        "p_values": (0.0, 0.25, 0.5, 0.75, 1.0),
        "samples": 10,
        "c_samples": 20,
        "max_depth": NOISE_DEPTH,
    }

    @classmethod
    def instances(cls, config, n):
        """(b, c) pairs shared by every p at one n."""
        rng = cls.task_rng(config, 1000 + n)
        cs = sample_c_values(rng, config.c_samples, *C_SAMPLE_RANGE)
        return [(random_b(n, rng), float(c)) for c in cs for _ in range(config.samples)]

    @classmethod
    def plan(cls, config):
        return [{"n": n, "p": p} for n in config.qubits for p in config.p_values]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        n, p = task["n"], task["p"]
        fids = [
            run_with_noise(FourierSystem.heat(n, c, b), p, max_depth=config.max_depth, logger=logger).fidelity
            for b, c in cls.instances(config, n)
        ]
        return [ExperimentRecord(
            experiment=cls.CAMPAIGN_NAME, n=n, c=float("nan"), method="ata-noise", metric="mean_fidelity",
            value=float(np.mean(fids)), seed=config.seed,
            extra={"p": p, "mean_fidelity": float(np.mean(fids)), "std_fidelity": float(np.std(fids)),
                   "samples": len(fids)},
        )]

    @classmethod
    def summarize(cls, config, records, logger):
        out = {}
        for n in config.qubits:
            series = sorted((r.extra["p"], r.value) for r in records if r.n == n)
            means = [v for _, v in series]
            out[str(n)] = {
                "fidelity": describe(means),
                "non_increasing_in_p": bool(all(b <= a + 1e-9 for a, b in zip(means, means[1:]))),
            }
        return {"by_n": out}
