"""Fidelity between the exact and the spectrum-substituted solutions."""

import numpy as np

from ..config import C_SAMPLE_RANGE, sample_c_values
from ..modules.heat import spectrum, substituted_spectrum, to_fourier
from ..records import ExperimentRecord, describe
from .base_campaign import BaseCampaign


def batched_fidelity(n: int, c: float, b: np.ndarray) -> np.ndarray:
    """F(A^-1 b, A'^-1 b) for every column of b, computed in the Fourier basis."""
    y = to_fourier(np.asarray(b, dtype=complex))
    exact = y / spectrum(n, c)[:, None]
    approx = y / substituted_spectrum(n, c)[:, None]
    overlap = np.abs(np.sum(np.conj(exact) * approx, axis=0)) ** 2
    norms = np.sum(np.abs(exact) ** 2, axis=0) * np.sum(np.abs(approx) ** 2, axis=0)
    return np.minimum(1.0, overlap / norms)


class SubstitutionCampaign(BaseCampaign):
    CAMPAIGN_NAME = "fig7"
    CAMPAIGN_PRIORITY = 70
    DESCRIPTION = "mean F(A^-1 b, A'^-1 b) over random b for uniformly drawn c"
    COLUMNS = ("n", "c", "mean_fidelity", "min_fidelity", "samples")
    DEFAULTS = {"qubits": (2, 3, 4, 5, 6, 7, 8), "samples": 1000, "c_samples": 20}

    @classmethod
    def c_grid(cls, config):
        if config.c_values:
            return list(config.c_values)
        return [float(c) for c in sample_c_values(cls.task_rng(config), config.c_samples, *C_SAMPLE_RANGE)]

    @classmethod
    def plan(cls, config):
        return [{"n": n, "c": c} for n in config.qubits for c in cls.c_grid(config)]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        n, c = task["n"], task["c"]
        size = 2 ** n
        b = rng.standard_normal((size, config.samples)) + 1j * rng.standard_normal((size, config.samples))
        fids = batched_fidelity(n, c, b / np.linalg.norm(b, axis=0))
        return [ExperimentRecord(
            experiment=cls.CAMPAIGN_NAME, n=n, c=c, method="substitution", metric="mean_fidelity",
            value=float(fids.mean()), seed=config.seed, mode="exact",
            extra={"mean_fidelity": float(fids.mean()), "min_fidelity": float(fids.min()),
                   "samples": config.samples},
        )]

    @classmethod
    def summarize(cls, config, records, logger):
        by_n = {n: describe([r.value for r in records if r.n == n]) for n in config.qubits}
        means = [by_n[n]["mean"] for n in config.qubits]
        return {
            "mean_fidelity_by_n": {str(n): by_n[n] for n in config.qubits},
            "non_decreasing": bool(all(b >= a - 0.005 for a, b in zip(means, means[1:]))),
        }
