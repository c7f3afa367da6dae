"""Layers needed by the Hadamard-test VQE to reach a target fidelity."""

from ..errors import SummaryError
from ..modules.hadamard_vqe import layers_to_fidelity
from ..modules.statevector import Backend
from ..records import ExperimentRecord, fit_series
from .base_campaign import BaseCampaign


class LayerScalingCampaign(BaseCampaign):
    CAMPAIGN_NAME = "fig5"
    CAMPAIGN_PRIORITY = 80
    DESCRIPTION = "M* (layers to mean fidelity target) against n for HEA/CBA/DAA"
    COLUMNS = ("ansatz", "n", "c", "M_star", "mean_fidelity", "censored")
    DEFAULTS = {
        "qubits": (2, 3, 4, 5, 6),
        "c_values": (0.1, 2.0),
        "samples": 20,
        "target": 0.99,
        "ansatz": "cba",
    }

    @classmethod
    def plan(cls, config):
        return [{"n": n, "c": c} for c in config.c_values for n in config.qubits]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        backend = Backend.sampled(config.shots, int(rng.integers(2 ** 31))) if config.mode == "shots" else None
        result = layers_to_fidelity(
            config.ansatz, task["n"], task["c"], target=config.target, samples=config.samples,
            layer_cap=config.layer_cap, rng=rng, backend=backend, budget=config.budget,
            method=config.optimizer, logger=logger,
        )
        return [ExperimentRecord(
            experiment=cls.CAMPAIGN_NAME, n=task["n"], c=task["c"], method=f"hadamard-{config.ansatz}",
            metric="M_star", value=float(result.m_star), seed=config.seed, mode=config.mode,
            shots=config.shots, censored=result.censored,
            extra={"ansatz": config.ansatz, "M_star": result.m_star, "mean_fidelity": result.mean_fidelity,
                   "layer_spread": result.layer_spread},
        )]

    @classmethod
    def summarize(cls, config, records, logger):
        fits = {}
        for c in config.c_values:
            series = [r for r in records if r.c == c and not r.censored and r.value > 0]
            try:
                fit = fit_series([r.n for r in series], [r.value for r in series], f"c={c:g}")
                fits[f"{c:g}"] = fit.to_dict()
            except SummaryError as e:
                logger.warning(f"[Campaigns] fig5 c={c:g}: {e}")
                fits[f"{c:g}"] = None
        spreads = [r.extra["layer_spread"] for r in records if r.extra["layer_spread"] is not None]
        return {"fits": fits, "max_layer_spread": max(spreads) if spreads else None}
