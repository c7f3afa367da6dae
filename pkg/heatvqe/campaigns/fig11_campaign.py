"""Ranked Pauli weights of the inverse substituted operator."""

import numpy as np

from ..modules.pauli import inverse_weights, weight_distribution
from ..records import ExperimentRecord
from .base_campaign import BaseCampaign


class InverseWeightsCampaign(BaseCampaign):
    CAMPAIGN_NAME = "fig11"
    CAMPAIGN_PRIORITY = 50
    DESCRIPTION = "I/Z weights h_p of the Fourier-space inverse of A', ranked by magnitude"
    COLUMNS = ("n", "c", "rank", "word", "weight")
    DEFAULTS = {"qubits": (4, 6, 8), "c_values": (0.1, 0.5, 1.0, 2.0)}

    @classmethod
    def plan(cls, config):
        return [{"n": n, "c": c} for n in config.qubits for c in config.c_values]

    @classmethod
    def rows_per_task(cls, config, task):
        return 2 ** task["n"]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        weights = inverse_weights(task["n"], task["c"])
        # stable sort keeps the canonical word order among equal magnitudes
        ranked = sorted(weights, key=lambda t: -abs(t.weight))
        records = []
        for rank, term in enumerate(ranked, start=1):
            value = float(np.real(term.weight))
            records.append(ExperimentRecord(
                experiment=cls.CAMPAIGN_NAME, n=task["n"], c=task["c"], method="inverse-weights",
                metric="weight", value=value, seed=config.seed,
                extra={"rank": rank, "word": term.word, "weight": value},
            ))
        return records

    @classmethod
    def summarize(cls, config, records, logger):
        concentration = {}
        for n in config.qubits:
            for c in config.c_values:
                weights = inverse_weights(n, c)
                ranked = weight_distribution(weights)
                total = float(ranked.sum())
                concentration[f"n={n},c={c:g}"] = {
                    "top_word": max((t for t in weights if "Z" in t.word), key=lambda t: abs(t.weight)).word,
                    "top10_share": float(ranked[:10].sum() / total) if total else None,
                }
        return {"concentration": concentration}
