"""Ansatz tree depth needed for a target fidelity, against n and c."""

from ..config import random_b
from ..errors import SummaryError
from ..modules.ansatz_tree import run
from ..modules.heat import FourierSystem
from ..modules.statevector import Backend
from ..records import summarize
from .base_campaign import BaseCampaign


class TreeDepthCampaign(BaseCampaign):
    CAMPAIGN_NAME = "fig10"
    CAMPAIGN_PRIORITY = 60
    DESCRIPTION = "ATA depth to fidelity target on A' for n and c"
    COLUMNS = ("n", "c", "depth", "fidelity", "loss", "measurements", "censored", "seed")
    DEFAULTS = {
        "qubits": (2, 3, 4, 5, 6, 7, 8),
        "c_values": (0.1, 0.5, 1.0, 2.0),
        "samples": 1,
        "target": 0.99,
    }

    @classmethod
    def plan(cls, config):
        return [
            {"n": n, "c": c, "sample": s}
            for c in config.c_values for n in config.qubits for s in range(config.samples)
        ]

    @classmethod
    def run_task(cls, config, task, rng, logger):
        system = FourierSystem.heat(task["n"], task["c"], random_b(task["n"], rng), substituted=True)
        backend = (
            Backend.sampled(config.shots, int(rng.integers(2 ** 31)))
            if config.mode == "shots" else Backend.exact()
        )
        result = run(system, target=config.target, max_depth=config.max_depth, backend=backend, logger=logger)
        record = result.to_record(config.seed, config.mode, config.shots, cls.CAMPAIGN_NAME)
        record.extra["sample"] = task["sample"]
        return [record]

    @classmethod
    def summarize(cls, config, records, logger):
        rows = [r.as_row() for r in records]
        classification = {}
        for c in config.c_values:
            series = [row for row in rows if row["c"] == c]
            try:
                fit = summarize(series, x="n", y="depth", group_by="c", logger=logger)[0]
                classification[f"{c:g}"] = fit.to_dict()
            except SummaryError as e:
                logger.warning(f"[Campaigns] fig10 c={c:g}: {e}")
                classification[f"{c:g}"] = {"classification": "censored", "reason": str(e)}
        return {"fits": classification}
