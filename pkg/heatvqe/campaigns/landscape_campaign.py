"""Energy landscape of the two-qubit direct VQE demonstration."""

from ..modules.direct_vqe import build_hamiltonian, demo_problem, refine_minima, scan_landscape
from ..modules.statevector import Backend
from ..records import ExperimentRecord
from .base_campaign import BaseCampaign


class LandscapeCampaign(BaseCampaign):
    CAMPAIGN_NAME = "landscape"
    CAMPAIGN_PRIORITY = 90
    DESCRIPTION = "grid scan of E(theta1, theta2) for random zero-mean b at c = 0"
    COLUMNS = ("sample", "theta1", "theta2", "energy")
    DEFAULTS = {"qubits": (2,), "c_values": (0.0,), "samples": 1, "grid": 30}
    NEEDS_POSITIVE_C = False

    @classmethod
    def plan(cls, config):
        return [{"sample": s} for s in range(config.samples)]

    @classmethod
    def rows_per_task(cls, config, task):
        return config.grid ** 2

    @classmethod
    def run_task(cls, config, task, rng, logger):
        a, b = demo_problem(rng)
        hamiltonian = build_hamiltonian(a, b)
        backend = (
            Backend.sampled(config.shots, int(rng.integers(2 ** 31)))
            if config.mode == "shots" else Backend.exact()
        )
        scan = scan_landscape(hamiltonian, config.grid, backend)
        minima = refine_minima(scan, hamiltonian)
        logger.info(f"[Campaigns] landscape sample {task['sample']}: {len(minima)} minimum/minima below 1e-3")
        records = []
        for i, t1 in enumerate(scan.thetas):
            for j, t2 in enumerate(scan.thetas):
                records.append(ExperimentRecord(
                    experiment=cls.CAMPAIGN_NAME, n=2, c=0.0, method="direct", metric="energy",
                    value=float(scan.energies[i, j]), seed=config.seed, mode=config.mode, shots=config.shots,
                    extra={"sample": task["sample"], "theta1": float(t1), "theta2": float(t2),
                           "energy": float(scan.energies[i, j]), "minima": len(minima)},
                ))
        return records

    @classmethod
    def summarize(cls, config, records, logger):
        per_sample = {}
        for record in records:
            per_sample[record.extra["sample"]] = record.extra["minima"]
        return {"minima_per_sample": [per_sample[s] for s in sorted(per_sample)]}
