"""Hadamard-test VQE handle."""

import logging

from ...config import make_rng
from ..ansatz import AnsatzSpec
from ..hadamard_vqe import minimize
from ..heat import FourierSystem
from ..statevector import Backend
from .base_solver import BaseSolver


class HadamardSolver(BaseSolver):
    SOLVER_NAME = "hadamard"
    SOLVER_PRIORITY = 40
    OPERATOR = "original"
    DESCRIPTION = "Fourier-diagonal loss from three circuit runs per evaluation"
    DEFAULT_OPTIONS = {
        "ansatz": "cba",
        "layers": 2,
        "budget": 1000,
        "restarts": 5,
        "method": "Nelder-Mead",
        "seed": 0,
        "shots": 0,
    }

    @classmethod
    def supports(cls, n, c):
        return n >= 2 and c > 0

    @classmethod
    def solve(cls, n, c, b, options=None, logger=None):
        log = logger or logging.getLogger("HeatVQE.Solvers")
        opts = cls.merged_options(options)
        system = FourierSystem.heat(n, c, b, substituted=False)
        shots = int(opts["shots"])
        backend = Backend.sampled(shots, seed=opts["seed"]) if shots else Backend.exact()
        result = minimize(
            AnsatzSpec(opts["ansatz"], n, int(opts["layers"])), system, backend,
            rng=make_rng(opts["seed"]), restarts=int(opts["restarts"]),
            budget=int(opts["budget"]), method=opts["method"], logger=log,
        )
        if not result.converged:
            log.debug(f"[Solvers] hadamard: loss {result.loss:.3e}, fidelity {result.fidelity:.6f}")
        return system.b_norm * result.x
