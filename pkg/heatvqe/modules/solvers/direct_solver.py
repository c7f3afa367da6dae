"""Dense direct-VQE handle (exact mode, any n)."""

import logging

import numpy as np

from ...config import make_rng
from ..ansatz import AnsatzSpec
from ..direct_vqe import minimize_dense
from ..heat import build_matrix
from .base_solver import BaseSolver


class DirectSolver(BaseSolver):
    SOLVER_NAME = "direct"
    SOLVER_PRIORITY = 50
    OPERATOR = "original"
    DESCRIPTION = "variational minimization of <x|A(I-|b><b|)A|x> over a layered ansatz"
    DEFAULT_OPTIONS = {"ansatz": "cba", "layers": 2, "budget": 2000, "restarts": 3, "seed": 0}

    @classmethod
    def supports(cls, n, c):
        return n >= 2 and c > 0

    @classmethod
    def solve(cls, n, c, b, options=None, logger=None):
        log = logger or logging.getLogger("HeatVQE.Solvers")
        opts = cls.merged_options(options)
        spec = AnsatzSpec(opts["ansatz"], n, int(opts["layers"]))
        result = minimize_dense(
            build_matrix(n, c), np.asarray(b), spec,
            rng=make_rng(opts["seed"]), budget=int(opts["budget"]), restarts=int(opts["restarts"]),
        )
        if not result.converged:
            log.warning(f"[Solvers] direct: energy {result.energy:.3e} after {result.evaluations} evaluations")
        return result.x
