"""Ansatz tree handle on the substituted operator."""

import logging

from ..ansatz_tree import prepare_solution_circuit, run, solution_norm
from ..heat import FourierSystem
from ..statevector import Backend
from .base_solver import BaseSolver


class AnsatzTreeSolver(BaseSolver):
    SOLVER_NAME = "ata"
    SOLVER_PRIORITY = 60
    OPERATOR = "substituted"
    DESCRIPTION = "Ansatz tree expansion over Fourier-space Z words of A'"
    DEFAULT_OPTIONS = {"target": 0.99, "max_depth": None, "noise": 0.0, "circuit": True}

    @classmethod
    def supports(cls, n, c):
        return n >= 2 and c > 0

    @classmethod
    def solve(cls, n, c, b, options=None, logger=None):
        """
        x = ||b|| ||x_tree|| times the post-selected state of the solution
        circuit, or the dense tree sum when `circuit` is off.
        """
        log = logger or logging.getLogger("HeatVQE.Solvers")
        opts = cls.merged_options(options)
        system = FourierSystem.heat(n, c, b, substituted=True)
        backend = Backend.exact(noise=float(opts["noise"]))
        result = run(system, target=float(opts["target"]), max_depth=opts["max_depth"], backend=backend, logger=log)
        if not opts["circuit"]:
            return system.b_norm * result.x
        prepared = prepare_solution_circuit(result.alpha, result.nodes, system)
        norm = solution_norm(result.alpha, result.nodes, system, backend, result.ledger)
        log.debug(
            f"[Solvers] ata: depth {result.depth}, {prepared.aux_qubits} aux qubit(s), "
            f"success probability {prepared.success_probability:.4f}"
        )
        return system.b_norm * norm * prepared.state
