"""Dense classical reference solvers."""

import numpy as np

from ..heat import build_matrix, build_substituted_matrix, classical_solve
from .base_solver import BaseSolver


class OracleSolver(BaseSolver):
    SOLVER_NAME = "oracle"
    SOLVER_PRIORITY = 100
    OPERATOR = "original"
    DESCRIPTION = "dense LU solve of A x = b"

    @classmethod
    def solve(cls, n, c, b, options=None, logger=None):
        return np.real_if_close(classical_solve(build_matrix(n, c), np.asarray(b)))


class SubstitutedOracleSolver(BaseSolver):
    SOLVER_NAME = "oracle-substituted"
    SOLVER_PRIORITY = 90
    OPERATOR = "substituted"
    DESCRIPTION = "dense solve of A' x = b (piecewise-quadratic spectrum)"

    @classmethod
    def solve(cls, n, c, b, options=None, logger=None):
        return np.real_if_close(classical_solve(build_substituted_matrix(n, c), np.asarray(b)))
