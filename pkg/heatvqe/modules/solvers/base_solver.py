"""
Base solver handle for HeatVQE time stepping.

Every handle must extend BaseSolver. The loader discovers and registers
subclasses from *_solver.py files in this package.

Solver interface:
- SOLVER_NAME: str - Unique name used by the CLI and campaigns
- SOLVER_PRIORITY: int - Listing order, highest first
- OPERATOR: "original" (A) or "substituted" (A') - the operator solve() targets
- solve(n, c, b, options, logger) -> x with A x = b at the scale of b
"""

from abc import ABC

import numpy as np

OPERATORS = ("original", "substituted")


class BaseSolver(ABC):
    """
    Abstract base class for solver handles.

    Subclasses set SOLVER_NAME and override solve(). Handles are stateless;
    per-call settings arrive through `options`.
    """

    SOLVER_NAME: str = "base"
    SOLVER_PRIORITY: int = 0
    OPERATOR: str = "original"
    DESCRIPTION: str = ""
    DEFAULT_OPTIONS: dict = {}

    @classmethod
    def supports(cls, n: int, c: float) -> bool:
        """Whether the handle can solve the (n, c) system."""
        return n >= 2 and c >= 0

    @classmethod
    def merged_options(cls, options=None) -> dict:
        merged = dict(cls.DEFAULT_OPTIONS)
        merged.update(options or {})
        return merged

    @classmethod
    def solve(cls, n: int, c: float, b: np.ndarray, options=None, logger=None) -> np.ndarray:
        raise NotImplementedError(f"solver {cls.SOLVER_NAME} does not implement solve()")
