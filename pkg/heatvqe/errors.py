"""
Exception hierarchy for HeatVQE.

Every error raised on purpose by the package derives from HeatVQEError so
callers (and the CLI exit-code mapping) can catch the whole family at once.
"""


class HeatVQEError(Exception):
    """Base class for package errors."""


class ConfigError(HeatVQEError, ValueError):
    """Invalid configuration or command-line arguments."""


class CapExceededError(HeatVQEError):
    """A dense operator would exceed the configured qubit cap."""

    def __init__(self, qubits: int, cap: int, what: str = "operator"):
        self.qubits = qubits
        self.cap = cap
        super().__init__(f"{what} needs {qubits} qubits per side, cap is {cap}")


class DivergentConditionError(HeatVQEError, ArithmeticError):
    """The condition number diverges (grid parameter c = 0)."""


class SingularSystemError(HeatVQEError, ArithmeticError):
    """Singular linear system with a right-hand side outside its range."""


class NonHermitianError(HeatVQEError, ValueError):
    """A Hermitian-only operation received a non-Hermitian matrix."""


class TreeExhaustedError(HeatVQEError):
    """Every reachable Pauli word is already a node of the tree."""


class EvolutionError(HeatVQEError):
    """A solver failed during time stepping."""

    def __init__(self, step: int, solver: str, cause: Exception):
        self.step = step
        self.solver = solver
        self.cause = cause
        super().__init__(f"solver '{solver}' failed at step {step}: {cause}")


class SummaryError(HeatVQEError, ValueError):
    """A series cannot be summarized (too few or only censored points)."""
