"""
Heat equation on a periodic grid.

Builds the implicit finite-difference system A(c) x = b for one time step,
its Fourier spectrum and the piecewise-quadratic substituted spectrum,
classical reference solvers, the time-stepping driver and the error models.

Time stepping uses the right-hand side b = -(f + U/dt) dz^2/a2, the sign
for which the homogeneous mode (eigenvalue -c) conserves the spatial mean.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.fft
import scipy.linalg

from ..config import check_cap
from ..errors import (
    ConfigError,
    DivergentConditionError,
    EvolutionError,
    NonHermitianError,
    SingularSystemError,
)
from .statevector import Circuit, qft_circuit

logger = logging.getLogger("HeatVQE.Heat")

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10


def _check_qubits(n: int) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2 qubits, got {n}")


@dataclass
class GridParams:
    """Grid of 2^n periodic points; c = dz^2 / (a2 dt)."""

    n: int
    c: float
    n_tau: int = 1
    dz: float = 1.0
    dt: Optional[float] = None
    a2: float = 1.0

    def __post_init__(self):
        _check_qubits(self.n)
        if self.c < 0:
            raise ValueError(f"grid parameter c must be >= 0, got {self.c}")
        if self.n_tau < 1:
            raise ValueError("n_tau must be >= 1")
        if self.dz <= 0 or self.a2 <= 0:
            raise ValueError("dz and a2 must be positive")
        if self.dt is None:
            self.dt = self.dz ** 2 / (self.a2 * self.c) if self.c > 0 else math.inf
        implied = self.dz ** 2 / (self.a2 * self.dt)
        if abs(implied - self.c) > 1e-12 * max(1.0, self.c):
            raise ValueError(f"c={self.c} inconsistent with dz^2/(a2 dt)={implied}")

    @classmethod
    def from_c(cls, n: int, c: float, n_tau: int = 1) -> "GridParams":
        return cls(n=n, c=c, n_tau=n_tau)

    @classmethod
    def from_steps(cls, n: int, dz: float, dt: float, a2: float = 1.0, n_tau: int = 1) -> "GridParams":
        return cls(n=n, c=dz ** 2 / (a2 * dt), n_tau=n_tau, dz=dz, dt=dt, a2=a2)

    @property
    def size(self) -> int:
        return 2 ** self.n

    @property
    def n_z(self) -> int:
        return self.size


@dataclass
class HeatProblem:
    """Initial profile chi and source f (one row per time layer) on a periodic grid."""

    grid: GridParams
    chi: np.ndarray
    f: Optional[np.ndarray] = None
    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary != "periodic":
            raise ValueError(f"only periodic boundaries are supported, got {self.boundary!r}")
        size = self.grid.size
        self.chi = np.asarray(self.chi, dtype=float).ravel()
        if self.chi.size != size:
            raise ValueError(f"initial profile has length {self.chi.size}, expected {size}")
        if self.f is None:
            self.f = np.zeros((self.grid.n_tau, size))
        self.f = np.atleast_2d(np.asarray(self.f, dtype=float))
        if self.f.shape[1] != size:
            raise ValueError(f"source rows have length {self.f.shape[1]}, expected {size}")
        if self.f.shape[0] not in (1, self.grid.n_tau):
            raise ValueError(f"source has {self.f.shape[0]} layers, expected 1 or {self.grid.n_tau}")

    def source(self, step: int) -> np.ndarray:
        return self.f[0] if self.f.shape[0] == 1 else self.f[step]

    def to_dict(self) -> dict:
        return {
            "n": self.grid.n,
            "c": self.grid.c,
            "n_tau": self.grid.n_tau,
            "boundary": self.boundary,
            "chi": self.chi.tolist(),
            "f": self.f.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "HeatProblem":
        grid = GridParams.from_c(int(data["n"]), float(data["c"]), int(data.get("n_tau", 1)))
        return cls(grid, np.asarray(data["chi"]), data.get("f"), data.get("boundary", "periodic"))

    @classmethod
    def from_json(cls, text: str) -> "HeatProblem":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str) -> "HeatProblem":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_json(handle.read())

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())


@dataclass
class DenseOperator:
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        rows, cols = self.entries.shape
        if rows != cols:
            raise ValueError("operator must be square")
        if self.hermitian and not np.allclose(self.entries, self.entries.conj().T, atol=HERMITIAN_TOL, rtol=0):
            raise NonHermitianError("operator flagged Hermitian but M != M^dagger")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return int(round(math.log2(self.size)))

    def __matmul__(self, other):
        return self.entries @ other


def build_matrix(n: int, c: float) -> DenseOperator:
    """Periodic circulant with diagonal -2-c and unit neighbours."""
    _check_qubits(n)
    if c < 0:
        raise ValueError(f"grid parameter c must be >= 0, got {c}")
    check_cap(n, "heat matrix")
    column = np.zeros(2 ** n)
    column[0] = -2.0 - c
    column[1] = 1.0
    column[-1] = 1.0
    return DenseOperator(scipy.linalg.circulant(column), hermitian=True)


def spectrum(n: int, c: float) -> np.ndarray:
    """lambda_k = -c - 4 sin^2(pi k / 2^n) in Fourier-index order."""
    _check_qubits(n)
    k = np.arange(2 ** n)
    return -c - 4.0 * np.sin(np.pi * k / 2 ** n) ** 2


def substituted_spectrum(n: int, c: float) -> np.ndarray:
    """Piecewise-quadratic spectrum -c - pi^2 (|k/2^(n-1) - 1| - 1)^2."""
    _check_qubits(n)
    k = np.arange(2 ** n)
    return -c - np.pi ** 2 * (np.abs(k / 2 ** (n - 1) - 1.0) - 1.0) ** 2


def substituted_quadratic(n: int, c: float) -> tuple:
    """
    Coefficients (a0, a1, a2) of the single quadratic L(m) = a0 + a1 m + a2 m^2.

    L is the small-|m - N/2| expansion of the half-period-shifted sine
    spectrum; the substituted spectrum is L at the index shifted back by N/2.
    """
    size = 2 ** n
    return (-c - np.pi ** 2, 4 * np.pi ** 2 / size, -4 * np.pi ** 2 / size ** 2)


def substituted_spectrum_by_shift(n: int, c: float) -> np.ndarray:
    """Shift by N/2, expand the sine at its maximum, shift back."""
    _check_qubits(n)
    size = 2 ** n
    m = np.arange(size)
    a0, a1, a2 = substituted_quadratic(n, c)
    expanded = a0 + a1 * m + a2 * m ** 2
    return expanded[(np.arange(size) + size // 2) % size]


def fourier_matrix(n: int) -> np.ndarray:
    """Dense QFT matrix w^{jk}/sqrt(N), w = exp(2 pi i / N)."""
    return np.conj(scipy.linalg.dft(2 ** n, scale="sqrtn"))


def to_fourier(x: np.ndarray) -> np.ndarray:
    """QFT applied to a vector (or to the columns of a matrix)."""
    return scipy.fft.ifft(x, axis=0, norm="ortho")


def from_fourier(y: np.ndarray) -> np.ndarray:
    return scipy.fft.fft(y, axis=0, norm="ortho")


def build_substituted_matrix(n: int, c: float) -> DenseOperator:
    """A' = QFT^dagger diag(substituted_spectrum) QFT."""
    check_cap(n, "substituted heat matrix")
    f = fourier_matrix(n)
    entries = f.conj().T @ np.diag(substituted_spectrum(n, c)) @ f
    entries = 0.5 * (entries + entries.conj().T)
    return DenseOperator(entries, hermitian=True)


def condition_number(c: float) -> float:
    """(c + 4) / c; diverges at c = 0."""
    if c <= 0:
        raise DivergentConditionError(f"condition number diverges for c={c}")
    return (c + 4.0) / c


def build_rhs(u_prev, f, grid: GridParams) -> np.ndarray:
    u_prev = np.asarray(u_prev)
    f = np.asarray(f)
    if u_prev.shape != (grid.size,) or f.shape != (grid.size,):
        raise ValueError(f"rhs inputs must have length {grid.size}, got {u_prev.shape} and {f.shape}")
    return -(f + u_prev / grid.dt) * grid.dz ** 2 / grid.a2


def classical_solve(operator, b) -> np.ndarray:
    """
    Dense LU solve of M x = b.

    Singular systems (the c = 0 Laplacian) fall back to the minimum-norm
    least-squares solution, which for the periodic Laplacian is the
    zero-mean solution; an inconsistent right-hand side is an error.
    """
    m = operator.entries if isinstance(operator, DenseOperator) else np.asarray(operator, dtype=complex)
    b = np.asarray(b)
    if b.shape != (m.shape[0],):
        raise ValueError(f"rhs has shape {b.shape}, expected ({m.shape[0]},)")
    scale = max(1.0, float(np.linalg.norm(b)))
    if np.linalg.matrix_rank(m) < m.shape[0]:
        x = scipy.linalg.lstsq(m, b)[0]
        residual = float(np.linalg.norm(m @ x - b))
        if residual > 1e-8 * scale:
            raise SingularSystemError(f"singular system, rhs outside range (residual {residual:.3e})")
        logger.debug("[Heat] Singular system solved on the range (minimum-norm)")
    else:
        x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(m), b)
        residual = float(np.linalg.norm(m @ x - b))
        if residual > RESIDUAL_TOL * scale:
            logger.warning(f"[Heat] LU residual {residual:.3e} above tolerance")
    if np.isrealobj(b) and np.allclose(m.imag, 0):
        x = x.real
    return x


def spectral_solve(eigenvalues, b) -> np.ndarray:
    """x = QFT^dagger diag(1/lambda) QFT b, pseudo-inverse on zero modes."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    b = np.asarray(b)
    y = to_fourier(b.astype(complex))
    zero = np.abs(eigenvalues) < 1e-14
    if np.any(np.abs(y[zero]) > 1e-10 * max(1.0, float(np.linalg.norm(b)))):
        raise SingularSystemError("rhs has weight on a zero mode")
    inv = np.zeros_like(eigenvalues)
    inv[~zero] = 1.0 / eigenvalues[~zero]
    x = from_fourier(inv * y)
    return x.real if np.isrealobj(b) else x


def mode_decay(n: int, c: float) -> np.ndarray:
    """Per-mode amplification 1/(1 + 4 sin^2(pi k/N)/c) of one implicit step with f = 0."""
    k = np.arange(2 ** n)
    return 1.0 / (1.0 + 4.0 * np.sin(np.pi * k / 2 ** n) ** 2 / c)


def fidelity(a, b) -> float:
    """|a^dagger b|^2 / (a^dagger a b^dagger b)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    na, nb = np.vdot(a, a).real, np.vdot(b, b).real
    if na == 0 or nb == 0:
        raise ValueError("fidelity of a zero vector is undefined")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2 / (na * nb)))


@dataclass
class Trajectory:
    """Oracle and solver trajectories plus per-step infidelity."""

    solver: str
    c: float
    states: List[np.ndarray] = field(default_factory=list)
    oracle: List[np.ndarray] = field(default_factory=list)
    infidelity: List[float] = field(default_factory=list)
    threshold: float = 1e-12

    @property
    def bound(self) -> float:
        return 5.0 + self.c

    def growth_ratios(self) -> List[Optional[float]]:
        """eps_{i+1}/eps_i, None where eps_i is below threshold."""
        eps = self.infidelity
        return [
            eps[i + 1] / eps[i] if eps[i] > self.threshold else None
            for i in range(len(eps) - 1)
        ]

    def bound_holds(self) -> bool:
        return all(r is None or r <= self.bound for r in self.growth_ratios())

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["step", "index", "value"])
            for step, state in enumerate(self.states):
                for index, value in enumerate(np.real(state)):
                    writer.writerow([step, index, repr(float(value))])


def time_step_evolve(problem: HeatProblem, solver, n_tau: Optional[int] = None,
                     options: Optional[dict] = None, logger=None) -> Trajectory:
    """
    Run n_tau implicit steps with `solver` and the dense oracle side by side.

    `solver` is a solver handle (see heatvqe.modules.solvers). The oracle
    solves the same operator the solver targets, so an oracle handle gives
    zero infidelity. eps_i compares the solver trajectory with the oracle
    trajectory at step i.
    """
    log = logger or logging.getLogger("HeatVQE.Heat")
    grid = problem.grid
    if grid.c <= 0:
        raise ValueError("time evolution needs c > 0")
    steps = n_tau if n_tau is not None else grid.n_tau
    name = getattr(solver, "SOLVER_NAME", type(solver).__name__)
    supports = getattr(solver, "supports", None)
    if supports is not None and not supports(grid.n, grid.c):
        raise ConfigError(f"solver {name} does not support n={grid.n}, c={grid.c:g}")
    substituted = getattr(solver, "OPERATOR", "original") == "substituted"
    matrix = build_substituted_matrix(grid.n, grid.c) if substituted else build_matrix(grid.n, grid.c)

    traj = Trajectory(solver=name, c=grid.c)
    u_solver = problem.chi.copy()
    u_oracle = problem.chi.copy()
    traj.states.append(u_solver.copy())
    traj.oracle.append(u_oracle.copy())
    for step in range(steps):
        f = problem.source(min(step, problem.f.shape[0] - 1))
        u_oracle = np.real(classical_solve(matrix, build_rhs(u_oracle, f, grid)))
        b = build_rhs(u_solver, f, grid)
        try:
            x = np.asarray(solver.solve(grid.n, grid.c, b, options=options, logger=log))
        except Exception as e:
            log.error(f"[Heat] Solver {name} failed at step {step + 1}: {e}")
            raise EvolutionError(step + 1, name, e) from e
        if np.linalg.norm(np.imag(x)) > 1e-8 * max(1.0, np.linalg.norm(x)):
            log.debug(f"[Heat] Step {step + 1}: dropping imaginary part of norm {np.linalg.norm(np.imag(x)):.2e}")
        u_solver = np.real(x)
        traj.states.append(u_solver.copy())
        traj.oracle.append(u_oracle.copy())
        eps = 1.0 - fidelity(u_oracle, u_solver) if np.any(u_oracle) else 0.0
        traj.infidelity.append(max(0.0, eps))
        log.info(f"[Heat] Step {step + 1}/{steps} solver={name} eps={traj.infidelity[-1]:.3e}")
    if not traj.bound_holds():
        log.warning(f"[Heat] Growth bound {traj.bound:g} violated by {name}")
    return traj


def error_accumulation(eps_tilde: float, c: float, n_tau: int) -> float:
    """Closed form eps * sqrt(((c kappa)^(2 n_tau) - 1) / ((c kappa)^2 - 1)), c kappa = c + 4."""
    if eps_tilde <= 0:
        raise ValueError("eps_tilde must be positive")
    if n_tau < 1:
        raise ValueError("n_tau must be >= 1")
    q = (c * condition_number(c)) ** 2
    return eps_tilde * math.sqrt((q ** n_tau - 1.0) / (q - 1.0))


def error_recursion(eps_tilde: float, c: float, n_tau: int) -> List[float]:
    """eps_1 = eps, eps_k = sqrt(eps^2 + (c kappa eps_{k-1})^2)."""
    if eps_tilde <= 0:
        raise ValueError("eps_tilde must be positive")
    amplification = c * condition_number(c)
    history = [eps_tilde]
    for _ in range(n_tau - 1):
        history.append(math.sqrt(eps_tilde ** 2 + (amplification * history[-1]) ** 2))
    return history


def total_error_estimate(eps_tilde: float, c: float, n_tau: int, derivative_scale: float = 1.0) -> float:
    """Time-derivative error O(1/c) plus accumulated arithmetic error."""
    return derivative_scale / c + error_accumulation(eps_tilde, c, n_tau)


def build_multidim_matrix(n: int, c: float, d_r: int) -> DenseOperator:
    """Kronecker sum of d_r copies of A(0), minus c I."""
    _check_qubits(n)
    if d_r < 1:
        raise ValueError("d_r must be >= 1")
    check_cap(n * d_r, "multidimensional heat matrix")
    base = build_matrix(n, 0.0).entries.real
    size = 2 ** n
    total = np.zeros((size ** d_r, size ** d_r))
    for axis in range(d_r):
        term = np.array([[1.0]])
        for other in reversed(range(d_r)):
            term = np.kron(term, base if other == axis else np.eye(size))
        total += term
    total -= c * np.eye(size ** d_r)
    return DenseOperator(total, hermitian=True)


def multidim_spectrum(n: int, c: float, d_r: int, substituted: bool = False) -> np.ndarray:
    """Fourier-space spectrum of the d_r-dimensional operator; axis a owns qubits a*n..a*n+n-1."""
    base = substituted_spectrum(n, 0.0) if substituted else spectrum(n, 0.0)
    size = 2 ** n
    index = np.arange(size ** d_r)
    total = -c * np.ones(size ** d_r)
    for axis in range(d_r):
        total += base[(index >> (axis * n)) & (size - 1)]
    return total


@dataclass
class FourierSystem:
    """
    A linear system diagonal in the per-axis Fourier basis.

    Holds the Fourier-space spectrum and the normalized right-hand side;
    the operator is QFT^dagger diag(eigenvalues) QFT with one QFT per axis.
    """

    n: int
    c: float
    eigenvalues: np.ndarray
    b: np.ndarray
    d_r: int = 1
    substituted: bool = True

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        b = np.asarray(self.b, dtype=complex).ravel()
        if b.size != self.eigenvalues.size:
            raise ValueError(f"rhs length {b.size} does not match spectrum length {self.eigenvalues.size}")
        norm = np.linalg.norm(b)
        if norm == 0:
            raise ValueError("rhs must be nonzero")
        self.b_norm = float(norm)
        self.b = b / norm

    @classmethod
    def heat(cls, n: int, c: float, b, d_r: int = 1, substituted: bool = True) -> "FourierSystem":
        _check_qubits(n)
        check_cap(n * d_r, "Fourier system")
        if d_r == 1:
            eig = substituted_spectrum(n, c) if substituted else spectrum(n, c)
        else:
            eig = multidim_spectrum(n, c, d_r, substituted)
        return cls(n=n, c=c, eigenvalues=eig, b=b, d_r=d_r, substituted=substituted)

    @property
    def qubits(self) -> int:
        return self.n * self.d_r

    def qft(self) -> Circuit:
        circuit = Circuit(self.qubits)
        for axis in range(self.d_r):
            circuit.extend(qft_circuit(self.n, offset=axis * self.n, width=self.qubits))
        return circuit

    def fourier_b(self) -> np.ndarray:
        return self._transform(self.b, inverse=False)

    def to_fourier(self, x: np.ndarray) -> np.ndarray:
        return self._transform(x, inverse=False)

    def from_fourier(self, y: np.ndarray) -> np.ndarray:
        return self._transform(y, inverse=True)

    def _transform(self, vector: np.ndarray, inverse: bool) -> np.ndarray:
        tensor = np.asarray(vector, dtype=complex).reshape((2 ** self.n,) * self.d_r)
        op = from_fourier if inverse else to_fourier
        for axis in range(self.d_r):
            tensor = np.moveaxis(op(np.moveaxis(tensor, axis, 0)), 0, axis)
        return tensor.reshape(-1)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self._transform(self.eigenvalues * self._transform(x, inverse=False), inverse=True)

    def matrix(self) -> np.ndarray:
        f = fourier_matrix(self.n)
        full = np.array([[1.0]])
        for _ in range(self.d_r):
            full = np.kron(full, f)
        return full.conj().T @ np.diag(self.eigenvalues) @ full

    def solve(self) -> np.ndarray:
        """Oracle solution for the normalized rhs."""
        if np.any(np.abs(self.eigenvalues) < 1e-14):
            raise SingularSystemError("Fourier system has a zero eigenvalue")
        return self._transform(self._transform(self.b, inverse=False) / self.eigenvalues, inverse=True)
