"""
Direct variational method.

The solution of A x = b is the zero-energy ground state of
H = A^dagger (I - |b><b|) A. Energies are measured term by term from the
Pauli expansion of H, one circuit run per non-identity word.

Two-qubit demonstration circuit (c = 0, sum b_i = 0):
    Ry(t1) on q0, Ry(t2) on q1, CZ(q0, q1), Ry(t3) on q1
with t3 fixed by theta3(t1, t2) so the output amplitudes always sum to zero.
The landscape over (t1, t2) is 2 pi periodic in both angles and invariant
under (t1, t2) -> (2 pi - t1, t2 + pi), which maps one minimum onto the other.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.optimize

from ..config import OPTIMIZER_BUDGET, make_rng
from ..errors import SingularSystemError
from ..records import write_csv as write_records
from .ansatz import AnsatzSpec, ansatz_circuit
from .heat import DenseOperator, build_matrix, classical_solve, fidelity
from .pauli import PauliDecomposition, decompose_hermitian, masks_from_word, parity, z_count
from .statevector import Backend, Circuit, QuantumState, run_circuit

logger = logging.getLogger("HeatVQE.DirectVQE")

DEMO_QUBITS = 2
ENERGY_TOL = 1e-6
NORM_TOL = 1e-10
TWO_PI = 2 * np.pi


@dataclass
class VariationalHamiltonian:
    dense: np.ndarray
    terms: Optional[PauliDecomposition]
    a: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return int(round(np.log2(self.dense.shape[0])))

    def expectation(self, psi) -> float:
        psi = np.asarray(psi, dtype=complex)
        return float(np.real(np.vdot(psi, self.dense @ psi)) / np.real(np.vdot(psi, psi)))


def build_hamiltonian(a, b, with_terms: bool = True) -> VariationalHamiltonian:
    """H = A^dagger (I - |b><b|) A for a normalized b."""
    a = a.entries if isinstance(a, DenseOperator) else np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex).ravel()
    if abs(np.linalg.norm(b) - 1.0) > NORM_TOL:
        raise ValueError(f"b must be normalized, |b| = {np.linalg.norm(b):.12f}")
    projector = np.eye(b.size) - np.outer(b, b.conj())
    h = a.conj().T @ projector @ a
    h = 0.5 * (h + h.conj().T)
    terms = decompose_hermitian(h) if with_terms and b.size <= 2 ** 6 else None
    return VariationalHamiltonian(dense=h, terms=terms, a=a, b=b)


def _theta3(theta1: float, theta2: float) -> tuple:
    plus = 0.5 * (theta1 + theta2)
    minus = 0.5 * (theta1 - theta2)
    numerator = np.cos(plus) + np.sin(plus)
    denominator = np.cos(minus) + np.sin(minus)
    if abs(denominator) < 1e-15:
        return -np.pi, True
    return float(-2.0 * np.arctan(numerator / denominator)), False


def theta3(theta1: float, theta2: float) -> float:
    """Dependent angle that keeps the demonstration state zero-sum."""
    value, degenerate = _theta3(theta1, theta2)
    if degenerate:
        logger.warning(f"[DirectVQE] theta3 denominator vanishes at ({theta1:.6f}, {theta2:.6f}); using -pi")
    return value


@dataclass
class ThetaPoint:
    theta1: float
    theta2: float
    theta3: float
    degenerate: bool = False

    @classmethod
    def constrained(cls, theta1: float, theta2: float) -> "ThetaPoint":
        value, degenerate = _theta3(theta1, theta2)
        return cls(float(theta1), float(theta2), value, degenerate)

    def free(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])


def demo_circuit(point: ThetaPoint) -> Circuit:
    circuit = Circuit(DEMO_QUBITS)
    circuit.add("RY", 0, angle=point.theta1)
    circuit.add("RY", 1, angle=point.theta2)
    circuit.add("CZ", 0, 1)
    circuit.add("RY", 1, angle=point.theta3)
    return circuit


def demo_state(point: ThetaPoint) -> QuantumState:
    return run_circuit(QuantumState.zero(DEMO_QUBITS), demo_circuit(point))


def demo_problem(rng: np.random.Generator) -> tuple:
    """A(n=2, c=0) and a random real zero-mean normalized b."""
    b = rng.standard_normal(2 ** DEMO_QUBITS)
    b -= b.mean()
    return build_matrix(DEMO_QUBITS, 0.0), b / np.linalg.norm(b)


def basis_change(word: str) -> Circuit:
    """Rotate each X/Y qubit of a word so the word is measured as a Z parity."""
    n = len(word)
    circuit = Circuit(n)
    for position, letter in enumerate(word):
        q = n - 1 - position
        if letter == "X":
            circuit.add("H", q)
        elif letter == "Y":
            circuit.add("SDG", q)
            circuit.add("H", q)
    return circuit


def measure_pauli_term(state: QuantumState, word: str, backend: Backend) -> float:
    """<state|P|state> from one run: basis change, then parity of the support."""
    rotated = run_circuit(state, basis_change(word))
    x, z = masks_from_word(word)
    support = x | z
    k = np.arange(2 ** state.n)
    observable = 1.0 - 2.0 * parity(k & support, state.n)
    return backend.estimate(rotated.probabilities(), observable)


def energy(point: ThetaPoint, hamiltonian: VariationalHamiltonian, backend: Optional[Backend] = None) -> float:
    """Sum of weighted Pauli-term expectations on the demonstration circuit output."""
    if hamiltonian.n != DEMO_QUBITS:
        raise ValueError("the demonstration circuit works on 2 qubits")
    if abs(hamiltonian.b.sum()) > NORM_TOL:
        raise ValueError("the demonstration needs a zero-sum right-hand side")
    if hamiltonian.terms is None:
        raise ValueError("hamiltonian has no Pauli terms")
    backend = backend if backend is not None else Backend.exact()
    state = demo_state(point)
    total = 0.0
    for term in hamiltonian.terms:
        weight = float(np.real(term.weight))
        if z_count(term.word) == 0:
            total += weight
        else:
            total += weight * measure_pauli_term(state, term.word, backend)
    return total


@dataclass
class DirectResult:
    point: ThetaPoint
    state: QuantumState
    energy: float
    trace: List[float] = field(default_factory=list)
    evaluations: int = 0
    converged: bool = False
    fidelity: Optional[float] = None


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])


def minimize(hamiltonian: VariationalHamiltonian, start=None, backend: Optional[Backend] = None,
             rng: Optional[np.random.Generator] = None, budget: int = OPTIMIZER_BUDGET,
             tol: float = ENERGY_TOL, logger=None) -> DirectResult:
    """
    Nelder-Mead over (t1, t2) with random restarts until energy <= tol or the
    evaluation budget is spent. Non-convergence returns the best point found.
    """
    log = logger or logging.getLogger("HeatVQE.DirectVQE")
    backend = backend if backend is not None else Backend.exact()
    rng = rng if rng is not None else make_rng(0)
    trace: List[float] = []
    best = {"x": None, "e": np.inf}

    def objective(x):
        value = energy(ThetaPoint.constrained(x[0], x[1]), hamiltonian, backend)
        trace.append(value)
        if value < best["e"]:
            best["x"], best["e"] = np.array(x, dtype=float), value
        return value

    x0 = np.asarray(start, dtype=float) if start is not None else rng.uniform(0, TWO_PI, 2)
    attempt = 0
    while len(trace) < budget:
        remaining = budget - len(trace)
        scipy.optimize.minimize(
            objective, x0, method="Nelder-Mead",
            options={"maxfev": remaining, "xatol": 1e-10, "fatol": 1e-14,
                     "initial_simplex": _simplex(x0, np.pi / 4)},
        )
        attempt += 1
        if best["e"] <= tol:
            break
        x0 = rng.uniform(0, TWO_PI, 2)

    point = ThetaPoint.constrained(*best["x"])
    state = demo_state(point)
    converged = best["e"] <= tol
    result = DirectResult(point, state, best["e"], trace, len(trace), converged)
    try:
        result.fidelity = fidelity(state.amplitudes, classical_solve(hamiltonian.a, hamiltonian.b))
    except SingularSystemError as e:
        log.warning(f"[DirectVQE] No oracle solution for fidelity: {e}")
    if converged:
        log.info(f"[DirectVQE] Converged after {len(trace)} evaluations ({attempt} start(s)), E={best['e']:.3e}")
    else:
        log.warning(f"[DirectVQE] Budget of {budget} spent, best E={best['e']:.3e}")
    return result


@dataclass
class LandscapeScan:
    thetas: np.ndarray
    energies: np.ndarray

    COLUMNS = ("theta1", "theta2", "energy")

    def rows(self) -> List[dict]:
        return [
            {"theta1": float(t1), "theta2": float(t2), "energy": float(self.energies[i, j])}
            for i, t1 in enumerate(self.thetas) for j, t2 in enumerate(self.thetas)
        ]

    def write_csv(self, path: str) -> int:
        return write_records(path, self.rows(), self.COLUMNS)

    def grid_minima(self) -> List[tuple]:
        """Grid points no higher than their eight periodic neighbours."""
        e = self.energies
        neighbours = [
            np.roll(np.roll(e, di, axis=0), dj, axis=1)
            for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)
        ]
        mask = np.all([e <= other for other in neighbours], axis=0)
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]


def scan_landscape(hamiltonian: VariationalHamiltonian, grid: int = 30,
                   backend: Optional[Backend] = None, workers: int = 1) -> LandscapeScan:
    """Energy on a grid x grid lattice of [0, 2 pi)^2; rows may run concurrently."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    thetas = TWO_PI * np.arange(grid) / grid

    def row(i):
        # exact rows share nothing; shot rows get their own backend stream
        local = backend if backend is None or backend.mode == "exact" else Backend.sampled(
            backend.shots, backend.seed, backend.noise, stream=(i,))
        return [energy(ThetaPoint.constrained(thetas[i], t2), hamiltonian, local) for t2 in thetas]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, range(grid)))
    return LandscapeScan(thetas, np.asarray(rows))


def _torus_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs((a - b + np.pi) % TWO_PI - np.pi)
    return float(np.max(d))


def refine_minima(scan: LandscapeScan, hamiltonian: VariationalHamiltonian,
                  threshold: float = 1e-3, budget: int = 400) -> List[ThetaPoint]:
    """Polish each grid minimum with Nelder-Mead; keep distinct ones below threshold."""
    found: List[np.ndarray] = []
    points: List[ThetaPoint] = []
    for i, j in scan.grid_minima():
        x0 = np.array([scan.thetas[i], scan.thetas[j]])
        res = scipy.optimize.minimize(
            lambda x: energy(ThetaPoint.constrained(x[0], x[1]), hamiltonian),
            x0, method="Nelder-Mead",
            options={"maxfev": budget, "xatol": 1e-10, "fatol": 1e-14,
                     "initial_simplex": _simplex(x0, TWO_PI / len(scan.thetas))},
        )
        if res.fun > threshold:
            continue
        x = np.mod(res.x, TWO_PI)
        if any(_torus_distance(x, other) < 1e-3 for other in found):
            continue
        found.append(x)
        points.append(ThetaPoint.constrained(*x))
    return points


@dataclass
class DenseVQEResult:
    spec: AnsatzSpec
    x: np.ndarray
    energy: float
    evaluations: int
    converged: bool


def minimize_dense(a, b, spec: AnsatzSpec, rng: Optional[np.random.Generator] = None,
                   budget: int = OPTIMIZER_BUDGET, restarts: int = 3, tol: float = ENERGY_TOL) -> DenseVQEResult:
    """
    General-n direct VQE in exact dense mode: minimize <psi|H|psi> over
    psi = U(theta)|b>, then rescale psi to the least-squares solution.
    """
    a = a.entries if isinstance(a, DenseOperator) else np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    b_norm = np.linalg.norm(b)
    bn = b / b_norm
    ham = build_hamiltonian(a, bn, with_terms=False)
    rng = rng if rng is not None else make_rng(0)
    start = QuantumState(bn)
    evaluations = 0

    def objective(theta):
        nonlocal evaluations
        evaluations += 1
        psi = run_circuit(start, ansatz_circuit(spec.with_theta(theta))).amplitudes
        return ham.expectation(psi)

    best_theta, best_e = spec.theta.copy(), objective(spec.theta)
    for attempt in range(restarts):
        if best_e <= tol or evaluations >= budget:
            break
        x0 = best_theta if attempt == 0 else rng.uniform(-np.pi, np.pi, spec.size)
        if spec.size == 0:
            break
        res = scipy.optimize.minimize(
            objective, x0, method="Nelder-Mead",
            options={"maxfev": budget - evaluations, "xatol": 1e-10, "fatol": 1e-14,
                     "initial_simplex": _simplex(x0, 0.5)},
        )
        if res.fun < best_e:
            best_theta, best_e = np.asarray(res.x), float(res.fun)
    best = spec.with_theta(best_theta)
    psi = run_circuit(start, ansatz_circuit(best)).amplitudes
    a_psi = a @ psi
    scale = np.vdot(a_psi, b) / np.vdot(a_psi, a_psi)
    return DenseVQEResult(best, scale * psi, best_e, evaluations, best_e <= tol)
