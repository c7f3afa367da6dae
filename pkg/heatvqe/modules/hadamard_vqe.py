"""
Hadamard-test variational solver.

In the Fourier basis A is diagonal (D), so the loss of x = U_phi|b>,

    quad - re^2 - im^2,   quad = <phi|D^2|phi>,  re + i im = <phi|D|b_f>,

with |phi> = QFT U_phi |b> and |b_f> = QFT |b>, costs three circuit runs:
quad without an ancilla, then the real and imaginary parts from two
Hadamard tests (I or S on the ancilla). The loss equals <x|H|x> for the
direct-method Hamiltonian H = A (I - |b><b|) A.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.optimize

from ..config import DEFAULT_LAYER_CAP, OPTIMIZER_BUDGET, make_rng, random_b
from .ansatz import AnsatzSpec, ansatz_circuit
from .heat import FourierSystem, fidelity
from .statevector import Backend, Circuit, QuantumState, hadamard_test, run_circuit

logger = logging.getLogger("HeatVQE.HadamardVQE")

RESTARTS = 5
SIMPLEX_STEP = 0.5


@dataclass
class HadamardLossBreakdown:
    quad: float
    re: float
    im: float

    @property
    def total(self) -> float:
        return self.quad - self.re ** 2 - self.im ** 2

    @property
    def overlap(self) -> complex:
        """<phi|D|b_f> = <x|A|b>."""
        return complex(self.re, self.im)


def loss(spec: AnsatzSpec, system: FourierSystem, backend: Optional[Backend] = None) -> HadamardLossBreakdown:
    """Three simulator runs: one diagonal measurement and two Hadamard tests."""
    if spec.n != system.qubits:
        raise ValueError(f"ansatz has {spec.n} qubits, system has {system.qubits}")
    backend = backend if backend is not None else Backend.exact()
    u_phi = ansatz_circuit(spec)
    qft = system.qft()

    phi = run_circuit(QuantumState(system.b), u_phi + qft)
    quad = backend.measure_diagonal(phi, system.eigenvalues ** 2)

    empty = Circuit(system.qubits)
    # the ancilla-1 branch carries U_phi, so the test measures <b_f|D|phi> = conj(<phi|D|b_f>)
    re = hadamard_test(empty, u_phi, system.eigenvalues, "re", backend, initial=system.b, post=qft)
    im = -hadamard_test(empty, u_phi, system.eigenvalues, "im", backend, initial=system.b, post=qft)
    return HadamardLossBreakdown(quad, re, im)


def dense_loss(spec: AnsatzSpec, system: FourierSystem) -> float:
    """<x|A (I - |b><b|) A|x> evaluated densely, for checking."""
    x = run_circuit(QuantumState(system.b), ansatz_circuit(spec)).amplitudes
    ax = system.apply(x)
    return float(np.real(np.vdot(ax, ax)) - abs(np.vdot(system.b, ax)) ** 2)


@dataclass
class HadamardResult:
    spec: AnsatzSpec
    x: np.ndarray
    fidelity: float
    loss: float
    evaluations: int
    converged: bool
    trace: List[float] = field(default_factory=list)


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])


def _options(method: str, x0: np.ndarray, budget: int, tol: float) -> dict:
    if method == "Nelder-Mead":
        return {"maxfev": budget, "xatol": 1e-8, "fatol": tol, "initial_simplex": _simplex(x0, SIMPLEX_STEP)}
    if method == "Powell":
        return {"maxfev": budget, "ftol": tol}
    if method == "L-BFGS-B":
        return {"maxfun": budget, "ftol": tol}
    return {"maxiter": budget}


def minimize(spec: AnsatzSpec, system: FourierSystem, backend: Optional[Backend] = None,
             rng: Optional[np.random.Generator] = None, restarts: int = RESTARTS,
             budget: int = OPTIMIZER_BUDGET, method: str = "Nelder-Mead",
             tol: float = 1e-10, logger=None) -> HadamardResult:
    """
    Minimize the Hadamard loss from spec.theta, then from random restarts.

    Each restart gets `budget` loss evaluations. The returned x is scaled to
    the least-squares solution s U_phi|b>, s = <x|A|b> / <x|A^2|x>, in units
    of the normalized right-hand side.
    """
    log = logger or logging.getLogger("HeatVQE.HadamardVQE")
    backend = backend if backend is not None else Backend.exact()
    rng = rng if rng is not None else make_rng(0)
    trace: List[float] = []

    def objective(theta):
        value = loss(spec.with_theta(theta), system, backend).total
        trace.append(value)
        return value

    best_theta = spec.theta.copy()
    best_value = objective(best_theta)
    if spec.size > 0:
        for attempt in range(restarts):
            if best_value <= tol:
                break
            x0 = best_theta if attempt == 0 else rng.uniform(-np.pi, np.pi, spec.size)
            res = scipy.optimize.minimize(objective, x0, method=method, options=_options(method, x0, budget, tol))
            if res.fun < best_value:
                best_theta, best_value = np.asarray(res.x, dtype=float), float(res.fun)

    best = spec.with_theta(best_theta)
    breakdown = loss(best, system, backend)
    x = run_circuit(QuantumState(system.b), ansatz_circuit(best)).amplitudes
    scale = breakdown.overlap / breakdown.quad if breakdown.quad > 0 else 1.0
    x = scale * x
    fid = fidelity(x, system.solve())
    log.debug(
        f"[HadamardVQE] {best.kind.upper()} n={best.n} M={best.layers}: "
        f"loss={breakdown.total:.3e} fidelity={fid:.6f} evals={len(trace)}"
    )
    return HadamardResult(best, x, fid, breakdown.total, len(trace), breakdown.total <= tol, trace)


@dataclass
class LayersResult:
    kind: str
    n: int
    c: float
    m_star: int
    mean_fidelity: float
    censored: bool
    sample_layers: List[Optional[int]] = field(default_factory=list)
    fidelity_by_layer: List[float] = field(default_factory=list)

    @property
    def layer_spread(self) -> Optional[float]:
        values = [m for m in self.sample_layers if m is not None]
        return float(np.std(values)) if values else None


def layers_to_fidelity(kind: str, n: int, c: float, target: float = 0.99, samples: int = 20,
                       layer_cap: int = DEFAULT_LAYER_CAP, rng: Optional[np.random.Generator] = None,
                       backend: Optional[Backend] = None, budget: int = OPTIMIZER_BUDGET,
                       method: str = "Nelder-Mead", restarts: int = RESTARTS, logger=None) -> LayersResult:
    """
    Smallest M whose mean fidelity over `samples` random b reaches `target`.

    Each sample warm-starts depth M+1 from its depth-M optimum padded with
    zeros. Reaching the cap without the target is reported as censored.
    """
    log = logger or logging.getLogger("HeatVQE.HadamardVQE")
    if not 2 <= n <= 8:
        raise ValueError(f"layer scaling runs at 2..8 qubits, got {n}")
    rng = rng if rng is not None else make_rng(0)
    systems = [FourierSystem.heat(n, c, random_b(n, rng), substituted=False) for _ in range(samples)]
    specs = [AnsatzSpec(kind, n, 0) for _ in range(samples)]
    sample_layers: List[Optional[int]] = [None] * samples
    by_layer: List[float] = []

    for layers in range(layer_cap + 1):
        fids = []
        for s, system in enumerate(systems):
            spec = specs[s].padded(layers)
            result = minimize(spec, system, backend, rng, restarts, budget, method)
            specs[s] = result.spec
            fids.append(result.fidelity)
            if sample_layers[s] is None and result.fidelity >= target:
                sample_layers[s] = layers
        mean = float(np.mean(fids))
        by_layer.append(mean)
        log.info(f"[HadamardVQE] {kind.upper()} n={n} c={c:g} M={layers}: mean fidelity {mean:.4f}")
        if mean >= target:
            return LayersResult(kind, n, c, layers, mean, False, sample_layers, by_layer)

    log.warning(f"[HadamardVQE] {kind.upper()} n={n} c={c:g}: target {target} not reached by M={layer_cap}")
    return LayersResult(kind, n, c, layer_cap, by_layer[-1], True, sample_layers, by_layer)
