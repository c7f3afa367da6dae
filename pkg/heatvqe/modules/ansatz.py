"""
Layered Ansatz circuits: hardware-efficient (HEA), checkerboard (CBA) and
digital-analog (DAA).

Parameters are stored layer-major, so appending a layer appends parameters
at the end and zero-padding warm-starts the next depth. CBA and DAA layers
are the identity at zero parameters; HEA layers are not (the CNOT chain).

Per-layer parameter counts:
    HEA  2n     (Ry, Rz per qubit, CNOT chain)
    CBA  5n-1   (Ry, Rz per qubit, even Rzz bricks, Ry, Rz per qubit, odd Rzz bricks)
    DAA  2n+1   (Ry, Rz per qubit, ring of n Rzz couplings sharing one angle)
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import ANSATZ_KINDS
from .statevector import Circuit


def layer_parameter_count(kind: str, n: int) -> int:
    kind = kind.lower()
    if kind == "hea":
        return 2 * n
    if kind == "cba":
        return 5 * n - 1
    if kind == "daa":
        return 2 * n + 1
    raise ValueError(f"ansatz kind must be one of {ANSATZ_KINDS}, got {kind!r}")


def parameter_count(kind: str, n: int, layers: int) -> int:
    return layers * layer_parameter_count(kind, n)


@dataclass
class AnsatzSpec:
    kind: str
    n: int
    layers: int
    theta: np.ndarray = field(default=None)

    def __post_init__(self):
        self.kind = self.kind.lower()
        if self.n < 2:
            raise ValueError(f"ansatz needs n >= 2 qubits, got {self.n}")
        if self.layers < 0:
            raise ValueError("layers must be >= 0")
        count = parameter_count(self.kind, self.n, self.layers)
        if self.theta is None:
            self.theta = np.zeros(count)
        self.theta = np.asarray(self.theta, dtype=float).ravel()
        if self.theta.size != count:
            raise ValueError(f"{self.kind.upper()}(n={self.n}, M={self.layers}) takes {count} parameters, got {self.theta.size}")

    @property
    def size(self) -> int:
        return self.theta.size

    def with_theta(self, theta) -> "AnsatzSpec":
        return AnsatzSpec(self.kind, self.n, self.layers, np.asarray(theta, dtype=float))

    def padded(self, layers: int) -> "AnsatzSpec":
        """Same parameters followed by zeros for the extra layers."""
        if layers < self.layers:
            raise ValueError("cannot pad to fewer layers")
        theta = np.zeros(parameter_count(self.kind, self.n, layers))
        theta[: self.size] = self.theta
        return AnsatzSpec(self.kind, self.n, layers, theta)


def _rotation_layer(circuit: Circuit, theta, pos: int, n: int) -> int:
    for q in range(n):
        circuit.add("RY", q, angle=theta[pos])
        circuit.add("RZ", q, angle=theta[pos + 1])
        pos += 2
    return pos


def _bricks(circuit: Circuit, theta, pos: int, n: int, start: int) -> int:
    for q in range(start, n - 1, 2):
        circuit.add("RZZ", q, q + 1, angle=theta[pos])
        pos += 1
    return pos


def ansatz_circuit(spec: AnsatzSpec) -> Circuit:
    n, theta = spec.n, spec.theta
    circuit = Circuit(n)
    pos = 0
    for _ in range(spec.layers):
        pos = _rotation_layer(circuit, theta, pos, n)
        if spec.kind == "hea":
            for q in range(n - 1):
                circuit.add("CNOT", q, q + 1)
        elif spec.kind == "cba":
            pos = _bricks(circuit, theta, pos, n, 0)
            pos = _rotation_layer(circuit, theta, pos, n)
            pos = _bricks(circuit, theta, pos, n, 1)
        else:
            for q in range(n):
                circuit.add("RZZ", q, (q + 1) % n, angle=theta[pos])
            pos += 1
    return circuit
