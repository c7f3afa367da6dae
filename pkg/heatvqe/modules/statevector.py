"""
Statevector simulator for HeatVQE.

Conventions shared by every module:
- qubit 0 is the least-significant bit of the basis index
- multi-qubit gate matrices are written on a local index where targets[0]
  is the least-significant local bit, so a UNITARY or DIAGONAL gate on
  targets (0, ..., n-1) acts on the global index directly
- ancilla qubits are appended above the register

Noise is applied at measurement: each measured bit is replaced by a fair
coin with probability p before averaging. States stay pure.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..config import make_rng

logger = logging.getLogger("HeatVQE.Statevector")

_SQRT2_INV = 1 / np.sqrt(2)

_FIXED_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# targets (a, b), local index = bit_a + 2 * bit_b
_FIXED_2Q = {
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

_ROTATIONS = {
    "RX": lambda t: np.array(
        [[np.cos(t / 2), -1j * np.sin(t / 2)], [-1j * np.sin(t / 2), np.cos(t / 2)]]
    ),
    "RY": lambda t: np.array(
        [[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]], dtype=complex
    ),
    "RZ": lambda t: np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]),
    # exp(-i t Z x Z), no half angle
    "RZZ": lambda t: np.diag(
        [np.exp(-1j * t), np.exp(1j * t), np.exp(1j * t), np.exp(-1j * t)]
    ),
    "CPHASE": lambda t: np.diag([1, 1, 1, np.exp(1j * t)]).astype(complex),
}

_ARITY = {**{k: 1 for k in _FIXED_1Q}, **{k: 2 for k in _FIXED_2Q},
          "RX": 1, "RY": 1, "RZ": 1, "RZZ": 2, "CPHASE": 2}

GATE_KINDS = tuple(sorted(set(_ARITY) | {"DIAGONAL", "UNITARY"}))

_SELF_INVERSE = {"H", "X", "Y", "Z", "CNOT", "CZ", "SWAP"}


@dataclass(eq=False)
class Gate:
    """One gate: a kind, its targets, an optional angle or payload, optional controls."""

    kind: str
    targets: tuple
    angle: Optional[float] = None
    payload: Optional[np.ndarray] = None
    controls: tuple = ()
    control_values: tuple = ()

    def __post_init__(self):
        self.kind = self.kind.upper()
        self.targets = tuple(int(t) for t in self.targets)
        self.controls = tuple(int(c) for c in self.controls)
        if not self.control_values:
            self.control_values = (1,) * len(self.controls)
        self.control_values = tuple(int(v) for v in self.control_values)
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ARITY and len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s), got {self.targets}")
        if self.kind in _ROTATIONS and self.angle is None:
            raise ValueError(f"{self.kind} needs an angle")
        if self.kind in ("DIAGONAL", "UNITARY"):
            if self.payload is None:
                raise ValueError(f"{self.kind} needs a payload")
            self.payload = np.asarray(self.payload, dtype=complex)
            dim = 2 ** len(self.targets)
            expected = (dim,) if self.kind == "DIAGONAL" else (dim, dim)
            if self.payload.shape != expected:
                raise ValueError(f"{self.kind} payload shape {self.payload.shape}, expected {expected}")
        wires = self.targets + self.controls
        if len(set(wires)) != len(wires):
            raise ValueError(f"gate {self.kind} has repeated qubits {wires}")
        if len(self.control_values) != len(self.controls):
            raise ValueError("control_values must match controls")

    @property
    def qubits(self) -> tuple:
        return self.targets + self.controls

    def matrix(self) -> np.ndarray:
        """Unitary on the targets (controls excluded)."""
        if self.kind in _FIXED_1Q:
            return _FIXED_1Q[self.kind]
        if self.kind in _FIXED_2Q:
            return _FIXED_2Q[self.kind]
        if self.kind in _ROTATIONS:
            return np.asarray(_ROTATIONS[self.kind](self.angle), dtype=complex)
        if self.kind == "DIAGONAL":
            return np.diag(self.payload)
        return self.payload

    def inverse(self) -> "Gate":
        kind, angle, payload = self.kind, self.angle, self.payload
        if kind in _SELF_INVERSE:
            pass
        elif kind == "S":
            kind = "SDG"
        elif kind == "SDG":
            kind = "S"
        elif kind in _ROTATIONS:
            angle = -angle
        elif kind == "DIAGONAL":
            payload = np.conj(payload)
        else:
            payload = payload.conj().T
        return Gate(kind, self.targets, angle, payload, self.controls, self.control_values)

    def with_control(self, control: int, value: int = 1) -> "Gate":
        return Gate(
            self.kind, self.targets, self.angle, self.payload,
            (control,) + self.controls, (value,) + self.control_values,
        )

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "targets": list(self.targets), "angle": self.angle}
        if self.payload is not None:
            data["payload"] = [[z.real, z.imag] for z in self.payload.ravel()]
        if self.controls:
            data["controls"] = list(self.controls)
            data["control_values"] = list(self.control_values)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Gate":
        payload = data.get("payload")
        if payload is not None:
            flat = np.array([complex(re, im) for re, im in payload])
            dim = 2 ** len(data["targets"])
            payload = flat if data["kind"].upper() == "DIAGONAL" else flat.reshape(dim, dim)
        return cls(
            data["kind"], tuple(data["targets"]), data.get("angle"), payload,
            tuple(data.get("controls", ())), tuple(data.get("control_values", ())),
        )


@dataclass
class Circuit:
    """Ordered gate list on n qubits."""

    n: int
    gates: List[Gate] = field(default_factory=list)

    def add(self, kind: str, *targets: int, angle: Optional[float] = None,
            payload=None) -> "Circuit":
        return self.append(Gate(kind, targets, angle, payload))

    def append(self, gate: Gate) -> "Circuit":
        for q in gate.qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"gate {gate.kind} addresses qubit {q} outside 0..{self.n - 1}")
        self.gates.append(gate)
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        for gate in other.gates:
            self.append(gate)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.n, other.n), list(self.gates)).extend(other)

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind.upper())

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [g.inverse() for g in reversed(self.gates)])

    def controlled(self, control: int, value: int = 1) -> "Circuit":
        """Every gate conditioned on `control` being `value`; the register grows if needed."""
        out = Circuit(max(self.n, control + 1))
        for gate in self.gates:
            out.append(gate.with_control(control, value))
        return out

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "gates": [g.to_dict() for g in self.gates]})

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        data = json.loads(text)
        return cls(data["n"], [Gate.from_dict(g) for g in data["gates"]])


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        size = self.amplitudes.size
        n = int(round(np.log2(size))) if size else -1
        if size == 0 or 2 ** n != size:
            raise ValueError(f"state length {size} is not a power of two")
        if self.n is None:
            self.n = n
        elif self.n != n:
            raise ValueError(f"state length {size} does not match n={self.n}")

    @classmethod
    def zero(cls, n: int) -> "QuantumState":
        return cls.basis(n, 0)

    @classmethod
    def basis(cls, n: int, k: int) -> "QuantumState":
        amps = np.zeros(2 ** n, dtype=complex)
        amps[k] = 1.0
        return cls(amps, n)

    @classmethod
    def from_vector(cls, vector, normalize: bool = True) -> "QuantumState":
        vec = np.asarray(vector, dtype=complex)
        if normalize:
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            vec = vec / norm
        return cls(vec)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.n)


def _apply_matrix(psi: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    k = len(targets)
    tensor = psi.reshape((2,) * n)
    # last target becomes the leading (most significant) local axis
    axes = [n - 1 - q for q in reversed(targets)]
    tensor = np.moveaxis(tensor, axes, list(range(k)))
    shape = tensor.shape
    tensor = (matrix @ tensor.reshape(2 ** k, -1)).reshape(shape)
    return np.moveaxis(tensor, list(range(k)), axes).reshape(-1)


def _apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    if not gate.controls:
        if gate.kind == "DIAGONAL" and len(gate.targets) == n and gate.targets == tuple(range(n)):
            return psi * gate.payload
        return _apply_matrix(psi, gate.matrix(), gate.targets, n)

    control, value = gate.controls[0], gate.control_values[0]
    rest = Gate(gate.kind, gate.targets, gate.angle, gate.payload,
                gate.controls[1:], gate.control_values[1:])
    # drop the control wire and shift the qubits above it down by one
    remap = lambda q: q - 1 if q > control else q
    rest = Gate(rest.kind, tuple(remap(q) for q in rest.targets), rest.angle, rest.payload,
                tuple(remap(q) for q in rest.controls), rest.control_values)

    tensor = psi.reshape((2,) * n).copy()
    index = [slice(None)] * n
    index[n - 1 - control] = value
    index = tuple(index)
    block = tensor[index].reshape(-1)
    tensor[index] = _apply_gate(block, rest, n - 1).reshape((2,) * (n - 1))
    return tensor.reshape(-1)


def run_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    """Apply every gate of `circuit` to `state` in order."""
    if state.n != circuit.n:
        raise ValueError(f"state has {state.n} qubits, circuit has {circuit.n}")
    psi = state.amplitudes.copy()
    for gate in circuit.gates:
        for q in gate.qubits:
            if not 0 <= q < circuit.n:
                raise ValueError(f"gate {gate.kind} addresses qubit {q} outside register")
        psi = _apply_gate(psi, gate, circuit.n)
    return QuantumState(psi, circuit.n)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit, column by column."""
    size = 2 ** circuit.n
    columns = [run_circuit(QuantumState.basis(circuit.n, k), circuit).amplitudes for k in range(size)]
    return np.stack(columns, axis=1)


def qft_circuit(n: int, offset: int = 0, width: Optional[int] = None) -> Circuit:
    """
    Quantum Fourier transform with matrix elements w^{jk}/sqrt(N), w = exp(2 pi i/N).

    The transform acts on qubits offset..offset+n-1 of a register of `width`
    qubits (default n). Uses n Hadamards, n(n-1)/2 controlled phases and
    floor(n/2) swaps.
    """
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    circuit = Circuit(width if width is not None else offset + n)
    for j in reversed(range(n)):
        circuit.add("H", offset + j)
        for k in reversed(range(j)):
            circuit.add("CPHASE", offset + j, offset + k, angle=np.pi / 2 ** (j - k))
    for i in range(n // 2):
        circuit.add("SWAP", offset + i, offset + n - i - 1)
    return circuit


def expectation_diagonal(state: QuantumState, eigenvalues) -> float:
    """Exact weighted average sum_k |psi_k|^2 lambda_k."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size != state.amplitudes.size:
        raise ValueError(f"{eigenvalues.size} eigenvalues for a state of length {state.amplitudes.size}")
    return float(np.dot(state.probabilities(), eigenvalues))


def sample(state: QuantumState, shots: int, seed=None, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Multinomial outcome counts over the computational basis."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = rng if rng is not None else make_rng(seed)
    probs = state.probabilities()
    return rng.multinomial(shots, probs / probs.sum())


def depolarize_distribution(probs: np.ndarray, p: float, qubits: Optional[Iterable[int]] = None) -> np.ndarray:
    """Replace each listed measured bit by a fair coin with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1], got {p}")
    probs = np.asarray(probs, dtype=float)
    n = int(round(np.log2(probs.size)))
    if p == 0.0:
        return probs.copy()
    tensor = probs.reshape((2,) * n)
    for q in (range(n) if qubits is None else qubits):
        axis = n - 1 - q
        tensor = (1 - p) * tensor + p * tensor.mean(axis=axis, keepdims=True)
    return tensor.reshape(-1)


def apply_depolarizing(probs: np.ndarray, observable: np.ndarray, p: float,
                       qubits: Optional[Iterable[int]] = None) -> float:
    """Noisy expectation of a per-outcome observable under bitwise depolarization."""
    noisy = depolarize_distribution(probs, p, qubits)
    return float(np.dot(noisy, np.asarray(observable, dtype=float)))


class Backend:
    """
    Measurement backend: exact or shot-sampled, with optional depolarizing noise.

    Every estimate counts as one simulator run. Noise applies only to the
    bits named by the caller (the Hadamard-test ancilla), so each test value
    shrinks by exactly 1 - p; plain diagonal measurements stay ideal.
    """

    def __init__(self, mode: str = "exact", shots: int = 0, seed: Optional[int] = None,
                 noise: float = 0.0, stream: Sequence[int] = ()):
        if mode not in ("exact", "shots"):
            raise ValueError(f"mode must be 'exact' or 'shots', got {mode!r}")
        if mode == "shots" and shots < 1:
            raise ValueError("shots mode needs shots >= 1")
        if not 0.0 <= noise <= 1.0:
            raise ValueError(f"noise must be in [0, 1], got {noise}")
        self.mode = mode
        self.shots = shots
        self.seed = seed
        self.noise = noise
        self.runs = 0
        self.rng = make_rng(seed, *stream)

    @classmethod
    def exact(cls, noise: float = 0.0) -> "Backend":
        return cls("exact", noise=noise)

    @classmethod
    def sampled(cls, shots: int, seed: Optional[int] = None, noise: float = 0.0,
                stream: Sequence[int] = ()) -> "Backend":
        return cls("shots", shots=shots, seed=seed, noise=noise, stream=stream)

    def estimate(self, probs: np.ndarray, observable: np.ndarray,
                 noisy_qubits: Optional[Sequence[int]] = None) -> float:
        self.runs += 1
        p = self.noise if noisy_qubits is not None else 0.0
        observable = np.asarray(observable, dtype=float)
        if self.mode == "exact":
            return apply_depolarizing(probs, observable, p, noisy_qubits)
        probs = depolarize_distribution(probs, p, noisy_qubits)
        counts = self.rng.multinomial(self.shots, probs / probs.sum())
        return float(np.dot(counts, observable) / self.shots)

    def measure_diagonal(self, state: QuantumState, eigenvalues) -> float:
        eigenvalues = np.asarray(eigenvalues, dtype=float)
        if eigenvalues.size != state.amplitudes.size:
            raise ValueError("eigenvalue count does not match the state")
        return self.estimate(state.probabilities(), eigenvalues)

    def __repr__(self):
        return f"Backend(mode={self.mode!r}, shots={self.shots}, noise={self.noise}, runs={self.runs})"


def hadamard_test(prep: Circuit, controlled_op: Circuit, eigenvalues, part: str = "re",
                  backend: Optional[Backend] = None, *, initial=None,
                  anti_controlled_op: Optional[Circuit] = None,
                  post: Optional[Circuit] = None) -> float:
    """
    Re or Im of <u|D|v> from one ancilla-assisted run.

    The register starts in `initial` (default |0..0>) and is prepared by
    `prep`. The ancilla (qubit n, above the register) gets H, then S for the
    imaginary part. `controlled_op` acts when the ancilla is 1 and
    `anti_controlled_op` when it is 0, then `post` acts on the register and a
    final H closes the ancilla. With u = post.W.prep|initial> and
    v = post.V.prep|initial>, the signed average of (-1)^a lambda_k is
    Re<u|D|v>, or -Im<u|D|v> with the S gate in place.
    """
    part = part.lower()
    if part not in ("re", "im"):
        raise ValueError(f"part must be 're' or 'im', got {part!r}")
    n = prep.n
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size != 2 ** n:
        raise ValueError(f"{eigenvalues.size} eigenvalues for a {n}-qubit register")
    for op in (controlled_op, anti_controlled_op, post):
        if op is None:
            continue
        if op.n != n or any(q >= n for g in op.gates for q in g.qubits):
            raise ValueError("operators must act on the register only; the ancilla is reserved")
    backend = backend if backend is not None else Backend.exact()

    ancilla = n
    circuit = Circuit(n + 1).extend(prep)
    circuit.add("H", ancilla)
    if part == "im":
        circuit.add("S", ancilla)
    circuit.extend(controlled_op.controlled(ancilla, 1))
    if anti_controlled_op is not None:
        circuit.extend(anti_controlled_op.controlled(ancilla, 0))
    if post is not None:
        circuit.extend(post)
    circuit.add("H", ancilla)

    register = np.zeros(2 ** n, dtype=complex)
    if initial is None:
        register[0] = 1.0
    else:
        register = np.asarray(initial, dtype=complex)
    start = QuantumState(np.concatenate([register, np.zeros_like(register)]), n + 1)
    final = run_circuit(start, circuit)

    signs = np.repeat([1.0, -1.0], 2 ** n)
    observable = signs * np.tile(eigenvalues, 2)
    value = backend.estimate(final.probabilities(), observable, noisy_qubits=(ancilla,))
    return -value if part == "im" else value
