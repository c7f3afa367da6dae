"""
Ansatz tree solver for A' x = b.

The solution is expanded as x = sum_j alpha_j |j>, where every node |j> is
QFT^dagger Z_w QFT |b> for an I/Z word w. Menu generators are the words of
the Fourier-space decomposition of A' (I, Z_i, Z_i Z_j); products along a
path reduce to a single word, so nodes are identified by their Z mask.

All inner products come from Hadamard tests on the Fourier-prepared state
QFT|b>:

    gram   G_ij = <i|A'^2|j>      D = lambda'^2
    rhs    v_i  = <i|A'|b>        D = lambda'
    overlap      <i|j>            D = 1

Diagonal entries are plain (ancilla-free) measurements. Given the caches,
alpha minimizes alpha^dagger G alpha - 2 Re(alpha^dagger v) + 1 without any
further simulator calls.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

from ..config import check_cap
from ..errors import DivergentConditionError, TreeExhaustedError
from ..records import ExperimentRecord
from .heat import FourierSystem, fidelity, multidim_spectrum, spectrum
from .pauli import (
    PauliDecomposition,
    PauliProduct,
    decompose_substituted_fourier,
    diagonal_weights,
    masks_from_word,
    parity,
    word_sort_key,
    z_count,
    z_word,
)
from .statevector import Backend, Circuit, Gate, QuantumState, hadamard_test, run_circuit

logger = logging.getLogger("HeatVQE.AnsatzTree")

TIE_TOL = 1e-12
RANK_DECIMALS = 12
GRAM_COND_LIMIT = 1e12
NOISE_DEPTH = 4


@dataclass
class UnitaryMenu:
    """Candidate generators with their Fourier-space decomposition weights."""

    qubits: int
    masks: List[int]
    weights: List[float]

    def __post_init__(self):
        if len(self.masks) != len(self.weights):
            raise ValueError("menu masks and weights differ in length")
        if len(set(self.masks)) != len(self.masks):
            raise ValueError("menu has repeated generators")

    @classmethod
    def from_decomposition(cls, decomposition: PauliDecomposition) -> "UnitaryMenu":
        terms = sorted(decomposition, key=lambda t: word_sort_key(t.word))
        masks = []
        for term in terms:
            x, z = masks_from_word(term.word)
            if x:
                raise ValueError(f"menu word {term.word} is not an I/Z word")
            masks.append(z)
        return cls(decomposition.n, masks, [float(np.real(t.weight)) for t in terms])

    @classmethod
    def for_system(cls, system: FourierSystem) -> "UnitaryMenu":
        if system.substituted:
            menu = multidim_menu(system.n, system.c, system.d_r)
        else:
            menu = cls.from_decomposition(diagonal_weights(system.eigenvalues, threshold=1e-12))
        eigenvalues = np.asarray(system.eigenvalues, dtype=float)
        if np.all(eigenvalues != 0):
            menu = menu.ranked(diagonal_weights(1.0 / eigenvalues))
        return menu

    def ranked(self, reference: PauliDecomposition) -> "UnitaryMenu":
        """
        Same generators reordered by decreasing |reference weight|.

        The identity stays first; equal weights keep word_sort_key order.
        Menu order is the tie-break order of expand_step.
        """
        rank = {}
        for term in reference:
            _, z = masks_from_word(term.word)
            rank[z] = round(abs(complex(term.weight)), RANK_DECIMALS)
        words = self.words

        def key(i):
            return (z_count(words[i]) > 0, -rank.get(self.masks[i], 0.0), word_sort_key(words[i]))

        order = sorted(range(len(self.masks)), key=key)
        return UnitaryMenu(self.qubits, [self.masks[i] for i in order], [self.weights[i] for i in order])

    def __len__(self) -> int:
        return len(self.masks)

    @property
    def words(self) -> List[str]:
        return [z_word(m, self.qubits) for m in self.masks]

    def decomposition(self) -> PauliDecomposition:
        return PauliDecomposition(self.qubits, [PauliProduct(w, wt) for w, wt in zip(self.words, self.weights)])


def multidim_menu(n: int, c: float, d_r: int = 1) -> UnitaryMenu:
    """
    Menu for the d_r-dimensional substituted operator.

    Each axis contributes its own Z_i and Z_i Z_j words on qubits
    a*n..a*n+n-1; the identity weights of the axes merge into one term.
    """
    if d_r < 1:
        raise ValueError("d_r must be >= 1")
    check_cap(n * d_r, "ansatz tree menu")
    if d_r == 1:
        return UnitaryMenu.from_decomposition(decompose_substituted_fourier(n, c))

    base = decompose_substituted_fourier(n, 0.0)
    weights: Dict[int, float] = {0: -float(c)}
    for axis in range(d_r):
        for term in base:
            _, z = masks_from_word(term.word)
            mask = z << (axis * n)
            weights[mask] = weights.get(mask, 0.0) + float(np.real(term.weight))
    qubits = n * d_r
    decomposition = PauliDecomposition.from_dict(qubits, {z_word(m, qubits): w for m, w in weights.items()}, None)
    return UnitaryMenu.from_decomposition(decomposition)


def word_circuit(mask: int, qubits: int) -> Circuit:
    circuit = Circuit(qubits)
    for q in range(qubits):
        if (mask >> q) & 1:
            circuit.add("Z", q)
    return circuit


def _word_signs(mask: int, qubits: int) -> np.ndarray:
    return 1.0 - 2.0 * parity(np.arange(2 ** qubits) & mask, qubits)


@dataclass
class TreeNode:
    word: str
    mask: int
    order: int
    parent: Optional[int] = None
    generator: Optional[str] = None


def node_state(node: TreeNode, system: FourierSystem) -> QuantumState:
    """QFT^dagger Z_w QFT |b> by simulation."""
    qft = system.qft()
    circuit = qft + word_circuit(node.mask, system.qubits) + qft.inverse()
    return run_circuit(QuantumState(system.b), circuit)


@dataclass
class MeasurementLedger:
    """Counts of the quantum work spent growing one tree."""

    gram_batches: int = 0
    rhs_batches: int = 0
    diagonal_runs: int = 0
    gradient_evaluations: int = 0
    gradient_batches: int = 0
    overlap_batches: int = 0

    @property
    def hadamard_batches(self) -> int:
        return self.gram_batches + self.rhs_batches + self.gradient_batches + self.overlap_batches

    def to_dict(self) -> dict:
        return {
            "gram_batches": self.gram_batches,
            "rhs_batches": self.rhs_batches,
            "diagonal_runs": self.diagonal_runs,
            "gradient_evaluations": self.gradient_evaluations,
            "gradient_batches": self.gradient_batches,
            "overlap_batches": self.overlap_batches,
        }


class AnsatzTree:
    """
    Active node set S with cached Gram and rhs entries and current weights.

    The root (all-I word, the state |b>) is measured on construction.
    """

    def __init__(self, system: FourierSystem, backend: Optional[Backend] = None,
                 menu: Optional[UnitaryMenu] = None, logger=None):
        self.system = system
        self.backend = backend if backend is not None else Backend.exact()
        self.menu = menu if menu is not None else UnitaryMenu.for_system(system)
        self.log = logger or logging.getLogger("HeatVQE.AnsatzTree")
        self.qubits = system.qubits
        self.ledger = MeasurementLedger()
        self.nodes: List[TreeNode] = []
        self.gram = np.zeros((0, 0), dtype=complex)
        self.rhs = np.zeros(0, dtype=complex)
        self.alpha = np.zeros(0, dtype=complex)
        self.min_norm = False
        self.loss_trace: List[float] = []
        self._empty = Circuit(self.qubits)
        # QFT|b> is prepared once and reused as the start state of every test
        self._prepared = run_circuit(QuantumState(system.b), system.qft())
        self._lambda = np.asarray(system.eigenvalues, dtype=float)
        self._lambda2 = self._lambda ** 2

        root = TreeNode(z_word(0, self.qubits), 0, 0)
        self.nodes.append(root)
        self.gram = np.array([[self.backend.measure_diagonal(self._prepared, self._lambda2)]], dtype=complex)
        self.rhs = np.array([self.backend.measure_diagonal(self._prepared, self._lambda)], dtype=complex)
        self.ledger.diagonal_runs += 2
        self.solve_alpha()

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        return len(self.nodes)

    @property
    def masks(self) -> List[int]:
        return [node.mask for node in self.nodes]

    def _element(self, left: int, right: int, eigenvalues: np.ndarray) -> complex:
        """<left|D|right> in the Fourier basis from one Re/Im Hadamard-test pair."""
        kwargs = dict(initial=self._prepared.amplitudes)
        if left:
            kwargs["anti_controlled_op"] = word_circuit(left, self.qubits)
        right_op = word_circuit(right, self.qubits)
        re = hadamard_test(self._empty, right_op, eigenvalues, "re", self.backend, **kwargs)
        im = hadamard_test(self._empty, right_op, eigenvalues, "im", self.backend, **kwargs)
        return complex(re, im)

    def gram_extend(self, mask: int, parent: Optional[int] = None, generator: Optional[str] = None) -> TreeNode:
        """
        Add a node and measure only its new entries.

        Costs |S| Gram batches, one rhs batch and one plain diagonal run.
        """
        if mask in self.masks:
            raise ValueError(f"node {z_word(mask, self.qubits)} is already in the tree")
        size = len(self.nodes)
        column = np.array([self._element(m, mask, self._lambda2) for m in self.masks], dtype=complex)
        self.ledger.gram_batches += size
        state = run_circuit(self._prepared, word_circuit(mask, self.qubits))
        diagonal = self.backend.measure_diagonal(state, self._lambda2)
        self.ledger.diagonal_runs += 1
        v_new = self._element(mask, 0, self._lambda)
        self.ledger.rhs_batches += 1

        gram = np.zeros((size + 1, size + 1), dtype=complex)
        gram[:size, :size] = self.gram
        gram[:size, size] = column
        gram[size, :size] = np.conj(column)
        gram[size, size] = diagonal
        self.gram = gram
        self.rhs = np.append(self.rhs, v_new)
        node = TreeNode(z_word(mask, self.qubits), mask, size, parent, generator)
        self.nodes.append(node)
        return node

    def solve_alpha(self) -> np.ndarray:
        """Exact minimizer of the cached quadratic loss; minimum-norm when G is singular."""
        cond = np.linalg.cond(self.gram) if self.gram.size else np.inf
        if np.isfinite(cond) and cond < GRAM_COND_LIMIT:
            self.alpha = scipy.linalg.solve(self.gram, self.rhs, assume_a="her")
            self.min_norm = False
        else:
            self.alpha = scipy.linalg.lstsq(self.gram, self.rhs)[0]
            if not self.min_norm:
                self.log.warning(f"[AnsatzTree] Singular Gram matrix at depth {self.depth} (cond={cond:.2e}), using minimum-norm weights")
            self.min_norm = True
        self.loss_trace.append(self.loss())
        return self.alpha

    def loss(self, alpha: Optional[np.ndarray] = None) -> float:
        """alpha^dagger G alpha - 2 Re(alpha^dagger v) + 1 from the caches."""
        a = self.alpha if alpha is None else np.asarray(alpha, dtype=complex)
        return float(np.real(np.vdot(a, self.gram @ a)) - 2 * np.real(np.vdot(a, self.rhs)) + 1.0)

    def gradient_overlap(self, mask: int) -> complex:
        """g = 2 sum_j alpha_j <c|A'^2|j> - 2 <c|A'|b>, from |S| + 1 Hadamard-test batches."""
        row = np.array([self._element(mask, m, self._lambda2) for m in self.masks], dtype=complex)
        v_c = self._element(mask, 0, self._lambda)
        self.ledger.gradient_batches += len(self.nodes) + 1
        self.ledger.gradient_evaluations += 1
        return complex(2 * np.dot(row, self.alpha) - 2 * v_c)

    def children(self, index: int) -> List[tuple]:
        """(mask, parent, generator) for each menu word applied to node `index`, in menu order."""
        base = self.nodes[index].mask
        return [(base ^ m, index, z_word(m, self.qubits)) for m in self.menu.masks]

    def candidates(self) -> List[tuple]:
        """Non-duplicate children of the last node, or of every node when those run out."""
        taken = set(self.masks)
        fresh = [c for c in self.children(len(self.nodes) - 1) if c[0] not in taken]
        if fresh:
            return _unique(fresh)
        self.log.debug(f"[AnsatzTree] Children of node {len(self.nodes) - 1} all in the tree, widening to the frontier")
        out = []
        for index in range(len(self.nodes)):
            out.extend(c for c in self.children(index) if c[0] not in taken)
        return _unique(out)

    def expand_step(self) -> TreeNode:
        """
        Add the candidate with the largest |g| and re-solve alpha.

        Ties go to the lowest candidate index, i.e. the generator with the
        largest |A'^-1| weight when the menu is ranked.
        """
        options = self.candidates()
        if not options:
            raise TreeExhaustedError(f"no unvisited words left at depth {self.depth}")
        scores = np.array([abs(self.gradient_overlap(mask)) for mask, _, _ in options])
        top = scores.max()
        chosen = int(np.flatnonzero(scores >= top - TIE_TOL * max(1.0, top))[0])
        mask, parent, generator = options[chosen]
        node = self.gram_extend(mask, parent, generator)
        self.solve_alpha()
        return node

    def fourier_solution(self, alpha: Optional[np.ndarray] = None) -> np.ndarray:
        a = self.alpha if alpha is None else np.asarray(alpha, dtype=complex)
        b_f = self._prepared.amplitudes
        out = np.zeros_like(b_f)
        for weight, node in zip(a, self.nodes):
            out += weight * _word_signs(node.mask, self.qubits) * b_f
        return out

    def dense_solution(self, alpha: Optional[np.ndarray] = None) -> np.ndarray:
        """x = sum_j alpha_j |j> in the position basis, for the normalized rhs."""
        return self.system.from_fourier(self.fourier_solution(alpha))

    def dense_loss(self) -> float:
        """||A'x - b||^2 evaluated densely."""
        residual = self.system.apply(self.dense_solution()) - self.system.b
        return float(np.real(np.vdot(residual, residual)))


def _unique(options: Sequence[tuple]) -> List[tuple]:
    seen = set()
    out = []
    for option in options:
        if option[0] not in seen:
            seen.add(option[0])
            out.append(option)
    return out


def original_system(system: FourierSystem) -> FourierSystem:
    """Same rhs against the unsubstituted sine spectrum."""
    eig = spectrum(system.n, system.c) if system.d_r == 1 else multidim_spectrum(system.n, system.c, system.d_r, False)
    return FourierSystem(system.n, system.c, eig, system.b, system.d_r, substituted=False)


@dataclass
class AtaResult:
    n: int
    c: float
    d_r: int
    depth: int
    fidelity: float
    fidelity_original: float
    loss: float
    censored: bool
    alpha: np.ndarray
    nodes: List[TreeNode]
    x: np.ndarray
    ledger: MeasurementLedger
    runs: int
    min_norm: bool = False
    loss_trace: List[float] = field(default_factory=list)
    fidelity_trace: List[float] = field(default_factory=list)

    @property
    def words(self) -> List[str]:
        return [node.word for node in self.nodes]

    def to_record(self, seed: int = 0, mode: str = "exact", shots: int = 0, experiment: str = "ata"):
        return ExperimentRecord(
            experiment=experiment,
            n=self.n,
            c=self.c,
            method="ata",
            metric="depth",
            value=float(self.depth),
            seed=seed,
            mode=mode,
            shots=shots,
            censored=self.censored,
            extra={
                "depth": self.depth,
                "fidelity": self.fidelity,
                "fidelity_original": self.fidelity_original,
                "loss": self.loss,
                "measurements": self.runs,
            },
        )


def run(system: FourierSystem, target: float = 0.99, max_depth: Optional[int] = None,
        backend: Optional[Backend] = None, logger=None) -> AtaResult:
    """
    Grow the tree until the fidelity against the dense A' solution reaches
    `target` or the tree holds `max_depth` nodes (default: every word).
    """
    log = logger or logging.getLogger("HeatVQE.AnsatzTree")
    if system.c <= 0:
        raise DivergentConditionError(f"the ansatz tree needs c > 0, got {system.c}")
    backend = backend if backend is not None else Backend.exact()
    cap = max_depth if max_depth is not None else 2 ** system.qubits
    if cap < 1:
        raise ValueError("max_depth must be >= 1")

    start_runs = backend.runs
    oracle = system.solve()
    tree = AnsatzTree(system, backend, logger=log)
    fidelities = [fidelity(tree.dense_solution(), oracle)]
    while fidelities[-1] < target and tree.depth < cap:
        try:
            node = tree.expand_step()
        except TreeExhaustedError as e:
            log.warning(f"[AnsatzTree] {e}")
            break
        fidelities.append(fidelity(tree.dense_solution(), oracle))
        log.debug(
            f"[AnsatzTree] depth {tree.depth} added {node.word} "
            f"loss={tree.loss_trace[-1]:.3e} fidelity={fidelities[-1]:.6f}"
        )

    x = tree.dense_solution()
    censored = fidelities[-1] < target
    try:
        fid_original = fidelity(x, original_system(system).solve())
    except ArithmeticError:
        fid_original = float("nan")
    if censored:
        log.warning(f"[AnsatzTree] n={system.n} c={system.c:g}: fidelity {fidelities[-1]:.4f} < {target} at depth cap {cap}")
    else:
        log.info(f"[AnsatzTree] n={system.n} c={system.c:g}: depth {tree.depth} fidelity={fidelities[-1]:.6f}")
    return AtaResult(
        n=system.n, c=system.c, d_r=system.d_r, depth=tree.depth, fidelity=fidelities[-1],
        fidelity_original=fid_original, loss=tree.loss_trace[-1], censored=censored,
        alpha=tree.alpha.copy(), nodes=list(tree.nodes), x=x, ledger=tree.ledger,
        runs=backend.runs - start_runs, min_norm=tree.min_norm,
        loss_trace=list(tree.loss_trace), fidelity_trace=fidelities,
    )


def run_with_noise(system: FourierSystem, p: float, max_depth: int = NOISE_DEPTH,
                   target: float = 1.0, logger=None) -> AtaResult:
    """
    Ansatz tree with depolarizing probability p on every Hadamard test.

    Plain diagonal measurements stay ideal, so at p = 1 the off-diagonal
    Gram entries and the non-root rhs entries vanish and the weights
    collapse onto the root.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must be in [0, 1], got {p}")
    return run(system, target=target, max_depth=max_depth, backend=Backend.exact(noise=p), logger=logger)


def collapsed_fidelity(system: FourierSystem) -> float:
    """Fidelity of the fully depolarized tree, x proportional to |b>."""
    return fidelity(system.b, system.solve())


def _state_loader(alpha: np.ndarray, dim: int) -> np.ndarray:
    """Unitary whose first column is alpha/||alpha|| padded to dim."""
    u = np.zeros(dim, dtype=complex)
    u[: alpha.size] = alpha / np.linalg.norm(alpha)
    seed = np.eye(dim, dtype=complex)
    seed[:, 0] = u
    q, r = scipy.linalg.qr(seed)
    return q * np.concatenate([[r[0, 0]], np.ones(dim - 1)])


@dataclass
class SolutionCircuit:
    circuit: Circuit
    register_qubits: int
    aux_qubits: int
    success_probability: float
    state: np.ndarray

    def initial_state(self, b) -> QuantumState:
        register = np.asarray(b, dtype=complex)
        return QuantumState(np.concatenate([register, np.zeros(register.size * (2 ** self.aux_qubits - 1))]))


def prepare_solution_circuit(alpha, nodes: Sequence[TreeNode], system: FourierSystem) -> SolutionCircuit:
    """
    Circuit producing x/||x|| after post-selecting the auxiliary register on |0..0>.

    Loads alpha/||alpha|| on ceil(log2 d) auxiliary qubits above the
    register, applies QFT, a diagonal multiplexed on the auxiliary index
    (the Z word of node j when the index is j), the inverse QFT, then H on
    every auxiliary qubit. Success probability is ||x||^2 / (||alpha||^2 2^a).
    """
    alpha = np.asarray(alpha, dtype=complex).ravel()
    d = len(nodes)
    if d == 0:
        raise ValueError("cannot prepare a solution from an empty tree")
    if alpha.size != d:
        raise ValueError(f"{alpha.size} weights for {d} nodes")
    if not np.any(alpha):
        raise ValueError("all weights are zero")
    qubits = system.qubits
    aux = math.ceil(math.log2(d)) if d > 1 else 0
    check_cap(qubits + aux, "solution circuit")
    total = qubits + aux

    circuit = Circuit(total)
    if aux:
        circuit.append(Gate("UNITARY", tuple(range(qubits, total)), payload=_state_loader(alpha, 2 ** aux)))
    qft = system.qft()
    circuit.extend(qft)
    payload = np.ones(2 ** total, dtype=complex)
    block = 2 ** qubits
    for j, node in enumerate(nodes):
        payload[j * block:(j + 1) * block] = _word_signs(node.mask, qubits)
    circuit.append(Gate("DIAGONAL", tuple(range(total)), payload=payload))
    circuit.extend(qft.inverse())
    for q in range(qubits, total):
        circuit.add("H", q)

    prepared = SolutionCircuit(circuit, qubits, aux, 0.0, np.zeros(block, dtype=complex))
    final = run_circuit(prepared.initial_state(system.b), circuit).amplitudes[:block]
    if aux == 0:
        final = final * alpha[0] / abs(alpha[0])
    prepared.success_probability = float(np.real(np.vdot(final, final)))
    prepared.state = final / math.sqrt(prepared.success_probability)
    return prepared


def solution_norm(alpha, nodes: Sequence[TreeNode], system: FourierSystem,
                  backend: Optional[Backend] = None, ledger: Optional[MeasurementLedger] = None) -> float:
    """||x|| = sqrt(sum_jk alpha_j^* alpha_k <j|k>) with the off-diagonal overlaps from Hadamard tests."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    backend = backend if backend is not None else Backend.exact()
    qubits = system.qubits
    prepared = run_circuit(QuantumState(system.b), system.qft()).amplitudes
    ones = np.ones(2 ** qubits)
    empty = Circuit(qubits)
    d = len(nodes)
    overlaps = np.eye(d, dtype=complex)
    for j in range(d):
        for k in range(j + 1, d):
            kwargs = dict(initial=prepared, anti_controlled_op=word_circuit(nodes[j].mask, qubits))
            v = word_circuit(nodes[k].mask, qubits)
            value = complex(
                hadamard_test(empty, v, ones, "re", backend, **kwargs),
                hadamard_test(empty, v, ones, "im", backend, **kwargs),
            )
            overlaps[j, k] = value
            overlaps[k, j] = np.conj(value)
            if ledger is not None:
                ledger.overlap_batches += 1
    return float(math.sqrt(max(0.0, np.real(np.vdot(alpha, overlaps @ alpha)))))
