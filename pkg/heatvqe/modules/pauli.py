"""
Pauli words and decompositions.

Words are strings written most-significant qubit first, so "ZI" is Z on
qubit 1. Internally a word is a pair of bit masks (x, z) with Y = both.

- decompose_hermitian: brute-force trace oracle, weight = tr(M P) / 2^n
- decompose_diagonal_polynomial: I/Z expansion of diag(p(m)) through
  m = (N-1)/2 I - sum_k 2^(k-1) Z_k, at most deg(p) Z's per word
- decompose_substituted_fourier: the <= 2-Z expansion of A' in Fourier space
- inverse_weights: I/Z weights of the inverse substituted spectrum
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

from ..config import PRUNE_THRESHOLD
from ..errors import DivergentConditionError, NonHermitianError
from .heat import DenseOperator, substituted_quadratic, substituted_spectrum
from .statevector import QuantumState

logger = logging.getLogger("HeatVQE.Pauli")

BRUTE_FORCE_MAX_QUBITS = 6

_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MATRIX = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def parity(values: np.ndarray, n: int) -> np.ndarray:
    """Bit parity of each integer in `values` (n low bits)."""
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros_like(values)
    for q in range(n):
        out ^= (values >> q) & 1
    return out


def word_from_masks(x: int, z: int, n: int) -> str:
    return "".join(_LETTER[((x >> q) & 1, (z >> q) & 1)] for q in reversed(range(n)))


def masks_from_word(word: str) -> tuple:
    n = len(word)
    x = z = 0
    for position, letter in enumerate(word.upper()):
        q = n - 1 - position
        if letter in "XY":
            x |= 1 << q
        if letter in "YZ":
            z |= 1 << q
        if letter not in "IXYZ":
            raise ValueError(f"invalid Pauli letter {letter!r} in {word!r}")
    return x, z


def z_word(mask: int, n: int) -> str:
    return word_from_masks(0, mask, n)


def z_count(word: str) -> int:
    return sum(1 for letter in word if letter != "I")


def word_qubits(word: str) -> tuple:
    """Qubits a word acts on non-trivially, ascending."""
    n = len(word)
    return tuple(sorted(n - 1 - i for i, letter in enumerate(word) if letter != "I"))


def word_sort_key(word: str) -> tuple:
    return (z_count(word), word_qubits(word), word)


@dataclass
class PauliProduct:
    word: str
    weight: complex = 1.0

    def __post_init__(self):
        self.word = self.word.upper()
        masks_from_word(self.word)

    @property
    def n(self) -> int:
        return len(self.word)

    def on(self, qubit: int) -> str:
        return self.word[self.n - 1 - qubit]

    def to_matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for letter in self.word:
            out = np.kron(out, _MATRIX[letter])
        return self.weight * out


@dataclass
class PauliDecomposition:
    n: int
    terms: List[PauliProduct] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for term in self.terms:
            if term.n != self.n:
                raise ValueError(f"word {term.word} has {term.n} qubits, expected {self.n}")
            if term.word in seen:
                raise ValueError(f"duplicate word {term.word}")
            seen.add(term.word)

    @classmethod
    def from_dict(cls, n: int, weights: Dict[str, complex], threshold: Optional[float] = PRUNE_THRESHOLD) -> "PauliDecomposition":
        terms = [
            PauliProduct(word, w)
            for word, w in sorted(weights.items(), key=lambda item: word_sort_key(item[0]))
            if threshold is None or abs(w) >= threshold
        ]
        return cls(n, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def words(self) -> List[str]:
        return [t.word for t in self.terms]

    def as_dict(self) -> Dict[str, complex]:
        return {t.word: t.weight for t in self.terms}

    def weight(self, word: str) -> complex:
        return self.as_dict().get(word.upper(), 0.0)

    def to_matrix(self) -> np.ndarray:
        total = np.zeros((2 ** self.n, 2 ** self.n), dtype=complex)
        for term in self.terms:
            total += term.to_matrix()
        return total

    def diagonal(self) -> np.ndarray:
        """Diagonal of an I/Z-only decomposition, without building the matrix."""
        k = np.arange(2 ** self.n)
        out = np.zeros(2 ** self.n, dtype=complex)
        for term in self.terms:
            x, z = masks_from_word(term.word)
            if x:
                raise ValueError(f"word {term.word} is not diagonal")
            out += term.weight * (1 - 2 * parity(k & z, self.n))
        return out

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["word", "weight"])
            for term in self.terms:
                w = complex(term.weight)
                writer.writerow([term.word, repr(w.real) if w.imag == 0 else str(w)])

    @classmethod
    def read_csv(cls, path: str) -> "PauliDecomposition":
        with open(path, "r", newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        if not rows:
            raise ValueError(f"{path} has no terms")
        terms = [PauliProduct(row["word"], complex(row["weight"].replace(" ", ""))) for row in rows]
        return cls(len(terms[0].word), terms)


def decompose_hermitian(operator) -> PauliDecomposition:
    """All 4^n trace weights tr(M P)/2^n, pruned below the threshold."""
    m = operator.entries if isinstance(operator, DenseOperator) else np.asarray(operator, dtype=complex)
    if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
        raise NonHermitianError("decompose_hermitian needs a Hermitian matrix")
    size = m.shape[0]
    n = int(round(np.log2(size)))
    if n > BRUTE_FORCE_MAX_QUBITS:
        raise ValueError(f"brute-force decomposition limited to {BRUTE_FORCE_MAX_QUBITS} qubits, got {n}")
    k = np.arange(size)
    walsh = scipy.linalg.hadamard(size)
    weights = {}
    for x in range(size):
        # tr(M P) = sum_k phase(k) M[k, k^x], phase from the Z part times i^{#Y}
        sums = walsh @ m[k, k ^ x] / size
        for z in range(size):
            w = sums[z] * 1j ** bin(x & z).count("1")
            weights[word_from_masks(x, z, n)] = float(np.real(w))
    return PauliDecomposition.from_dict(n, weights)


def _z_multiply(a: Dict[int, float], b: Dict[int, float]) -> Dict[int, float]:
    out: Dict[int, float] = {}
    for ma, wa in a.items():
        for mb, wb in b.items():
            out[ma ^ mb] = out.get(ma ^ mb, 0.0) + wa * wb
    return out


def decompose_diagonal_polynomial(coefficients: Sequence[float], n: int,
                                  threshold: Optional[float] = PRUNE_THRESHOLD) -> PauliDecomposition:
    """I/Z expansion of diag(p(m)), m = 0..2^n-1, p(m) = sum_j a_j m^j."""
    coefficients = list(coefficients)
    while len(coefficients) > 1 and coefficients[-1] == 0:
        coefficients.pop()
    degree = len(coefficients) - 1
    if degree > n:
        raise ValueError(f"polynomial degree {degree} exceeds qubit count {n}")
    size = 2 ** n
    index_op = {0: (size - 1) / 2.0}
    for k in range(n):
        index_op[1 << k] = -(2.0 ** (k - 1))
    total: Dict[int, float] = {}
    power = {0: 1.0}
    for j, a in enumerate(coefficients):
        if j > 0:
            power = _z_multiply(power, index_op)
        for mask, w in power.items():
            total[mask] = total.get(mask, 0.0) + a * w
    return PauliDecomposition.from_dict(n, {z_word(m, n): w for m, w in total.items()}, threshold)


def decompose_substituted_fourier(n: int, c: float) -> PauliDecomposition:
    """
    zeta I + s_i Z_i + d_ij Z_i Z_j for diag(substituted_spectrum).

    The single quadratic is decomposed first; the N/2 cyclic shift is the
    conjugation by X on the top qubit, which flips the sign of every word
    carrying Z there.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 qubits, got {n}")
    shifted = decompose_diagonal_polynomial(substituted_quadratic(n, c), n)
    terms = []
    for term in shifted:
        sign = -1.0 if term.on(n - 1) == "Z" else 1.0
        terms.append(PauliProduct(term.word, sign * float(np.real(term.weight))))
    return PauliDecomposition(n, terms)


def diagonal_weights(values, threshold: Optional[float] = None) -> PauliDecomposition:
    """h_p = 2^-n sum_i v_i (-1)^{i.p} for a diagonal given in the computational basis."""
    values = np.asarray(values, dtype=float)
    size = values.size
    n = int(round(np.log2(size)))
    h = scipy.linalg.hadamard(size) @ values / size
    return PauliDecomposition.from_dict(n, {z_word(p, n): float(h[p]) for p in range(size)}, threshold)


def inverse_weights(n: int, c: float) -> PauliDecomposition:
    """I/Z weight table of the inverse substituted operator in Fourier space."""
    if c <= 0:
        raise DivergentConditionError(f"A' is singular at c={c}")
    return diagonal_weights(1.0 / substituted_spectrum(n, c))


def apply_pauli_word(state, word: str):
    """Tensor action of a word in O(2^n); returns the same type it was given."""
    amps = state.amplitudes if isinstance(state, QuantumState) else np.asarray(state, dtype=complex)
    n = len(word)
    if amps.size != 2 ** n:
        raise ValueError(f"word {word} has {n} qubits, state has length {amps.size}")
    x, z = masks_from_word(word)
    k = np.arange(amps.size)
    phase = (1j ** bin(x & z).count("1")) * (1 - 2 * parity(k & z, n))
    out = np.empty_like(amps)
    out[k ^ x] = phase * amps
    return QuantumState(out, n) if isinstance(state, QuantumState) else out


def weight_distribution(decomposition: PauliDecomposition, skip_identity: bool = True) -> np.ndarray:
    """Absolute weights sorted in decreasing order."""
    weights = [abs(t.weight) for t in decomposition if not (skip_identity and z_count(t.word) == 0)]
    return np.sort(np.asarray(weights, dtype=float))[::-1]
