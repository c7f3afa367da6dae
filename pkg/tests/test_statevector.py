import numpy as np
import pytest

from heatvqe.modules.heat import fourier_matrix, to_fourier
from heatvqe.modules.statevector import (
    Backend,
    Circuit,
    Gate,
    QuantumState,
    apply_depolarizing,
    circuit_unitary,
    depolarize_distribution,
    expectation_diagonal,
    hadamard_test,
    qft_circuit,
    run_circuit,
    sample,
)


def _rotations(n: int) -> Circuit:
    circuit = Circuit(n)
    for q in range(n):
        circuit.add("RY", q, angle=0.3 + 0.7 * q)
        circuit.add("RZ", q, angle=1.1 - 0.2 * q)
    for q in range(n - 1):
        circuit.add("CNOT", q, q + 1)
    return circuit


class TestGates:
    def test_cnot_control_is_first_target(self):
        circuit = Circuit(2).add("X", 0).add("CNOT", 0, 1)
        out = run_circuit(QuantumState.zero(2), circuit)
        np.testing.assert_allclose(out.probabilities(), [0, 0, 0, 1], atol=1e-12)

    def test_qubit_zero_is_least_significant(self):
        out = run_circuit(QuantumState.zero(3), Circuit(3).add("X", 1))
        assert np.argmax(out.probabilities()) == 2

    @pytest.mark.parametrize("value, expected", [(0, 1), (1, 0)])
    def test_controlled_on_value(self, value, expected):
        circuit = Circuit(1).add("X", 0).controlled(1, value)
        assert circuit.n == 2
        out = run_circuit(QuantumState.zero(2), circuit)
        assert np.argmax(out.probabilities()) == expected

    def test_inverse_undoes_circuit(self):
        circuit = _rotations(3)
        circuit.add("CPHASE", 0, 2, angle=0.4)
        circuit.add("RZZ", 1, 2, angle=-0.8)
        total = circuit_unitary(circuit + circuit.inverse())
        np.testing.assert_allclose(total, np.eye(8), atol=1e-12)

    def test_json_keeps_unitary(self):
        circuit = _rotations(3)
        circuit.add("RZZ", 0, 2, angle=0.35)
        circuit.add("DIAGONAL", 0, 1, payload=np.exp(1j * np.array([0.1, 0.2, -0.4, 1.3])))
        circuit.add("UNITARY", 2, payload=np.array([[1, 1j], [1j, 1]]) / np.sqrt(2))
        circuit.append(Gate("RY", (1,), 0.9).with_control(2, 0))
        loaded = Circuit.from_json(circuit.to_json())
        assert loaded.n == 3
        assert [g.kind for g in loaded.gates] == [g.kind for g in circuit.gates]
        np.testing.assert_allclose(circuit_unitary(loaded), circuit_unitary(circuit), atol=1e-12)

    def test_rotation_needs_angle(self):
        with pytest.raises(ValueError):
            Gate("RY", (0,))

    def test_payload_shape_checked(self):
        with pytest.raises(ValueError):
            Gate("DIAGONAL", (0, 1), payload=np.ones(2))

    def test_repeated_wires_rejected(self):
        with pytest.raises(ValueError):
            Gate("CNOT", (1, 1))

    def test_out_of_range_qubit(self):
        with pytest.raises(ValueError):
            Circuit(2).add("H", 2)

    def test_bad_state_length(self):
        with pytest.raises(ValueError):
            QuantumState(np.ones(3))


class TestQFT:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_fourier_matrix(self, n):
        np.testing.assert_allclose(circuit_unitary(qft_circuit(n)), fourier_matrix(n), atol=1e-12)

    def test_gate_counts(self):
        circuit = qft_circuit(5)
        assert circuit.count("H") == 5
        assert circuit.count("CPHASE") == 10
        assert circuit.count("SWAP") == 2

    def test_offset_acts_on_upper_block(self, rng):
        vector = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        vector /= np.linalg.norm(vector)
        out = run_circuit(QuantumState(vector), qft_circuit(2, offset=2, width=4)).amplitudes
        expected = to_fourier(vector.reshape(4, 4)).reshape(-1)
        np.testing.assert_allclose(out, expected, atol=1e-12)


class TestHadamardTest:
    @pytest.mark.parametrize("part", ["re", "im"])
    def test_matches_inner_product(self, part, rng):
        n = 2
        prep = _rotations(n)
        v_op = Circuit(n).add("RX", 1, angle=0.7).add("CZ", 0, 1)
        w_op = Circuit(n).add("H", 0)
        eig = rng.uniform(-3, 1, 2 ** n)
        psi = run_circuit(QuantumState.zero(n), prep)
        u = run_circuit(psi, w_op).amplitudes
        v = run_circuit(psi, v_op).amplitudes
        z = np.vdot(u, eig * v)
        value = hadamard_test(prep, v_op, eig, part, anti_controlled_op=w_op)
        assert value == pytest.approx(z.real if part == "re" else z.imag, abs=1e-12)

    def test_initial_state_and_post(self, rng):
        n = 2
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        b /= np.linalg.norm(b)
        v_op = Circuit(n).add("Z", 1)
        post = qft_circuit(n)
        eig = np.array([1.0, -2.0, 0.5, 3.0])
        u = run_circuit(QuantumState(b), post).amplitudes
        v = run_circuit(QuantumState(b), v_op + post).amplitudes
        z = np.vdot(u, eig * v)
        re = hadamard_test(Circuit(n), v_op, eig, "re", initial=b, post=post)
        im = hadamard_test(Circuit(n), v_op, eig, "im", initial=b, post=post)
        assert complex(re, im) == pytest.approx(z, abs=1e-12)

    def test_full_depolarization_gives_zero(self):
        backend = Backend.exact(noise=1.0)
        value = hadamard_test(_rotations(2), Circuit(2).add("X", 0), np.array([1.0, 2.0, 3.0, 4.0]), "re", backend)
        assert value == pytest.approx(0.0, abs=1e-12)
        assert backend.runs == 1

    @pytest.mark.parametrize("p", [0.25, 0.6])
    def test_noise_scales_by_survival(self, p, rng):
        prep = _rotations(2)
        op = Circuit(2).add("RX", 0, angle=0.9).add("CZ", 0, 1)
        eig = rng.uniform(-3, 1, 4)
        for part in ("re", "im"):
            ideal = hadamard_test(prep, op, eig, part)
            noisy = hadamard_test(prep, op, eig, part, Backend.exact(noise=p))
            assert noisy == pytest.approx((1 - p) * ideal, abs=1e-12)

    def test_ancilla_is_reserved(self):
        with pytest.raises(ValueError):
            hadamard_test(Circuit(2), Circuit(3).add("X", 2), np.ones(4))

    def test_unknown_part(self):
        with pytest.raises(ValueError):
            hadamard_test(Circuit(1), Circuit(1), np.ones(2), "abs")


class TestBackend:
    def test_depolarize_endpoints(self):
        probs = np.array([0.7, 0.1, 0.15, 0.05])
        np.testing.assert_allclose(depolarize_distribution(probs, 0.0), probs)
        np.testing.assert_allclose(depolarize_distribution(probs, 1.0), np.full(4, 0.25))

    def test_depolarize_keeps_normalization(self):
        probs = np.array([0.5, 0.2, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0])
        assert depolarize_distribution(probs, 0.37).sum() == pytest.approx(1.0)

    def test_noise_skips_plain_measurements(self):
        state = run_circuit(QuantumState.zero(2), _rotations(2))
        eig = np.array([1.0, -1.0, 2.0, 0.5])
        noisy = Backend.exact(noise=0.8)
        assert noisy.measure_diagonal(state, eig) == pytest.approx(expectation_diagonal(state, eig))

    def test_shots_are_seeded(self):
        state = run_circuit(QuantumState.zero(3), _rotations(3))
        eig = np.arange(8, dtype=float)
        a = Backend.sampled(500, seed=7).measure_diagonal(state, eig)
        b = Backend.sampled(500, seed=7).measure_diagonal(state, eig)
        assert a == b

    def test_shots_converge_to_exact(self):
        state = run_circuit(QuantumState.zero(3), _rotations(3))
        eig = np.arange(8, dtype=float)
        estimate = Backend.sampled(200000, seed=1).measure_diagonal(state, eig)
        assert estimate == pytest.approx(expectation_diagonal(state, eig), abs=0.05)

    @pytest.mark.parametrize("kwargs", [{"mode": "fast"}, {"mode": "shots", "shots": 0}, {"noise": 1.5}])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ValueError):
            Backend(**kwargs)


class TestSampling:
    def test_basis_state_is_deterministic(self):
        counts = sample(QuantumState.basis(3, 5), 1000, seed=2)
        assert counts[5] == 1000
        assert counts.sum() == 1000

    def test_uniform_counts_within_five_sigma(self):
        state = run_circuit(QuantumState.zero(3), Circuit(3).add("H", 0).add("H", 1).add("H", 2))
        shots = 80000
        counts = sample(state, shots, seed=11)
        sigma = np.sqrt(shots * (1 / 8) * (7 / 8))
        assert np.all(np.abs(counts - shots / 8) < 5 * sigma)

    def test_same_seed_same_counts(self):
        state = run_circuit(QuantumState.zero(3), _rotations(3))
        np.testing.assert_array_equal(sample(state, 300, seed=5), sample(state, 300, seed=5))

    def test_needs_shots(self):
        with pytest.raises(ValueError):
            sample(QuantumState.zero(1), 0)

    def test_depolarized_z(self):
        assert apply_depolarizing(np.array([1.0, 0.0]), np.array([1.0, -1.0]), 0.5) == pytest.approx(0.5)

    def test_depolarize_named_bits_only(self):
        probs = np.array([1.0, 0.0, 0.0, 0.0])
        z_low = np.array([1.0, -1.0, 1.0, -1.0])
        z_high = np.array([1.0, 1.0, -1.0, -1.0])
        assert apply_depolarizing(probs, z_low, 0.5, qubits=(1,)) == pytest.approx(1.0)
        assert apply_depolarizing(probs, z_high, 0.5, qubits=(1,)) == pytest.approx(0.5)
