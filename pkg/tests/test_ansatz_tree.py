import numpy as np
import pytest

from heatvqe.config import make_rng, random_b
from heatvqe.errors import DivergentConditionError, TreeExhaustedError
from heatvqe.modules.ansatz_tree import (
    AnsatzTree,
    UnitaryMenu,
    collapsed_fidelity,
    multidim_menu,
    node_state,
    original_system,
    prepare_solution_circuit,
    run,
    run_with_noise,
    solution_norm,
)
from heatvqe.modules.heat import FourierSystem, fidelity, multidim_spectrum, substituted_spectrum
from heatvqe.modules.pauli import inverse_weights, word_sort_key, z_count
from heatvqe.modules.statevector import Backend, run_circuit


class TestMenu:
    def test_words_carry_at_most_two_z(self):
        menu = UnitaryMenu.for_system(FourierSystem.heat(4, 1.0, np.ones(16)))
        assert menu.words[0] == "IIII"
        assert all(z_count(w) <= 2 for w in menu.words)
        np.testing.assert_allclose(menu.decomposition().diagonal(), substituted_spectrum(4, 1.0), atol=1e-9)

    def test_multidimensional_menu(self):
        menu = multidim_menu(2, 0.5, 2)
        np.testing.assert_allclose(
            menu.decomposition().diagonal(), multidim_spectrum(2, 0.5, 2, substituted=True), atol=1e-9
        )

    def test_repeated_generators_rejected(self):
        with pytest.raises(ValueError):
            UnitaryMenu(2, [1, 1], [0.5, 0.5])


class TestTree:
    def test_root_weight(self, system3):
        tree = AnsatzTree(system3)
        b_f = system3.fourier_b()
        lam = system3.eigenvalues
        expected = np.sum(np.abs(b_f) ** 2 * lam) / np.sum(np.abs(b_f) ** 2 * lam ** 2)
        assert tree.alpha[0] == pytest.approx(expected, abs=1e-12)
        assert tree.ledger.diagonal_runs == 2
        assert tree.backend.runs == 2

    def test_node_states(self, system3):
        tree = AnsatzTree(system3)
        tree.expand_step()
        tree.expand_step()
        for node in tree.nodes:
            state = node_state(node, system3).amplitudes
            expected = system3.from_fourier((1.0 - 2.0 * _parity(node.mask)) * system3.fourier_b())
            np.testing.assert_allclose(state, expected, atol=1e-10)

    def test_cached_loss_matches_residual(self, system3):
        tree = AnsatzTree(system3)
        for _ in range(4):
            tree.expand_step()
            assert tree.loss() == pytest.approx(tree.dense_loss(), abs=1e-10)

    def test_loss_never_increases(self, system3):
        tree = AnsatzTree(system3)
        for _ in range(5):
            tree.expand_step()
        assert np.all(np.diff(tree.loss_trace) <= 1e-12)

    def test_run_count_matches_ledger(self, system3):
        tree = AnsatzTree(system3)
        for _ in range(3):
            tree.expand_step()
        ledger = tree.ledger
        assert ledger.gram_batches == 1 + 2 + 3
        assert ledger.rhs_batches == 3
        assert ledger.diagonal_runs == 2 + 3
        assert tree.backend.runs == ledger.diagonal_runs + 2 * ledger.hadamard_batches

    def test_first_children_come_from_root(self, system3):
        tree = AnsatzTree(system3)
        node = tree.expand_step()
        assert node.parent == 0
        assert node.mask in tree.menu.masks

    def test_gradient_matches_dense(self, system3):
        tree = AnsatzTree(system3)
        tree.expand_step()
        tree.expand_step()
        b_f = tree._prepared.amplitudes
        lam = system3.eigenvalues
        x_f = tree.fourier_solution()
        for mask, _, _ in tree.candidates():
            c_f = (1.0 - 2.0 * _parity(mask)) * b_f
            dense = 2 * np.vdot(c_f, lam ** 2 * x_f) - 2 * np.vdot(c_f, lam * b_f)
            assert tree.gradient_overlap(mask) == pytest.approx(dense, abs=1e-9)

    def test_tie_goes_to_largest_inverse_weight(self):
        # b_f lives on Fourier modes 0 and 2, so masks 2 and 3 tie in |g| and in |h_p|
        u, v = 0.6 / np.sqrt(2), 0.8 / np.sqrt(2)
        system = FourierSystem.heat(2, 1.0, np.array([u, v, u, v]))
        tree = AnsatzTree(system)
        scores = {mask: abs(tree.gradient_overlap(mask)) for mask, _, _ in tree.candidates()}
        assert scores[2] == pytest.approx(scores[3], rel=1e-10)
        assert scores[1] == pytest.approx(0.0, abs=1e-10)

        weights = {t.word: abs(t.weight) for t in inverse_weights(2, 1.0) if z_count(t.word) > 0}
        top = max(weights.values())
        leaders = sorted((w for w in weights if weights[w] > top - 1e-12), key=word_sort_key)
        assert len(leaders) == 2
        assert tree.menu.words[1] == leaders[0]
        assert tree.expand_step().word == leaders[0]

    def test_duplicate_node_rejected(self, system3):
        tree = AnsatzTree(system3)
        with pytest.raises(ValueError):
            tree.gram_extend(0)

    def test_exhaustion(self):
        system = FourierSystem.heat(2, 1.0, random_b(2, make_rng(9)))
        tree = AnsatzTree(system)
        for _ in range(3):
            tree.expand_step()
        assert sorted(tree.masks) == [0, 1, 2, 3]
        with pytest.raises(TreeExhaustedError):
            tree.expand_step()


def _parity(mask: int, size: int = 8) -> np.ndarray:
    k = np.arange(size) & mask
    return np.array([bin(v).count("1") % 2 for v in k], dtype=float)


class TestRun:
    def test_reaches_target(self, system3):
        result = run(system3, target=0.99)
        assert not result.censored
        assert result.fidelity >= 0.99
        assert result.fidelity_trace[-1] == result.fidelity
        assert result.runs > 0
        assert result.words[0] == "III"

    def test_full_tree_is_exact(self, system3):
        result = run(system3, target=2.0, max_depth=8)
        assert result.depth == 8
        assert not result.min_norm
        np.testing.assert_allclose(result.x, system3.solve(), atol=1e-8)

    def test_fidelity_against_original_operator(self, system3):
        result = run(system3, target=0.99)
        expected = fidelity(result.x, original_system(system3).solve())
        assert result.fidelity_original == pytest.approx(expected)

    def test_depth_cap_censors(self, system3):
        result = run(system3, target=0.999999, max_depth=1)
        assert result.depth == 1
        assert result.censored

    def test_exhausted_tree_stops(self):
        system = FourierSystem.heat(2, 1.0, random_b(2, make_rng(9)))
        result = run(system, target=2.0, max_depth=10)
        assert result.depth == 4
        assert result.censored

    def test_two_dimensional_grid(self, rng):
        system = FourierSystem.heat(2, 1.0, random_b(4, rng), d_r=2)
        result = run(system, target=0.99)
        assert not result.censored
        assert result.fidelity >= 0.99
        assert fidelity(result.x, system.solve()) == pytest.approx(result.fidelity)

    def test_zero_c_diverges(self):
        with pytest.raises(DivergentConditionError):
            run(FourierSystem.heat(2, 0.0, np.ones(4)))

    def test_shot_mode_runs(self, system3):
        result = run(system3, target=0.9, max_depth=4, backend=Backend.sampled(2000, seed=3))
        assert 1 <= result.depth <= 4

    def test_record(self, system3):
        record = run(system3, target=0.99).to_record(seed=4, experiment="fig10")
        assert record.metric == "depth"
        assert record.extra["measurements"] > 0
        assert record.as_row(["n", "c", "depth", "seed"]) == {"n": 3, "c": 1.0, "depth": record.extra["depth"], "seed": 4}


class TestNoise:
    def test_full_noise_collapses_to_root(self, system3):
        result = run_with_noise(system3, 1.0)
        np.testing.assert_allclose(result.alpha[1:], 0.0, atol=1e-12)
        assert result.fidelity == pytest.approx(collapsed_fidelity(system3))

    def test_invalid_probability(self, system3):
        with pytest.raises(ValueError):
            run_with_noise(system3, 1.5)

    def test_mean_fidelity_falls_with_noise(self):
        rng = make_rng(21)
        systems = [FourierSystem.heat(2, rng.uniform(0.1, 2.0), random_b(2, rng)) for _ in range(30)]
        levels = [0.0, 0.25, 0.5, 0.75, 1.0]
        means = [np.mean([run_with_noise(s, p).fidelity for s in systems]) for p in levels]
        assert means[0] == pytest.approx(1.0)
        assert np.all(np.diff(means) <= 1e-12)
        assert means[-1] == pytest.approx(np.mean([collapsed_fidelity(s) for s in systems]))


class TestSolutionCircuit:
    def test_post_selected_state(self, system3):
        tree = AnsatzTree(system3)
        for _ in range(2):
            tree.expand_step()
        x = tree.dense_solution()
        prepared = prepare_solution_circuit(tree.alpha, tree.nodes, system3)
        assert prepared.aux_qubits == 2
        np.testing.assert_allclose(prepared.state, x / np.linalg.norm(x), atol=1e-10)
        expected = np.linalg.norm(x) ** 2 / (np.linalg.norm(tree.alpha) ** 2 * 4)
        assert prepared.success_probability == pytest.approx(expected)

    def test_circuit_reproduces_state(self, system3):
        tree = AnsatzTree(system3)
        tree.expand_step()
        prepared = prepare_solution_circuit(tree.alpha, tree.nodes, system3)
        final = run_circuit(prepared.initial_state(system3.b), prepared.circuit).amplitudes
        block = 2 ** system3.qubits
        np.testing.assert_allclose(final[:block] / np.sqrt(prepared.success_probability), prepared.state, atol=1e-10)
        assert prepared.circuit.count("UNITARY") == 1
        assert prepared.circuit.count("DIAGONAL") == 1

    def test_solution_norm(self, system3):
        tree = AnsatzTree(system3)
        for _ in range(3):
            tree.expand_step()
        norm = solution_norm(tree.alpha, tree.nodes, system3, ledger=tree.ledger)
        assert norm == pytest.approx(np.linalg.norm(tree.dense_solution()))
        assert tree.ledger.overlap_batches == 6

    def test_single_node(self, system3):
        tree = AnsatzTree(system3)
        prepared = prepare_solution_circuit(tree.alpha, tree.nodes, system3)
        assert prepared.aux_qubits == 0
        np.testing.assert_allclose(prepared.state, system3.b * np.sign(tree.alpha[0].real), atol=1e-10)

    def test_rejects_empty(self, system3):
        with pytest.raises(ValueError):
            prepare_solution_circuit([], [], system3)
