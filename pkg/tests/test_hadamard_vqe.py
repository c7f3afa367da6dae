import numpy as np
import pytest

from heatvqe.config import make_rng, random_b
from heatvqe.modules.ansatz import AnsatzSpec, ansatz_circuit
from heatvqe.modules.hadamard_vqe import _options, dense_loss, layers_to_fidelity, loss, minimize
from heatvqe.modules.heat import FourierSystem, fidelity
from heatvqe.modules.statevector import Backend, QuantumState, run_circuit


@pytest.fixture
def original3(rng):
    return FourierSystem.heat(3, 2.0, random_b(3, rng), substituted=False)


class TestLoss:
    def test_three_runs(self, original3):
        backend = Backend.exact()
        loss(AnsatzSpec("cba", 3, 1), original3, backend)
        assert backend.runs == 3

    @pytest.mark.parametrize("kind", ["hea", "cba", "daa"])
    def test_matches_dense_loss(self, kind, original3, rng):
        spec = AnsatzSpec(kind, 3, 2)
        spec = spec.with_theta(rng.uniform(-np.pi, np.pi, spec.size))
        assert loss(spec, original3).total == pytest.approx(dense_loss(spec, original3), abs=1e-10)

    def test_overlap_is_x_a_b(self, original3, rng):
        spec = AnsatzSpec("hea", 3, 1)
        spec = spec.with_theta(rng.uniform(-np.pi, np.pi, spec.size))
        x = run_circuit(QuantumState(original3.b), ansatz_circuit(spec)).amplitudes
        expected = np.vdot(x, original3.apply(original3.b))
        assert loss(spec, original3).overlap == pytest.approx(expected, abs=1e-10)

    def test_qubit_mismatch(self, original3):
        with pytest.raises(ValueError):
            loss(AnsatzSpec("cba", 2, 1), original3)

    def test_depolarized_overlap_vanishes(self, original3):
        breakdown = loss(AnsatzSpec("cba", 3, 1), original3, Backend.exact(noise=1.0))
        assert breakdown.re == pytest.approx(0.0, abs=1e-12)
        assert breakdown.im == pytest.approx(0.0, abs=1e-12)


class TestMinimize:
    def test_zero_layers_scales_rhs(self, original3):
        result = minimize(AnsatzSpec("cba", 3, 0), original3)
        assert result.evaluations == 1
        assert result.fidelity == pytest.approx(fidelity(original3.b, original3.solve()))
        ab = original3.apply(original3.b)
        scale = np.vdot(ab, original3.b) / np.vdot(ab, ab)
        np.testing.assert_allclose(result.x, scale * original3.b, atol=1e-10)

    def test_never_worse_than_start(self, original3, rng):
        spec = AnsatzSpec("hea", 3, 1)
        start = loss(spec, original3).total
        result = minimize(spec, original3, rng=rng, restarts=1, budget=200)
        assert result.loss <= start + 1e-12
        assert result.evaluations == len(result.trace)

    @pytest.mark.parametrize("method", ["Nelder-Mead", "Powell", "L-BFGS-B", "COBYLA"])
    def test_optimizer_options(self, method):
        options = _options(method, np.zeros(3), 50, 1e-9)
        budget_key = {"Nelder-Mead": "maxfev", "Powell": "maxfev", "L-BFGS-B": "maxfun"}.get(method, "maxiter")
        assert options[budget_key] == 50

    @pytest.mark.slow
    def test_two_layers_solve_two_qubits(self):
        rng = make_rng(11)
        system = FourierSystem.heat(2, 2.0, random_b(2, rng), substituted=False)
        result = minimize(AnsatzSpec("cba", 2, 2), system, rng=rng)
        assert result.fidelity >= 0.99


class TestLayerScaling:
    def test_qubit_range(self):
        with pytest.raises(ValueError):
            layers_to_fidelity("cba", 9, 1.0, samples=1, layer_cap=0)

    def test_censored_at_cap(self):
        result = layers_to_fidelity("cba", 2, 2.0, target=0.999999, samples=2, layer_cap=0, rng=make_rng(3))
        assert result.censored
        assert result.m_star == 0
        assert len(result.fidelity_by_layer) == 1
        assert result.sample_layers == [None, None]
        assert result.layer_spread is None

    @pytest.mark.slow
    def test_reaches_target(self):
        result = layers_to_fidelity("cba", 2, 2.0, target=0.99, samples=2, layer_cap=4, rng=make_rng(4))
        assert not result.censored
        assert result.mean_fidelity >= 0.99
        assert result.fidelity_by_layer[-1] == result.mean_fidelity
