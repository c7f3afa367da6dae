import numpy as np
import pytest

from heatvqe.config import make_rng
from heatvqe.modules.ansatz import AnsatzSpec
from heatvqe.modules.direct_vqe import (
    ThetaPoint,
    build_hamiltonian,
    demo_problem,
    demo_state,
    energy,
    minimize,
    minimize_dense,
    refine_minima,
    scan_landscape,
    theta3,
)
from heatvqe.modules.heat import build_matrix, classical_solve
from heatvqe.modules.statevector import Backend


class TestHamiltonian:
    def test_solution_has_zero_energy(self, rng):
        a = build_matrix(3, 1.0)
        b = rng.standard_normal(8)
        b /= np.linalg.norm(b)
        ham = build_hamiltonian(a, b)
        x = classical_solve(a, b)
        assert ham.expectation(x / np.linalg.norm(x)) == pytest.approx(0.0, abs=1e-12)
        assert np.linalg.eigvalsh(ham.dense).min() > -1e-10

    def test_terms_reproduce_dense(self, rng):
        a, b = demo_problem(rng)
        ham = build_hamiltonian(a, b)
        np.testing.assert_allclose(ham.terms.to_matrix(), ham.dense, atol=1e-10)

    def test_rhs_must_be_normalized(self):
        with pytest.raises(ValueError):
            build_hamiltonian(build_matrix(2, 1.0), np.ones(4))


class TestDemonstration:
    @pytest.mark.parametrize("t1, t2", [(0.3, 1.2), (2.0, -0.7), (4.5, 5.9)])
    def test_state_is_zero_sum(self, t1, t2):
        state = demo_state(ThetaPoint.constrained(t1, t2))
        assert abs(state.amplitudes.sum()) < 1e-12

    def test_theta3_degenerate_point(self):
        # cos(minus) + sin(minus) = 0 at minus = -pi/4
        assert theta3(0.0, np.pi / 2) == pytest.approx(-np.pi)
        assert ThetaPoint.constrained(0.0, np.pi / 2).degenerate

    def test_measured_energy_matches_dense(self, rng):
        a, b = demo_problem(rng)
        ham = build_hamiltonian(a, b)
        point = ThetaPoint.constrained(0.4, 2.2)
        assert energy(point, ham) == pytest.approx(ham.expectation(demo_state(point).amplitudes), abs=1e-12)

    def test_energy_needs_two_qubits(self, rng):
        b = rng.standard_normal(8)
        ham = build_hamiltonian(build_matrix(3, 0.0), b / np.linalg.norm(b))
        with pytest.raises(ValueError):
            energy(ThetaPoint.constrained(0.1, 0.2), ham)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_minimize_converges(self, seed):
        rng = make_rng(seed)
        a, b = demo_problem(rng)
        result = minimize(build_hamiltonian(a, b), rng=rng)
        assert result.converged
        assert result.energy < 1e-6
        assert result.fidelity >= 0.999
        assert result.evaluations == len(result.trace)

    def test_minimize_with_shots(self):
        rng = make_rng(5)
        a, b = demo_problem(rng)
        result = minimize(build_hamiltonian(a, b), backend=Backend.sampled(4000, seed=5), rng=rng, budget=300)
        assert result.evaluations <= 300 + 10

    def test_landscape_scan(self, rng):
        a, b = demo_problem(rng)
        ham = build_hamiltonian(a, b)
        scan = scan_landscape(ham, grid=30, workers=2)
        assert scan.energies.shape == (30, 30)
        assert scan.energies.min() > -1e-10
        # (theta1, theta2) -> (-theta1, theta2 + pi) maps the 30-point grid onto itself
        mirrored = scan.energies[(-np.arange(30)) % 30][:, (np.arange(30) + 15) % 30]
        np.testing.assert_allclose(mirrored, scan.energies, atol=1e-8)

        minima = refine_minima(scan, ham)
        assert len(minima) >= 2
        assert len(minima) % 2 == 0
        found = np.array([p.free() for p in minima])
        for point in minima:
            assert energy(point, ham) < 1e-3
            image = np.mod([-point.theta1, point.theta2 + np.pi], 2 * np.pi)
            gaps = np.abs((found - image + np.pi) % (2 * np.pi) - np.pi).max(axis=1)
            assert gaps.min() < 1e-2

    @pytest.mark.parametrize("theta1, theta2", [(0.3, 1.1), (2.0, -0.7), (np.pi / 2, 0.0)])
    def test_mirror_keeps_energy(self, theta1, theta2, rng):
        a, b = demo_problem(rng)
        ham = build_hamiltonian(a, b)
        here = energy(ThetaPoint.constrained(theta1, theta2), ham)
        there = energy(ThetaPoint.constrained(2 * np.pi - theta1, theta2 + np.pi), ham)
        assert there == pytest.approx(here, abs=1e-8)
        assert abs(demo_state(ThetaPoint.constrained(theta1, theta2)).amplitudes.sum()) < 1e-10


class TestDenseVQE:
    def test_never_worse_than_start(self, rng):
        a = build_matrix(2, 1.0)
        b = rng.standard_normal(4)
        spec = AnsatzSpec("cba", 2, 1)
        start = build_hamiltonian(a, b / np.linalg.norm(b), with_terms=False).expectation(b / np.linalg.norm(b))
        result = minimize_dense(a, b, spec, rng=rng, budget=400)
        assert result.energy <= start + 1e-12
        assert result.evaluations <= 400 + 10
