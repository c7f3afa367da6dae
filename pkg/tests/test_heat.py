import numpy as np
import pytest

from heatvqe.config import CAP_ENV_VAR
from heatvqe.errors import (
    CapExceededError,
    DivergentConditionError,
    EvolutionError,
    NonHermitianError,
    SingularSystemError,
)
from heatvqe.modules.heat import (
    DenseOperator,
    FourierSystem,
    GridParams,
    HeatProblem,
    Trajectory,
    build_matrix,
    build_multidim_matrix,
    build_rhs,
    build_substituted_matrix,
    classical_solve,
    condition_number,
    error_accumulation,
    error_recursion,
    fidelity,
    fourier_matrix,
    mode_decay,
    multidim_spectrum,
    spectral_solve,
    spectrum,
    substituted_spectrum,
    substituted_spectrum_by_shift,
    time_step_evolve,
)
from heatvqe.modules.solvers import get_solver_class


class TestOperators:
    def test_matrix_is_periodic_circulant(self):
        a = build_matrix(2, 1.0).entries.real
        np.testing.assert_allclose(a[0], [-3.0, 1.0, 0.0, 1.0])
        np.testing.assert_allclose(a, a.T)

    @pytest.mark.parametrize("n, c", [(2, 0.1), (3, 1.0), (4, 2.0)])
    def test_fourier_basis_diagonalizes(self, n, c):
        f = fourier_matrix(n)
        diag = f @ build_matrix(n, c).entries @ f.conj().T
        np.testing.assert_allclose(diag, np.diag(spectrum(n, c)), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_substitution_by_shift_matches_closed_form(self, n):
        np.testing.assert_allclose(substituted_spectrum_by_shift(n, 0.7), substituted_spectrum(n, 0.7), atol=1e-12)

    def test_substituted_spectrum_below_exact(self):
        exact, approx = spectrum(6, 0.5), substituted_spectrum(6, 0.5)
        assert approx[0] == pytest.approx(exact[0]) == pytest.approx(-0.5)
        assert np.all(approx <= exact + 1e-12)
        assert approx[32] == pytest.approx(-0.5 - np.pi ** 2)

    def test_substituted_matrix_is_hermitian(self):
        a = build_substituted_matrix(3, 1.0).entries
        np.testing.assert_allclose(a, a.conj().T, atol=1e-12)
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(a)), np.sort(substituted_spectrum(3, 1.0)), atol=1e-10)

    def test_condition_number(self):
        assert condition_number(1.0) == pytest.approx(5.0)
        with pytest.raises(DivergentConditionError):
            condition_number(0.0)

    def test_negative_c_rejected(self):
        with pytest.raises(ValueError):
            build_matrix(3, -0.1)

    def test_hermitian_flag_checked(self):
        with pytest.raises(NonHermitianError):
            DenseOperator(np.array([[0, 1], [0, 0]]), hermitian=True)

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv(CAP_ENV_VAR, "3")
        with pytest.raises(CapExceededError):
            build_matrix(4, 1.0)

    def test_multidim_spectrum(self):
        m = build_multidim_matrix(2, 0.5, 2).entries.real
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(m)), np.sort(multidim_spectrum(2, 0.5, 2)), atol=1e-10)


class TestSolves:
    def test_classical_solve_residual(self, rng):
        b = rng.standard_normal(8)
        a = build_matrix(3, 0.5)
        x = classical_solve(a, b)
        np.testing.assert_allclose(a @ x, b, atol=1e-10)
        assert np.isrealobj(x)

    def test_singular_system_zero_mean(self, rng):
        b = rng.standard_normal(8)
        b -= b.mean()
        x = classical_solve(build_matrix(3, 0.0), b)
        assert x.mean() == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(build_matrix(3, 0.0) @ x, b, atol=1e-10)

    def test_singular_system_outside_range(self):
        with pytest.raises(SingularSystemError):
            classical_solve(build_matrix(3, 0.0), np.ones(8))

    def test_spectral_solve_matches_lu(self, rng):
        b = rng.standard_normal(16)
        np.testing.assert_allclose(spectral_solve(spectrum(4, 0.5), b), classical_solve(build_matrix(4, 0.5), b), atol=1e-10)

    def test_fidelity(self, rng):
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert fidelity(x, 2j * x) == pytest.approx(1.0)
        assert fidelity([1, 0], [0, 1]) == 0.0
        with pytest.raises(ValueError):
            fidelity([0, 0], [1, 0])


class TestFourierSystem:
    def test_normalizes_rhs(self):
        system = FourierSystem.heat(2, 1.0, [3.0, 0.0, 4.0, 0.0])
        assert system.b_norm == pytest.approx(5.0)
        assert np.linalg.norm(system.b) == pytest.approx(1.0)

    @pytest.mark.parametrize("d_r", [1, 2])
    def test_apply_matches_matrix(self, d_r, rng):
        system = FourierSystem.heat(2, 0.8, rng.standard_normal(4 ** d_r), d_r=d_r)
        x = rng.standard_normal(4 ** d_r) + 1j * rng.standard_normal(4 ** d_r)
        np.testing.assert_allclose(system.apply(x), system.matrix() @ x, atol=1e-10)

    def test_solve(self, system3):
        np.testing.assert_allclose(system3.apply(system3.solve()), system3.b, atol=1e-10)

    def test_transform_round_trip(self, system3):
        np.testing.assert_allclose(system3.from_fourier(system3.fourier_b()), system3.b, atol=1e-12)

    def test_zero_rhs_rejected(self):
        with pytest.raises(ValueError):
            FourierSystem.heat(2, 1.0, np.zeros(4))


class TestTimeStepping:
    def test_grid_from_steps(self):
        grid = GridParams.from_steps(3, dz=0.5, dt=0.125)
        assert grid.c == pytest.approx(2.0)

    def test_grid_inconsistent(self):
        with pytest.raises(ValueError):
            GridParams(n=2, c=1.0, dz=1.0, dt=2.0)

    def test_problem_validation(self):
        with pytest.raises(ValueError):
            HeatProblem(GridParams.from_c(2, 1.0), np.ones(3))
        with pytest.raises(ValueError):
            HeatProblem(GridParams.from_c(2, 1.0), np.ones(4), boundary="dirichlet")

    def test_problem_json(self, tmp_path):
        problem = HeatProblem(GridParams.from_c(2, 0.5, 3), [1.0, 2.0, 3.0, 4.0])
        path = tmp_path / "problem.json"
        problem.save(str(path))
        loaded = HeatProblem.load(str(path))
        assert loaded.grid.n_tau == 3
        np.testing.assert_allclose(loaded.chi, problem.chi)
        assert loaded.f.shape == (3, 4)

    def test_rhs_sign(self):
        grid = GridParams.from_c(2, 2.0)
        np.testing.assert_allclose(build_rhs(np.ones(4), np.zeros(4), grid), -2.0 * np.ones(4))

    def test_mode_decay_matches_one_step(self):
        n, c, k = 3, 0.5, 2
        grid = GridParams.from_c(n, c)
        j = np.arange(8)
        u0 = np.cos(2 * np.pi * k * j / 8)
        u1 = classical_solve(build_matrix(n, c), build_rhs(u0, np.zeros(8), grid))
        np.testing.assert_allclose(u1, mode_decay(n, c)[k] * u0, atol=1e-12)

    def test_oracle_evolution_conserves_mean(self):
        j = np.arange(8)
        problem = HeatProblem(GridParams.from_c(3, 1.0, 4), 1.0 + np.cos(2 * np.pi * j / 8))
        traj = time_step_evolve(problem, get_solver_class("oracle"))
        assert len(traj.states) == 5
        assert len(traj.infidelity) == 4
        assert max(traj.infidelity) < 1e-14
        for state in traj.states:
            assert state.mean() == pytest.approx(1.0)
        assert np.ptp(traj.states[-1]) < np.ptp(traj.states[0])

    def test_failing_solver(self):
        class Broken:
            SOLVER_NAME = "broken"

            @classmethod
            def solve(cls, n, c, b, options=None, logger=None):
                raise RuntimeError("no convergence")

        problem = HeatProblem(GridParams.from_c(2, 1.0, 2), np.ones(4))
        with pytest.raises(EvolutionError) as info:
            time_step_evolve(problem, Broken)
        assert info.value.step == 1
        assert info.value.solver == "broken"

    def test_growth_ratios(self):
        traj = Trajectory("x", 1.0, infidelity=[1e-3, 2e-3, 1e-15, 1e-3])
        assert traj.growth_ratios() == [pytest.approx(2.0), pytest.approx(5e-13), None]
        assert traj.bound == 6.0
        assert traj.bound_holds()


class TestErrorModel:
    @pytest.mark.parametrize("c", [0.1, 0.5, 2.0])
    def test_closed_form_matches_recursion(self, c):
        history = error_recursion(1e-4, c, 6)
        for n_tau, value in enumerate(history, start=1):
            assert error_accumulation(1e-4, c, n_tau) == pytest.approx(value, rel=1e-10)

    def test_single_step(self):
        assert error_accumulation(1e-3, 1.0, 1) == pytest.approx(1e-3)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            error_accumulation(0.0, 1.0, 2)
        with pytest.raises(DivergentConditionError):
            error_accumulation(1e-3, 0.0, 2)
