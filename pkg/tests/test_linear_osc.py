import math

import numpy as np
import pytest

from oracles import damped_mode_cov
from qsync.errors import ArgumentError, ConfigError, UnstableNetworkError
from qsync.linear_osc import (
    BathTopology,
    NetworkSpec,
    TongueScenario,
    build_evolution,
    evolve_covariance,
    normal_modes,
    tongue_cell,
    tongue_diagram,
)
from qsync.statecore import (
    GaussianState,
    SpectralDensity,
    symplectic_eigenvalues,
    symplectic_form,
)

DENSITY = SpectralDensity(alpha=0.01, cutoff=20.0)


def pair_net(omega2=1.0, lam=0.2):
    return NetworkSpec.pair(1.0, omega2, lam)


class TestNormalModes:
    def test_common_bath_dark_mode(self):
        report = normal_modes(pair_net(), BathTopology.common(2, DENSITY))
        assert report.damping_rates[0] == pytest.approx(0.0, abs=1e-14)
        # least damped mode is the antisymmetric combination
        v = report.vectors[:, 0]
        assert abs(v @ np.array([1.0, 1.0])) < 1e-10

    def test_separate_equal_baths_equal_rates(self):
        report = normal_modes(pair_net(), BathTopology.separate(2, DENSITY))
        g1, g2 = report.damping_rates
        # Ohmic J/W is flat up to the exponential cutoff
        assert g1 == pytest.approx(g2, rel=0.02)
        assert g1 > 0

    def test_mode_frequencies_bilinear(self):
        report = normal_modes(pair_net(lam=0.2), BathTopology.common(2, DENSITY))
        assert np.sort(report.frequencies) == pytest.approx(
            [math.sqrt(0.8), math.sqrt(1.2)], abs=1e-12
        )

    def test_rate_normalization_documented_form(self):
        # Gamma = pi J(W)/W for a unit-overlap single oscillator
        net = NetworkSpec(np.array([1.3]), np.zeros((1, 1)))
        report = normal_modes(net, BathTopology.separate(1, DENSITY))
        ref = math.pi * DENSITY.j(1.3) / 1.3
        assert report.damping_rates[0] == pytest.approx(ref, rel=1e-12)

    def test_unstable_network_rejected(self):
        with pytest.raises(UnstableNetworkError):
            normal_modes(pair_net(lam=1.5), BathTopology.common(2, DENSITY))

    def test_orthonormal_vectors(self):
        report = normal_modes(pair_net(omega2=1.2, lam=0.1), BathTopology.common(2, DENSITY))
        assert report.vectors.T @ report.vectors == pytest.approx(np.eye(2), abs=1e-12)

    def test_spring_form_potential(self):
        net = NetworkSpec.pair(1.0, 1.0, 0.1, coupling_form="spring")
        v = net.potential_matrix()
        assert v == pytest.approx(np.array([[1.2, -0.2], [-0.2, 1.2]]))


class TestBuildEvolution:
    def test_single_damped_oscillator_generator(self):
        # textbook rotating-wave damped mode: A = [[-G/2, w], [-w, -G/2]], D = G/2 I
        net = NetworkSpec(np.array([1.0]), np.zeros((1, 1)))
        baths = BathTopology.separate(1, DENSITY)
        a, d = build_evolution(net, baths)
        gamma = math.pi * DENSITY.j(1.0) / 1.0
        ref = np.array([[-gamma / 2, 1.0], [-1.0, -gamma / 2]])
        assert a == pytest.approx(ref, abs=1e-12)
        assert d == pytest.approx(gamma / 2 * np.eye(2), abs=1e-14)

    def test_zero_coupling_is_symplectic(self):
        net = NetworkSpec(np.array([1.0, 1.3]), np.zeros((2, 2)))
        baths = BathTopology(np.zeros((1, 2)), (DENSITY,), (0.0,))
        a, d = build_evolution(net, baths)
        omega = symplectic_form(2)
        assert a.T @ omega + omega @ a == pytest.approx(np.zeros((4, 4)), abs=1e-12)
        assert d == pytest.approx(np.zeros((4, 4)), abs=1e-14)

    def test_common_bath_diffusion_rank_two(self):
        a, d = build_evolution(pair_net(), BathTopology.common(2, DENSITY))
        assert np.linalg.matrix_rank(d, tol=1e-12) == 2


class TestEvolveCovariance:
    def test_unitary_purity_preserved(self):
        net = NetworkSpec(np.array([1.0]), np.zeros((1, 1)))
        baths = BathTopology(np.zeros((1, 1)), (DENSITY,), (0.0,))
        a, d = build_evolution(net, baths)
        times = np.arange(0.0, 20.0001, 0.01)
        states = evolve_covariance(GaussianState.vacuum(), a, d, times)
        for state in states[:: len(states) // 10]:
            det2 = np.linalg.det(2.0 * state.cov)
            assert det2 == pytest.approx(1.0, abs=1e-8)

    def test_damped_relaxation_matches_analytic(self):
        gamma, omega = 0.3, 1.1
        a = np.array([[-gamma / 2, omega], [-omega, -gamma / 2]])
        d = gamma / 2 * np.eye(2)
        state0 = GaussianState.thermal(1.0)  # nbar = 1
        times = np.arange(0.0, 15.0001, 0.005)
        states = evolve_covariance(state0, a, d, times)
        for k in (200, 1500, 3000):
            ref = damped_mode_cov(state0.cov, omega, gamma, times[k])
            assert states[k].cov == pytest.approx(ref, abs=1e-6)
        # occupation relaxes as nbar e^{-Gamma t}
        nbar_end = 0.5 * np.trace(states[-1].cov) - 0.5
        assert nbar_end == pytest.approx(math.exp(-gamma * times[-1]), abs=1e-6)

    def test_rk4_order(self):
        gamma, omega = 0.2, 1.0
        a = np.array([[-gamma / 2, omega], [-omega, -gamma / 2]])
        d = gamma / 2 * np.eye(2)
        state0 = GaussianState.squeezed_vacuum(0.8)
        t_final = 5.0
        errs = []
        for dt in (0.05, 0.025):
            times = np.arange(0.0, t_final + dt / 2, dt)
            states = evolve_covariance(state0, a, d, times)
            ref = damped_mode_cov(state0.cov, omega, gamma, t_final)
            errs.append(np.abs(states[-1].cov - ref).max())
        assert errs[0] / errs[1] >= 8.0

    def test_step_size_guard(self):
        a = np.array([[0.0, 5.0], [-5.0, 0.0]])
        with pytest.raises(ConfigError):
            evolve_covariance(GaussianState.vacuum(), a, np.zeros((2, 2)), np.arange(0, 1, 0.05))

    def test_uncertainty_preserved_along_trajectory(self):
        a, d = build_evolution(pair_net(omega2=1.1, lam=0.15), BathTopology.common(2, DENSITY))
        state0 = GaussianState(np.zeros(4), np.diag([math.exp(-2), math.exp(2)] * 2) / 2)
        times = np.arange(0.0, 40.0001, 0.02)
        states = evolve_covariance(state0, a, d, times)
        for state in states[::100]:
            assert symplectic_eigenvalues(state.cov).min() >= 0.5 - 1e-9


class TestTongue:
    def test_uncoupled_detuned_cell_below_tongue(self):
        scn = TongueScenario(bath="common")
        cell = tongue_cell(scn, omega2=1.3, lam=0.0)
        assert abs(cell["pearson"]) < 0.5

    def test_zero_detuning_coupled_cell_synchronizes(self):
        scn = TongueScenario(bath="common")
        cell = tongue_cell(scn, omega2=1.0, lam=0.1)
        assert cell["pearson"] > 0.9
        assert cell["discord"] > 0.01

    def test_failing_cell_recorded_not_fatal(self):
        scn = TongueScenario(
            bath="common",
            omega2_values=(1.0, 1.1),
            lambda_values=(0.05, 1.5),  # second coupling destabilizes the network
            t_eval=20.0,
            window=10.0,
        )
        grid = tongue_diagram(scn)
        assert (grid.status == "ok").sum() == 2
        bad = grid.status[:, 1]
        assert all(s.startswith("error") for s in bad)
        assert np.isnan(grid.layers["pearson"][:, 1]).all()

    def test_sweep_csv(self, tmp_path):
        scn = TongueScenario(
            bath="common", omega2_values=(0.9, 1.0), lambda_values=(0.05, 0.1),
            t_eval=20.0, window=10.0,
        )
        grid = tongue_diagram(scn)
        path = tmp_path / "tongue.csv"
        grid.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "omega2,lambda,pearson,discord,status"
        assert len(path.read_text().splitlines()) == 5


class TestValidation:
    def test_negative_frequency_rejected(self):
        with pytest.raises(Exception):
            NetworkSpec(np.array([1.0, -0.5]), np.zeros((2, 2)))

    def test_asymmetric_coupling_rejected(self):
        with pytest.raises(Exception):
            NetworkSpec(np.array([1.0, 1.0]), np.array([[0.0, 0.1], [0.2, 0.0]]))

    def test_bath_shape_mismatch(self):
        with pytest.raises(ArgumentError):
            normal_modes(pair_net(), BathTopology.common(3, DENSITY))
