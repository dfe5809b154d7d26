import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fock_thermal_entropy, random_two_mode_gaussian
from qsync.errors import ArgumentError, ValidationError
from qsync.statecore import (
    GaussianState,
    QubitPairState,
    SpectralDensity,
    Trajectory,
    entropy,
    load_state_csv,
    partial_reduce,
    purity,
    save_state_csv,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_occupation,
)


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        assert symplectic_eigenvalues(0.5 * np.eye(2)) == pytest.approx([0.5])

    def test_thermal_isotropic(self):
        # nbar = 1 scales the vacuum covariance to nu = 1.5
        assert symplectic_eigenvalues(1.5 * np.eye(2)) == pytest.approx([1.5])

    def test_two_mode_squeezed_standard_form(self):
        cov = GaussianState.two_mode_squeezed(0.5).cov
        # oracle: diagonalize i*Omega*cov directly
        eigs = np.linalg.eigvals(1j * symplectic_form(2) @ cov)
        ref = np.sort(np.abs(eigs))[::2]
        nus = symplectic_eigenvalues(cov)
        assert nus == pytest.approx(np.sort(ref)[::-1], abs=1e-12)
        assert nus == pytest.approx([0.5, 0.5], abs=1e-10)

    def test_descending_order_each_listed_once(self):
        cov = np.diag([0.5, 0.5, 2.5, 2.5, 1.0, 1.0])
        assert symplectic_eigenvalues(cov) == pytest.approx([2.5, 1.0, 0.5])

    def test_rejects_non_symmetric(self):
        bad = np.array([[0.5, 0.1], [0.0, 0.5]])
        with pytest.raises(ValidationError):
            symplectic_eigenvalues(bad)


class TestStateValidation:
    def test_uncertainty_violation_rejected(self):
        with pytest.raises(ValidationError):
            GaussianState(np.zeros(2), 0.3 * np.eye(2))

    def test_non_finite_mean_rejected(self):
        with pytest.raises(ValidationError):
            GaussianState(np.array([np.inf, 0.0]), 0.5 * np.eye(2))

    def test_qubit_trace_and_positivity(self):
        with pytest.raises(ValidationError):
            QubitPairState(0.5 * np.eye(4))
        rho = np.diag([1.1, -0.1, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValidationError):
            QubitPairState(rho)

    def test_qubit_hermiticity(self):
        rho = 0.25 * np.eye(4, dtype=complex)
        rho[0, 1] = 0.1
        with pytest.raises(ValidationError):
            QubitPairState(rho)

    def test_trajectory_checks(self):
        with pytest.raises(ValidationError):
            Trajectory("x", 0.0, -0.1, np.ones(4))
        with pytest.raises(ValidationError):
            Trajectory("x", 0.0, 0.1, np.array([1.0, np.nan]))


class TestEntropy:
    def test_vacuum_pure(self):
        assert entropy(GaussianState.vacuum()) == pytest.approx(0.0, abs=1e-12)
        assert purity(GaussianState.vacuum()) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_pair(self):
        assert entropy(QubitPairState.maximally_mixed()) == pytest.approx(math.log(4))

    def test_thermal_matches_fock_brute_force(self):
        # independent oracle: entropy of the geometric Fock distribution
        for nbar in (0.3, 1.0, 2.0):
            ref = fock_thermal_entropy(nbar, cutoff=60)
            assert entropy(GaussianState.thermal(nbar)) == pytest.approx(ref, abs=1e-6)

    def test_renyi2_and_linear(self):
        st_th = GaussianState.thermal(1.0)
        # purity of nbar=1 thermal mode is 1/(2 nbar + 1) = 1/3
        assert purity(st_th) == pytest.approx(1.0 / 3.0)
        assert entropy(st_th, "renyi2") == pytest.approx(math.log(3.0))
        assert entropy(st_th, "linear") == pytest.approx(2.0 / 3.0)
        mixed = QubitPairState.maximally_mixed()
        assert entropy(mixed, "renyi2") == pytest.approx(math.log(4.0))
        assert entropy(mixed, "linear") == pytest.approx(0.75)

    def test_unknown_order_rejected(self):
        with pytest.raises(ArgumentError):
            entropy(GaussianState.vacuum(), "renyi3")

    @given(st.floats(0.0, 2.0), st.floats(0.0, 1.2))
    @settings(max_examples=40, deadline=None)
    def test_nonnegative_and_zero_iff_pure(self, nbar, r):
        state = GaussianState.thermal(nbar)
        s = entropy(state)
        assert s >= 0.0
        if purity(state) >= 1.0 - 1e-9:
            assert s <= 1e-7
        sq = GaussianState.squeezed_vacuum(r)
        assert entropy(sq) == pytest.approx(0.0, abs=1e-7)
        assert purity(sq) == pytest.approx(1.0, abs=1e-9)


class TestPartialReduce:
    def test_product_of_vacua(self):
        red = partial_reduce(GaussianState.vacuum(2), (0,))
        assert red.n_modes == 1
        assert red.cov == pytest.approx(0.5 * np.eye(2))

    def test_bell_reduction_maximally_mixed(self):
        red = partial_reduce(QubitPairState.bell_phi_plus(), (0,))
        assert red == pytest.approx(0.5 * np.eye(2))

    def test_two_mode_squeezed_reduces_to_thermal(self):
        red = partial_reduce(GaussianState.two_mode_squeezed(0.5), (0,))
        nu = symplectic_eigenvalues(red.cov)
        assert nu == pytest.approx([math.cosh(1.0) / 2.0], abs=1e-12)

    def test_reduction_of_valid_state_is_valid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            cov = random_two_mode_gaussian(rng)
            state = GaussianState(np.zeros(4), cov)
            red = partial_reduce(state, (1,))
            assert symplectic_eigenvalues(red.cov).min() >= 0.5 - 1e-9

    def test_bad_keep_sets(self):
        state = GaussianState.vacuum(2)
        with pytest.raises(ArgumentError):
            partial_reduce(state, ())
        with pytest.raises(ArgumentError):
            partial_reduce(state, (0, 1))
        with pytest.raises(ArgumentError):
            partial_reduce(QubitPairState.bell_phi_plus(), (0, 1))


class TestSpectralDensity:
    def test_ohmic_shape(self):
        sd = SpectralDensity(alpha=0.01, cutoff=20.0)
        assert sd.j(0.0) == 0.0
        assert sd.j(1.0) == pytest.approx(0.01 * math.exp(-0.05))
        w = np.linspace(0.0, 100.0, 50)
        assert np.all(sd.j(w) >= 0.0)

    def test_validation(self):
        with pytest.raises(ValidationError):
            SpectralDensity(alpha=-0.1, cutoff=20.0)
        with pytest.raises(ValidationError):
            SpectralDensity(alpha=0.1, cutoff=0.0)
        with pytest.raises(ArgumentError):
            SpectralDensity(alpha=0.1, cutoff=1.0).j(-1.0)

    def test_occupation(self):
        assert thermal_occupation(1.0, 0.0) == 0.0
        assert thermal_occupation(1.0, 1.0) == pytest.approx(1.0 / (math.e - 1.0))
        assert SpectralDensity(alpha=0.2, cutoff=5.0).zero_frequency_weight(0.0) == 0.0
        assert SpectralDensity(alpha=0.2, cutoff=5.0).zero_frequency_weight(2.0) == pytest.approx(0.8)


class TestStateSnapshots:
    def test_gaussian_roundtrip(self, tmp_path):
        state = GaussianState.two_mode_squeezed(0.7)
        path = tmp_path / "state.csv"
        save_state_csv(state, path)
        loaded = load_state_csv(path)
        assert loaded.mean == pytest.approx(state.mean)
        assert loaded.cov == pytest.approx(state.cov)

    def test_qubit_roundtrip(self, tmp_path):
        state = QubitPairState.from_ket([0.6, 0.0, 0.0, 0.8j])
        path = tmp_path / "rho.csv"
        save_state_csv(state, path)
        loaded = load_state_csv(path)
        assert loaded.rho == pytest.approx(state.rho)
