import math

import numpy as np
import pytest

from oracles import expm_propagate, qubit_fidelity
from qsync.errors import ConfigError, DegeneracyError
from qsync.spins import (
    SZ1,
    SZ2,
    LocalOperatorCoeffs,
    SpinDiagramScenario,
    SpinModelSpec,
    diagonalize,
    diagram,
    diagram_cell,
    evolve_rho,
    liouvillian,
    observable_traj,
    quasiparticle_energies,
    secular_rates,
)
from qsync.statecore import QubitPairState, SpectralDensity


def make_spec(omega2=0.75, lam=0.08, asymmetry=0.0, alpha=0.01, temperature=0.0):
    return SpinModelSpec(
        omega1=1.0,
        omega2=omega2,
        lam=lam,
        asymmetry=asymmetry,
        bath=SpectralDensity(alpha=alpha, cutoff=20.0),
        temperature=temperature,
    )


class TestDiagonalize:
    def test_decoupled_limit(self):
        spect = diagonalize(make_spec(omega2=0.75, lam=0.0))
        assert spect.e1 == pytest.approx(1.0, abs=1e-12)
        assert spect.e2 == pytest.approx(0.75, abs=1e-12)

    def test_resonant_coupled_energies(self):
        spect = diagonalize(make_spec(omega2=1.0, lam=0.11))
        e1, e2 = quasiparticle_energies(1.0, 1.0, 0.11)
        assert spect.e1 == pytest.approx(e1, abs=1e-12)
        assert spect.e2 == pytest.approx(e2, abs=1e-12)
        # closed form evaluated directly
        sp = math.sqrt(4 * 0.11**2 + 4.0)
        sm = math.sqrt(4 * 0.11**2)
        assert e1 == pytest.approx((sp + sm) / 2)
        assert e2 == pytest.approx((sp - sm) / 2)

    def test_analytic_matches_numeric_across_grid(self):
        for omega2 in np.linspace(0.7, 1.3, 20):
            for lam in np.linspace(0.01, 0.2, 20):
                spect = diagonalize(make_spec(omega2=omega2, lam=lam))
                e1, e2 = quasiparticle_energies(1.0, omega2, lam)
                assert abs(spect.e1 - e1) < 1e-10
                assert abs(spect.e2 - e2) < 1e-10

    def test_degenerate_refused(self):
        with pytest.raises(DegeneracyError):
            diagonalize(make_spec(omega2=1.0, lam=0.0))


class TestSecularRates:
    def test_zero_temperature_no_raising(self):
        spec = make_spec()
        terms = secular_rates(spec, diagonalize(spec))
        assert all(t.frequency > 0 for t in terms)

    def test_thermal_detailed_balance(self):
        spec = make_spec(temperature=0.5)
        terms = secular_rates(spec, diagonalize(spec))
        by_freq = {}
        for t in terms:
            by_freq.setdefault(abs(t.frequency), {})[np.sign(t.frequency)] = t.rate
        for freq, pair in by_freq.items():
            if freq == 0.0 or -1 not in pair:
                continue
            assert pair[-1] / pair[1] == pytest.approx(math.exp(-freq / 0.5), rel=1e-9)

    def test_rates_scale_with_alpha(self):
        t1 = secular_rates(make_spec(alpha=0.01), diagonalize(make_spec(alpha=0.01)))
        t2 = secular_rates(make_spec(alpha=0.02), diagonalize(make_spec(alpha=0.02)))
        for a, b in zip(t1, t2):
            assert b.rate == pytest.approx(2.0 * a.rate, rel=1e-12)

    def test_resonant_common_bath_dark_singlet(self):
        # at A = 1 and equal frequencies the exchange-antisymmetric singlet
        # decouples from the bath entirely; each Bohr sector keeps a single
        # transition channel with nonzero weight
        spec = make_spec(omega2=1.0, lam=0.11, asymmetry=1.0)
        spect = diagonalize(spec)
        singlet = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
        op = spec.coupling_operator()
        assert np.abs(op @ singlet).max() < 1e-14
        terms = secular_rates(spec, spect)
        assert len(terms) == 2
        for t in terms:
            assert t.weight > 0.5
            assert np.abs(t.operator @ singlet).max() < 1e-12

    def test_dephasing_coupling_sectors(self):
        # sz1 + sz2 has no parity-flipping elements: at T=0 only the
        # even-block transition sector at E1+E2 survives
        spec = make_spec(omega2=1.1, lam=0.1, asymmetry=1.0)
        spect = diagonalize(spec)
        terms = secular_rates(spec, spect, coupling=SZ1 + SZ2)
        assert len(terms) == 1
        assert terms[0].frequency == pytest.approx(spect.e1 + spect.e2, abs=1e-9)


class TestEvolveRho:
    def test_free_precession(self):
        spec = make_spec(lam=0.0, alpha=0.0)
        times = np.arange(0.0, 20.0001, 0.01)
        states = evolve_rho(QubitPairState.plus_plus(), spec, times)
        traj = observable_traj(states, 0, LocalOperatorCoeffs(a_x=1.0), times)
        assert np.abs(traj.values - np.cos(times)).max() < 1e-7

    def test_rk4_matches_liouvillian_exponential(self):
        # acceptance-style oracle on one cell; the full sweep lives in the
        # acceptance module
        spec = make_spec(omega2=0.85, lam=0.08)
        times = np.arange(0.0, 75.0001, 0.01)
        states = evolve_rho(QubitPairState.plus_plus(), spec, times)
        ref = expm_propagate(liouvillian(spec), QubitPairState.plus_plus().rho, 75.0)
        assert np.abs(states[-1].rho - ref).max() < 1e-6

    def test_trace_and_positivity_along_trajectory(self):
        spec = make_spec(omega2=1.15, lam=0.12, asymmetry=1.0, alpha=0.02)
        times = np.arange(0.0, 50.0001, 0.01)
        states = evolve_rho(QubitPairState.plus_plus(), spec, times)
        for state in states[::200]:
            assert np.trace(state.rho).real == pytest.approx(1.0, abs=1e-7)
            assert np.linalg.eigvalsh(state.rho).min() >= -1e-7

    def test_relaxation_to_gibbs(self):
        # t well beyond 1/min(gamma) ~ 15 for these rates
        for temperature in (0.0, 0.4):
            spec = make_spec(omega2=0.8, lam=0.1, alpha=0.05, temperature=temperature)
            times = np.arange(0.0, 200.0001, 0.01)
            states = evolve_rho(QubitPairState.plus_plus(), spec, times)
            h = spec.hamiltonian()
            if temperature == 0.0:
                evals, evecs = np.linalg.eigh(h)
                gibbs = np.outer(evecs[:, 0], evecs[:, 0].conj())
            else:
                w = np.exp(-np.linalg.eigvalsh(h) / temperature)
                evals, evecs = np.linalg.eigh(h)
                gibbs = evecs @ np.diag(w / w.sum()) @ evecs.conj().T
            fid = qubit_fidelity(states[-1].rho, gibbs)
            assert fid > 0.999

    def test_step_size_guard(self):
        spec = make_spec()
        with pytest.raises(ConfigError):
            evolve_rho(QubitPairState.plus_plus(), spec, np.arange(0.0, 10.0, 0.1))


class TestObservableTraj:
    def test_identity_coefficient(self):
        spec = make_spec()
        times = np.arange(0.0, 1.0001, 0.01)
        states = evolve_rho(QubitPairState.plus_plus(), spec, times)
        traj = observable_traj(states, 1, LocalOperatorCoeffs(a_d=1.0), times)
        assert traj.values == pytest.approx(np.ones(times.size), abs=1e-12)

    def test_sigma_z_on_up(self):
        state = QubitPairState.product([1, 0], [0, 1])
        traj = observable_traj([state], 0, LocalOperatorCoeffs(a_z=1.0), np.array([0.0, 1.0])[:1])
        assert traj.values[0] == pytest.approx(1.0)


class TestDiagram:
    def test_anchor_cells_sign_flip(self):
        scn = SpinDiagramScenario(asymmetry=0.0)
        hi = diagram_cell(scn, 1.25, 0.11)
        lo = diagram_cell(scn, 0.75, 0.11)
        assert hi["C"] < -0.8
        assert lo["C"] > 0.8
        # Z tracks the in-phase/anti-phase classification
        assert hi["Z_I"] < 0 and lo["Z_I"] > 0

    def test_trivial_sync_on_resonance_common_bath(self):
        scn = SpinDiagramScenario(asymmetry=1.0)
        cell = diagram_cell(scn, 1.0, 0.11)
        assert cell["C"] > 0.99

    def test_degenerate_cell_flagged_grid_continues(self):
        scn = SpinDiagramScenario(
            asymmetry=1.0, omega2_values=(1.0, 1.1), lambda_values=(0.0, 0.05),
        )
        grid = diagram(scn)
        assert grid.status[0, 0] == "degenerate"
        assert np.isnan(grid.layers["C"][0, 0])
        ok = [grid.status[i, j] for i in range(2) for j in range(2) if (i, j) != (0, 0)]
        assert all(s in ("ok", "secular-marginal") for s in ok)

    def test_pure_dephasing_does_not_synchronize(self):
        # control at the strongly detuned anchors where the transverse bath
        # does synchronize: the sz-coupled bath yields no locking while the
        # spins stay informationally correlated
        for asym in (0.0, 1.0):
            scn = SpinDiagramScenario(asymmetry=asym, coupling_channel="z")
            for omega2 in (1.25, 0.75):
                cell = diagram_cell(scn, omega2, 0.11)
                assert abs(cell["C"]) < 0.5
                assert cell["MI"] > 0.05

    def test_csv_layers(self, tmp_path):
        scn = SpinDiagramScenario(
            asymmetry=1.0, omega2_values=(0.9, 1.1), lambda_values=(0.05, 0.1),
        )
        grid = diagram(scn)
        path = tmp_path / "diagram.csv"
        grid.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "omega2,lambda,C,Z_I,MI,E,status"
        assert len(lines) == 5
