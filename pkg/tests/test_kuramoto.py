import math

import numpy as np
import pytest

from qsync.errors import ArgumentError, ValidationError
from qsync.kuramoto import (
    ExplicitFreqs,
    GaussianFreqs,
    KuramotoSpec,
    LorentzianFreqs,
    PhasePairSpec,
    estimate_kc,
    simulate,
    two_unit_phase,
)


def spec_two(omega1, omega2, coupling, **overrides):
    params = dict(
        n=2,
        frequencies=ExplicitFreqs((omega1, omega2)),
        coupling=coupling,
        noise=0.0,
        dt=0.01,
        t_final=200.0,
        seed=7,
    )
    params.update(overrides)
    return KuramotoSpec(**params)


class TestSimulate:
    def test_free_drift_exact(self):
        spec = KuramotoSpec(
            n=3,
            frequencies=ExplicitFreqs((0.5, 1.0, 2.0)),
            coupling=0.0,
            noise=0.0,
            dt=0.01,
            t_final=10.0,
            seed=1,
        )
        run = simulate(spec)
        rng = np.random.default_rng(1)
        theta0 = rng.uniform(0, 2 * math.pi, 3)
        expected = theta0 + np.array([0.5, 1.0, 2.0]) * 10.0
        assert run.final_phases == pytest.approx(expected, abs=1e-12)

    def test_two_locked_below_critical_detuning(self):
        run = simulate(spec_two(1.0, 1.3, coupling=0.8))
        # fixed point of d(dtheta)/dt = dw - K sin(dtheta)
        tail = run.final_phases[1] - run.final_phases[0]
        expected = math.asin(0.3 / 0.8)
        offs = (tail - expected) % (2 * math.pi)
        offs = min(offs, 2 * math.pi - offs)
        assert offs < 1e-3

    def test_two_drift_above_critical_detuning(self):
        spec = spec_two(1.0, 2.2, coupling=0.8)
        run = simulate(spec)
        drift = abs(run.final_phases[1] - run.final_phases[0])
        assert drift > 2 * math.pi  # phase difference keeps winding

    def test_identical_frequencies_full_coherence(self):
        spec = KuramotoSpec(
            n=50,
            frequencies=ExplicitFreqs(tuple([1.0] * 50)),
            coupling=0.5,
            noise=0.0,
            dt=0.01,
            t_final=120.0,
            seed=3,
        )
        run = simulate(spec)
        assert run.r[-1] > 0.999

    def test_r_bounded(self):
        spec = KuramotoSpec(
            n=64,
            frequencies=GaussianFreqs(1.0, 0.3),
            coupling=1.2,
            noise=0.4,
            dt=0.01,
            t_final=30.0,
            seed=11,
        )
        run = simulate(spec)
        assert np.all(run.r >= 0.0) and np.all(run.r <= 1.0 + 1e-12)

    def test_seeded_runs_bit_identical(self):
        spec = KuramotoSpec(
            n=32,
            frequencies=LorentzianFreqs(1.0, 0.2),
            coupling=0.7,
            noise=0.3,
            dt=0.01,
            t_final=20.0,
            seed=123,
        )
        r1 = simulate(spec)
        r2 = simulate(spec)
        assert np.array_equal(r1.r, r2.r)
        assert np.array_equal(r1.final_phases, r2.final_phases)

    def test_validation(self):
        with pytest.raises(ValidationError):
            KuramotoSpec(n=1, frequencies=ExplicitFreqs((1.0,)), coupling=0.1)
        with pytest.raises(ArgumentError):
            simulate(
                KuramotoSpec(n=3, frequencies=ExplicitFreqs((1.0, 2.0)), coupling=0.1)
            )


class TestEstimateKc:
    def test_scaling_with_width(self):
        ks1 = np.arange(0.2, 2.01, 0.2)
        base1 = KuramotoSpec(
            n=800, frequencies=LorentzianFreqs(1.0, 0.5), coupling=0.0,
            noise=0.0, dt=0.02, t_final=80.0, seed=5,
        )
        est1 = estimate_kc(base1, ks1)
        base2 = KuramotoSpec(
            n=800, frequencies=LorentzianFreqs(1.0, 1.0), coupling=0.0,
            noise=0.0, dt=0.02, t_final=80.0, seed=5,
        )
        est2 = estimate_kc(base2, 2.0 * ks1)
        assert est2.k_c / est1.k_c == pytest.approx(2.0, rel=0.2)

    def test_identical_frequencies_locks_below_grid(self):
        base = KuramotoSpec(
            n=200, frequencies=ExplicitFreqs(tuple([1.0] * 200)), coupling=0.0,
            noise=0.0, dt=0.02, t_final=60.0, seed=9,
        )
        est = estimate_kc(base, np.arange(0.1, 1.01, 0.1))
        assert est.k_c == pytest.approx(0.1)
        assert any("below" in note for note in est.notes)

    def test_finite_size_note_emitted(self):
        base = KuramotoSpec(
            n=100, frequencies=LorentzianFreqs(1.0, 0.5), coupling=0.0,
            noise=0.0, dt=0.02, t_final=40.0, seed=2,
        )
        est = estimate_kc(base, np.arange(0.4, 1.8, 0.3))
        assert any("finite-size" in note for note in est.notes)

    def test_doubling_n_moves_estimate_less_than_one_grid_step(self):
        ks = np.arange(0.4, 2.01, 0.2)
        ests = []
        for n in (400, 800):
            base = KuramotoSpec(
                n=n, frequencies=LorentzianFreqs(1.0, 0.5), coupling=0.0,
                noise=0.0, dt=0.02, t_final=80.0, seed=13,
            )
            ests.append(estimate_kc(base, ks).k_c)
        assert abs(ests[1] - ests[0]) <= 0.2


class TestTwoUnitPhase:
    def test_locks_in_phase_near_zero(self):
        res = two_unit_phase(PhasePairSpec(0.0, 0.0, 0.5, initial_offset=0.3))
        assert res.locked
        final = res.offset.values[-1] % (2 * math.pi)
        assert min(final, 2 * math.pi - final) < 1e-6

    def test_locks_anti_phase_near_pi(self):
        res = two_unit_phase(PhasePairSpec(0.0, 0.0, 0.5, initial_offset=math.pi - 0.2))
        assert res.locked
        final = res.offset.values[-1] % (2 * math.pi)
        assert abs(final - math.pi) < 1e-6

    def test_drifts_when_detuning_dominates(self):
        res = two_unit_phase(PhasePairSpec(4.0, 0.5, 0.5, initial_offset=0.0))
        assert not res.locked
        assert res.drift_rate > 1.0

    def test_quantile_sampling_deterministic(self):
        d = LorentzianFreqs(0.0, 0.5)
        assert np.array_equal(d.sample(101), d.sample(101))
        mid = d.sample(101)[50]
        assert mid == pytest.approx(0.0, abs=1e-12)
        g = GaussianFreqs(2.0, 0.3)
        s = g.sample(200)
        assert s.mean() == pytest.approx(2.0, abs=1e-6)
