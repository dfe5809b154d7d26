"""Classical Kuramoto baseline: N noisy phase oscillators and the two-unit
phase reduction of coupled self-sustained oscillators.

The coupling is implemented with the attractive sign,
dtheta_i/dt = omega_i + xi_i + (K/N) sum_j sin(theta_j - theta_i), so that
the locked solution below the critical detuning exists; the mean-field sum
is evaluated exactly through the order parameter identity
(K/N) sum_j sin(theta_j - theta_i) = K r sin(psi - theta_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ArgumentError, ValidationError
from .statecore import Trajectory


@dataclass(frozen=True)
class LorentzianFreqs:
    """Lorentzian frequency distribution g(w) with half-width ``gamma``.

    ``sample`` returns deterministic equal-probability quantiles, so runs
    are reproducible and free of heavy-tail sampling noise; randomness enters
    a simulation only through initial phases and the noise stream.
    """

    center: float = 0.0
    gamma: float = 0.5

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValidationError("gamma must be positive")

    def sample(self, n: int) -> np.ndarray:
        u = (np.arange(n) + 0.5) / n
        return self.center + self.gamma * np.tan(math.pi * (u - 0.5))

    def density_at_center(self) -> float:
        return 1.0 / (math.pi * self.gamma)


@dataclass(frozen=True)
class GaussianFreqs:
    """Normal frequency distribution, quantile-sampled like the Lorentzian."""

    center: float = 0.0
    sigma: float = 0.5

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError("sigma must be positive")

    def sample(self, n: int) -> np.ndarray:
        from scipy import stats

        u = (np.arange(n) + 0.5) / n
        return self.center + self.sigma * stats.norm.ppf(u)

    def density_at_center(self) -> float:
        return 1.0 / (self.sigma * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class ExplicitFreqs:
    """Explicit list of natural frequencies."""

    values: tuple

    def sample(self, n: int) -> np.ndarray:
        vals = np.asarray(self.values, dtype=float)
        if vals.size != n:
            raise ArgumentError(f"need {n} frequencies, got {vals.size}")
        return vals

    def density_at_center(self) -> float:
        return math.inf


@dataclass(frozen=True)
class KuramotoSpec:
    """One simulation: population, frequencies, coupling, noise, grid, seed."""

    n: int
    frequencies: object
    coupling: float
    noise: float = 0.0
    dt: float = 1e-2
    t_final: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("need at least two oscillators")
        if self.dt <= 0 or self.t_final <= 0:
            raise ValidationError("dt and t_final must be positive")
        if self.noise < 0:
            raise ValidationError("noise strength must be >= 0")


@dataclass(frozen=True)
class KuramotoRun:
    """Order-parameter series and final phases of one simulation."""

    spec: KuramotoSpec
    times: np.ndarray
    r: np.ndarray
    psi: np.ndarray
    final_phases: np.ndarray

    def order_series(self) -> Trajectory:
        return Trajectory("order_parameter", 0.0, self.spec.dt, self.r)


def _drift(theta: np.ndarray, omega: np.ndarray, coupling: float) -> np.ndarray:
    # (K/N) sum_j sin(theta_j - theta_i) = K Im[z conj(e^{i theta_i})], z = mean e^{i theta}
    phase = np.exp(1j * theta)
    return omega + coupling * np.imag(phase.mean() * np.conj(phase))


def simulate(spec: KuramotoSpec) -> KuramotoRun:
    """Integrate the population; Euler-Maruyama with noise, RK4 without.

    The noise term has autocorrelation <xi_i(t) xi_j(t')> =
    2 * noise * delta_ij delta(t - t'), hence increments of standard
    deviation sqrt(2 * noise * dt). The mean-field sum is evaluated exactly
    through the order parameter, so one step costs O(N).
    """
    rng = np.random.default_rng(spec.seed)
    omega = np.asarray(spec.frequencies.sample(spec.n), dtype=float)
    theta = rng.uniform(0.0, 2.0 * math.pi, spec.n)
    n_steps = int(round(spec.t_final / spec.dt))
    r_series = np.empty(n_steps + 1)
    psi_series = np.empty(n_steps + 1)
    dt = spec.dt
    sigma = math.sqrt(2.0 * spec.noise * dt)
    for step in range(n_steps + 1):
        z = np.exp(1j * theta).mean()
        r_series[step] = abs(z)
        psi_series[step] = np.angle(z)
        if step == n_steps:
            break
        if spec.noise > 0:
            theta = theta + dt * _drift(theta, omega, spec.coupling)
            theta = theta + sigma * rng.standard_normal(spec.n)
        else:
            k1 = _drift(theta, omega, spec.coupling)
            k2 = _drift(theta + 0.5 * dt * k1, omega, spec.coupling)
            k3 = _drift(theta + 0.5 * dt * k2, omega, spec.coupling)
            k4 = _drift(theta + dt * k3, omega, spec.coupling)
            theta = theta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    times = dt * np.arange(n_steps + 1)
    return KuramotoRun(spec=spec, times=times, r=r_series, psi=psi_series, final_phases=theta)


@dataclass(frozen=True)
class KcEstimate:
    """Critical-coupling estimate with the sweep table behind it."""

    k_c: float
    couplings: np.ndarray
    r_mean: np.ndarray
    threshold: float
    notes: tuple


def estimate_kc(
    base: KuramotoSpec, coupling_values, threshold: float = 0.1, discard_frac: float = 0.5
) -> KcEstimate:
    """Sweep the coupling and locate the onset of collective locking.

    For each K the long-time average of r (after discarding the initial
    ``discard_frac`` of the run) is recorded; the estimate interpolates the
    first upward crossing of ``threshold``. Finite-size fluctuations of
    order 1/sqrt(N) blur the onset; a note records the resolution and any
    non-monotonic stretch beyond that band.
    """
    ks = np.sort(np.asarray(coupling_values, dtype=float))
    if ks.size < 2:
        raise ArgumentError("need at least two coupling values")
    r_mean = np.empty(ks.size)
    for i, k in enumerate(ks):
        run = simulate(replace(base, coupling=float(k)))
        start = int(discard_frac * run.r.size)
        r_mean[i] = float(run.r[start:].mean())
    notes = [f"finite-size r floor about {1.0 / math.sqrt(base.n):.3g} at N={base.n}"]
    band = 3.0 / math.sqrt(base.n)
    drops = np.diff(r_mean) < -band
    if np.any(drops):
        notes.append("warning: r(K) decreases beyond the finite-size band")
    above = r_mean > threshold
    if above[0]:
        notes.append("onset at or below the smallest sweep coupling")
        k_c = float(ks[0])
    elif not np.any(above):
        notes.append("warning: threshold never crossed inside the sweep range")
        k_c = float(ks[-1])
    else:
        hi = int(np.argmax(above))
        lo = hi - 1
        frac = (threshold - r_mean[lo]) / (r_mean[hi] - r_mean[lo])
        k_c = float(ks[lo] + frac * (ks[hi] - ks[lo]))
    return KcEstimate(k_c=k_c, couplings=ks, r_mean=r_mean, threshold=threshold, notes=tuple(notes))


# ---------------------------------------------------------------------------
# Two-unit phase reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhasePairSpec:
    """Reduced phase-difference equation of two coupled limit-cycle units:

    d(dtheta)/dt = -detuning - cos_coeff cos(dtheta) - sin2_coeff sin(2 dtheta)
    """

    detuning: float
    cos_coeff: float
    sin2_coeff: float
    initial_offset: float = 0.0

    def rhs(self, dtheta: float) -> float:
        return (
            -self.detuning
            - self.cos_coeff * math.cos(dtheta)
            - self.sin2_coeff * math.sin(2.0 * dtheta)
        )


@dataclass(frozen=True)
class PhasePairResult:
    offset: Trajectory
    locked: bool
    drift_rate: float


def two_unit_phase(spec: PhasePairSpec, t_final: float = 200.0, dt: float = 0.01) -> PhasePairResult:
    """RK4 integration of the phase difference with a locking classification.

    Locked means the average of |d(dtheta)/dt| over the final 20 percent of
    the run stays below 1e-3 times the dominant coefficient scale.
    """
    n_steps = int(round(t_final / dt))
    values = np.empty(n_steps + 1)
    x = spec.initial_offset
    for step in range(n_steps + 1):
        values[step] = x
        if step == n_steps:
            break
        k1 = spec.rhs(x)
        k2 = spec.rhs(x + 0.5 * dt * k1)
        k3 = spec.rhs(x + 0.5 * dt * k2)
        k4 = spec.rhs(x + dt * k3)
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    tail = values[int(0.8 * n_steps) :]
    drift = float(np.mean(np.abs([spec.rhs(v) for v in tail])))
    scale = max(abs(spec.detuning), abs(spec.cos_coeff), abs(spec.sin2_coeff), 1.0)
    return PhasePairResult(
        offset=Trajectory("phase_offset", 0.0, dt, values),
        locked=drift < 1e-3 * scale,
        drift_rate=drift,
    )
