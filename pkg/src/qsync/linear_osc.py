"""Networks of dissipative coupled harmonic oscillators.

The dynamics is realized as Markovian rotating-wave damping of the network's
normal modes: each mode of frequency W_n acquires a Lindblad rate

    Gamma_n = sum_baths pi * J_bath(W_n) / W_n * (overlap of the mode with
              that bath's weight row)^2

with the bath's thermal occupation evaluated at the mode frequency. The
1/W_n factor is the zero-point scale of the position coupling; for an Ohmic
density J ~ alpha w it makes the damping rate of a mode independent of its
frequency (velocity-proportional damping). That is what kills
synchronization for separate identical baths (all modes damp alike) and
enables it for any less symmetric topology, where the overlaps differ and
one collective mode outlives the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    ConfigError,
    IntegrationAccuracyError,
    UnstableNetworkError,
    ValidationError,
)
from .grids import SweepGrid
from .measures import WindowSpec, pearson, gaussian_discord
from .statecore import GaussianState, SpectralDensity, Trajectory, thermal_occupation

COUPLING_FORMS = ("bilinear", "spring")


@dataclass(frozen=True)
class NetworkSpec:
    """Oscillator network: frequencies and a symmetric coupling matrix.

    ``coupling_form`` selects the bilinear x_i x_j interaction (the two-unit
    default) or the spring form (x_i - x_j)^2 summed over pairs. Masses are
    fixed to 1.
    """

    freqs: np.ndarray
    coupling: np.ndarray
    coupling_form: str = "bilinear"

    def __post_init__(self):
        freqs = np.atleast_1d(np.asarray(self.freqs, dtype=float))
        coupling = np.asarray(self.coupling, dtype=float)
        n = freqs.size
        if np.any(freqs <= 0):
            raise ValidationError("oscillator frequencies must be positive")
        if coupling.shape != (n, n):
            raise ValidationError("coupling matrix shape must match the network size")
        if not np.allclose(coupling, coupling.T, atol=1e-12):
            raise ValidationError("coupling matrix must be symmetric")
        if self.coupling_form not in COUPLING_FORMS:
            raise ValidationError(f"coupling_form must be one of {COUPLING_FORMS}")
        freqs.setflags(write=False)
        coupling = coupling.copy()
        np.fill_diagonal(coupling, 0.0)
        coupling.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coupling", coupling)

    @property
    def n(self) -> int:
        return self.freqs.size

    @classmethod
    def pair(cls, omega1: float, omega2: float, lam: float, coupling_form: str = "bilinear"):
        c = np.array([[0.0, lam], [lam, 0.0]])
        return cls(np.array([omega1, omega2]), c, coupling_form)

    def potential_matrix(self) -> np.ndarray:
        """Potential matrix V with H = sum p^2/2 + x^T V x / 2."""
        v = np.diag(self.freqs**2)
        if self.coupling_form == "bilinear":
            v = v + self.coupling
        else:
            off = np.sum(self.coupling, axis=1)
            v = v + 2.0 * np.diag(off) - 2.0 * self.coupling
        return v


@dataclass(frozen=True)
class BathTopology:
    """Bath-to-oscillator weight matrix with per-bath density and temperature."""

    weights: np.ndarray
    densities: tuple
    temperatures: tuple

    def __post_init__(self):
        weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        if len(self.densities) != weights.shape[0] or len(self.temperatures) != weights.shape[0]:
            raise ValidationError("one spectral density and temperature per bath required")
        if any(t < 0 for t in self.temperatures):
            raise ValidationError("temperatures must be >= 0")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "densities", tuple(self.densities))
        object.__setattr__(self, "temperatures", tuple(float(t) for t in self.temperatures))

    @classmethod
    def common(cls, n: int, density: SpectralDensity, temperature: float = 0.0):
        """Single bath coupled with equal weight to every oscillator."""
        return cls(np.ones((1, n)), (density,), (temperature,))

    @classmethod
    def separate(cls, n: int, density: SpectralDensity, temperature: float = 0.0):
        """One identical independent bath per oscillator."""
        return cls(np.eye(n), (density,) * n, (temperature,) * n)


@dataclass(frozen=True)
class ModeReport:
    """Normal modes sorted by damping rate (least damped first)."""

    frequencies: np.ndarray
    vectors: np.ndarray  # columns are mode vectors in position space
    damping_rates: np.ndarray
    occupations: np.ndarray


def _degenerate_groups(values: np.ndarray, rtol: float = 1e-9):
    groups, start = [], 0
    for k in range(1, values.size + 1):
        if k == values.size or abs(values[k] - values[start]) > rtol * max(1.0, abs(values[start])):
            groups.append(range(start, k))
            start = k
    return groups


def normal_modes(net: NetworkSpec, baths: BathTopology) -> ModeReport:
    """Diagonalize the network and attach per-mode damping and occupation.

    Inside degenerate frequency subspaces the mode basis is rotated so the
    damping matrix is diagonal; this fixes the usual eigenvector ambiguity
    and isolates bath-decoupled collective modes exactly.
    """
    if baths.weights.shape[1] != net.n:
        raise ArgumentError("bath weight matrix does not match the network size")
    v = net.potential_matrix()
    lam, f = np.linalg.eigh(v)
    if lam.min() <= 0:
        raise UnstableNetworkError(
            f"potential matrix not positive definite (min eigenvalue {lam.min():.3g})"
        )
    freqs = np.sqrt(lam)
    for group in _degenerate_groups(lam):
        if len(group) < 2:
            continue
        sub = f[:, group]
        damp = np.zeros((len(group), len(group)))
        for b in range(baths.weights.shape[0]):
            g = sub.T @ baths.weights[b]
            w_grp = freqs[group.start]
            damp += math.pi * baths.densities[b].j(w_grp) / w_grp * np.outer(g, g)
        _, rot = np.linalg.eigh(damp)
        f[:, group] = sub @ rot
    gamma = np.zeros(net.n)
    heat = np.zeros(net.n)
    for b in range(baths.weights.shape[0]):
        overlap = f.T @ baths.weights[b]
        rate_b = math.pi * baths.densities[b].j(freqs) / freqs * overlap**2
        gamma += rate_b
        occ_b = np.array(
            [thermal_occupation(w, baths.temperatures[b]) for w in freqs]
        )
        heat += rate_b * occ_b
    occupations = np.where(gamma > 0, heat / np.where(gamma > 0, gamma, 1.0), 0.0)
    order = np.lexsort((freqs, gamma))
    return ModeReport(
        frequencies=freqs[order],
        vectors=f[:, order],
        damping_rates=gamma[order],
        occupations=occupations[order],
    )


def build_evolution(net: NetworkSpec, baths: BathTopology):
    """Drift and diffusion matrices of the quadrature moments.

    Each normal mode (Q_n, P_n) evolves under rotating-wave Lindblad damping,

        d(Q, P)/dt = [[-G/2, W], [-W, -G/2]] (Q, P),   D = G (nbar + 1/2) I,

    and the result is mapped back to the local dimensionless quadratures
    (q_j, p_j) through the symplectic mode transformation. Returns (A, D)
    with dmean/dt = A mean and dcov/dt = A cov + cov A^T + D.
    """
    modes = normal_modes(net, baths)
    n = net.n
    t_mat = np.zeros((2 * n, 2 * n))
    for j in range(n):
        for m in range(n):
            scale = math.sqrt(net.freqs[j] / modes.frequencies[m])
            t_mat[2 * j, 2 * m] = scale * modes.vectors[j, m]
            t_mat[2 * j + 1, 2 * m + 1] = modes.vectors[j, m] / scale
    a_modes = np.zeros((2 * n, 2 * n))
    d_modes = np.zeros((2 * n, 2 * n))
    for m in range(n):
        w, g, nb = modes.frequencies[m], modes.damping_rates[m], modes.occupations[m]
        a_modes[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = [[-g / 2, w], [-w, -g / 2]]
        d_modes[2 * m, 2 * m] = d_modes[2 * m + 1, 2 * m + 1] = g * (nb + 0.5)
    t_inv = np.linalg.inv(t_mat)
    a = t_mat @ a_modes @ t_inv
    d = t_mat @ d_modes @ t_mat.T
    return a, 0.5 * (d + d.T)


# ---------------------------------------------------------------------------
# Covariance integration
# ---------------------------------------------------------------------------


def _taylor4(m: np.ndarray) -> np.ndarray:
    """I + m + m^2/2 + m^3/6 + m^4/24, the one-step matrix of classical RK4
    applied to a linear autonomous system x' = (m/h) x with step h."""
    eye = np.eye(m.shape[0], dtype=m.dtype)
    out = eye + m / 4.0
    out = eye + (m / 3.0) @ out
    out = eye + (m / 2.0) @ out
    return eye + m @ out


def _rk4_moment_steppers(a: np.ndarray, d: np.ndarray, dt: float):
    """One-step RK4 updates for mean' = A mean and cov' = A cov + cov A^T + D.

    For this linear system the classical four-stage RK4 step collapses to
    vec(cov) <- T4(h L) vec(cov) + h (I + hL/2 + (hL)^2/6 + (hL)^3/24) vec(D)
    with L the Lyapunov superoperator; the arithmetic is identical to the
    stage form, evaluated once instead of per step.
    """
    n2 = a.shape[0]
    eye = np.eye(n2)
    lyap = np.kron(a, eye) + np.kron(eye, a)  # row-major vec of A X + X A^T
    hl = dt * lyap
    step_cov = _taylor4(hl)
    affine = dt * (
        np.eye(n2 * n2) + hl / 2.0 + (hl @ hl) / 6.0 + (hl @ hl @ hl) / 24.0
    )
    const = affine @ d.ravel()
    step_mean = _taylor4(dt * a)
    return step_mean, step_cov, const


def _integrate_moments(mean0, cov0, a, d, dt, n_steps, record_every=1):
    """March the first and second moments; returns sampled (times_idx, means, covs)."""
    step_mean, step_cov, const = _rk4_moment_steppers(a, d, dt)
    mean = np.array(mean0, dtype=float)
    cov_vec = np.array(cov0, dtype=float).ravel()
    n2 = mean.size
    rec_idx = list(range(0, n_steps + 1, record_every))
    if rec_idx[-1] != n_steps:
        rec_idx.append(n_steps)
    means = np.empty((len(rec_idx), n2))
    covs = np.empty((len(rec_idx), n2, n2))
    k_rec = 0
    for step in range(n_steps + 1):
        if step == rec_idx[k_rec]:
            cov = cov_vec.reshape(n2, n2)
            means[k_rec] = mean
            covs[k_rec] = 0.5 * (cov + cov.T)
            k_rec += 1
        if step == n_steps:
            break
        mean = step_mean @ mean
        cov_vec = step_cov @ cov_vec + const
    return np.array(rec_idx), means, covs


def evolve_covariance(state0: GaussianState, a, d, times) -> list:
    """Integrate a Gaussian state along ``times`` with RK4.

    ``times`` must be uniform; the integration step equals the grid spacing
    and must satisfy dt * ||A||_2 < 0.1. Every returned state passes the
    uncertainty-relation validation.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ArgumentError("need at least two time points")
    steps = np.diff(times)
    dt = steps[0]
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise ArgumentError("time grid must be uniform")
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if dt * np.linalg.norm(a, 2) >= 0.1:
        raise ConfigError("step too large: require dt * ||A|| < 0.1")
    _, means, covs = _integrate_moments(state0.mean, state0.cov, a, d, dt, times.size - 1)
    states = []
    for k in range(times.size):
        try:
            states.append(GaussianState(means[k], covs[k]))
        except ValidationError as exc:
            raise IntegrationAccuracyError(
                f"state at t={times[k]:.6g} failed validation: {exc}"
            ) from exc
    return states


# ---------------------------------------------------------------------------
# Tongue diagram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TongueScenario:
    """Common- or separate-bath sweep of the two-oscillator network.

    Each cell evolves two position-squeezed vacua and evaluates the Pearson
    correlation of the <x_j^2> trajectories at ``t_eval`` over ``window``,
    plus the Gaussian discord of the state at the same time.
    """

    omega1: float = 1.0
    omega2_values: tuple = tuple(np.linspace(0.5, 1.5, 21))
    lambda_values: tuple = tuple(np.linspace(0.0, 0.3, 13))
    bath: str = "common"
    alpha: float = 0.01
    cutoff: float = 20.0
    temperature: float = 0.0
    squeezing: float = 1.0
    squeeze_angles: tuple = (0.0, 0.4 * math.pi)
    coupling_form: str = "bilinear"
    t_eval: float = 150.0
    window: float = 100.0
    dt: float = 0.005

    def __post_init__(self):
        if self.bath not in ("common", "separate"):
            raise ValidationError("bath must be 'common' or 'separate'")

    def density(self) -> SpectralDensity:
        return SpectralDensity(alpha=self.alpha, cutoff=self.cutoff)


def _initial_squeezed_pair(r: float, angles=(0.0, math.pi / 2)) -> GaussianState:
    # squeezing the two oscillators along different phase-space directions
    # breaks the accidental signal identity of mirror-symmetric cells
    blocks = [GaussianState.squeezed_vacuum(r, a).cov for a in angles]
    cov = np.zeros((4, 4))
    cov[:2, :2], cov[2:, 2:] = blocks
    return GaussianState(np.zeros(4), cov)


def tongue_cell(scn: TongueScenario, omega2: float, lam: float) -> dict:
    """Simulate one sweep cell; returns the pearson/discord layer values."""
    net = NetworkSpec.pair(scn.omega1, omega2, lam, scn.coupling_form)
    density = scn.density()
    if scn.bath == "common":
        baths = BathTopology.common(2, density, scn.temperature)
    else:
        baths = BathTopology.separate(2, density, scn.temperature)
    a, d = build_evolution(net, baths)
    n_steps = int(round((scn.t_eval + scn.window) / scn.dt))
    if scn.dt * np.linalg.norm(a, 2) >= 0.1:
        raise ConfigError("step too large for this cell")
    state0 = _initial_squeezed_pair(scn.squeezing, scn.squeeze_angles)
    rec, means, covs = _integrate_moments(state0.mean, state0.cov, a, d, scn.dt, n_steps)
    # <x_j^2> = (<q_j^2> + <q_j>^2) / omega_j in physical units
    x1_sq = (covs[:, 0, 0] + means[:, 0] ** 2) / scn.omega1
    x2_sq = (covs[:, 2, 2] + means[:, 2] ** 2) / omega2
    traj1 = Trajectory("x1_sq", 0.0, scn.dt, x1_sq)
    traj2 = Trajectory("x2_sq", 0.0, scn.dt, x2_sq)
    c_val = pearson(traj1, traj2, WindowSpec(width=scn.window), scn.t_eval)
    k_eval = int(round(scn.t_eval / scn.dt))
    state_eval = GaussianState(means[k_eval], covs[k_eval])
    disc = gaussian_discord(state_eval, measured=1)
    return {"pearson": c_val, "discord": disc}


def tongue_diagram(scn: TongueScenario) -> SweepGrid:
    """Pearson plus discord maps over the (omega2, lambda) sweep.

    Cells are independent; a failing cell records its error in the status
    layer and the sweep continues.
    """
    grid = SweepGrid.empty(
        "omega2",
        "lambda",
        scn.omega2_values,
        scn.lambda_values,
        ["pearson", "discord"],
        meta={"bath": scn.bath, "t_eval": scn.t_eval, "window": scn.window},
    )
    for i, omega2 in enumerate(grid.values1):
        for j, lam in enumerate(grid.values2):
            try:
                grid.set_cell(i, j, tongue_cell(scn, omega2, lam))
            except Exception as exc:  # record and continue per contract
                grid.set_cell(i, j, {}, status=f"error: {exc}")
    return grid
