"""Synchronization indicators and correlation quantifiers.

Trajectory-based measures (windowed Pearson and its delayed variant) work on
:class:`~qsync.statecore.Trajectory` objects; state-based measures work on
Gaussian or qubit-pair states from :mod:`qsync.statecore`. All logarithms are
natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import optimize

from . import statecore
from .errors import (
    ArgumentError,
    DegenerateSignalError,
    DegenerateStateError,
    InternalConsistencyError,
    UndefinedPhaseError,
    ValidationError,
    WindowRangeError,
)
from .statecore import (
    GaussianState,
    QubitPairState,
    Trajectory,
    entropy,
    partial_reduce,
    symplectic_eigenvalues,
)

PEARSON_GUARD = 1e-9
GRID_ALIGN_RTOL = 1e-6


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window parameters: width in model time, optional delay.

    The delay shifts the window applied to the second trajectory, which turns
    the plain Pearson indicator into its delayed variant.
    """

    width: float
    delay: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValidationError("window width must be positive")
        if self.delay < 0:
            raise ValidationError("window delay must be >= 0")


@dataclass(frozen=True)
class IndicatorSeries:
    """Named indicator sampled on a uniform grid, with per-point validity."""

    name: str
    series: Trajectory
    valid: np.ndarray

    def __post_init__(self):
        valid = np.array(self.valid, dtype=bool)
        if valid.shape != self.series.values.shape:
            raise ValidationError("validity mask must match the series length")
        valid.setflags(write=False)
        object.__setattr__(self, "valid", valid)

    def to_csv(self, path) -> None:
        rows = zip(self.series.times, self.series.values, self.valid.astype(int))
        statecore.write_csv(path, ["t", "value", "valid"], rows)


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _window_steps(width: float, dt: float) -> int:
    m = int(round(width / dt))
    if m < 2:
        raise ArgumentError("window width must span at least 2 grid steps")
    return m


def _weighted_pearson(a: np.ndarray, b: np.ndarray, w: np.ndarray):
    """Trapezoid-weighted correlation of two window slices.

    Returns (value, variance_a, variance_b); value is NaN when either
    variance is degenerate.
    """
    sw = w.sum()
    abar = (w * a).sum() / sw
    bbar = (w * b).sum() / sw
    da, db = a - abar, b - bbar
    va = float((w * da * da).sum())
    vb = float((w * db * db).sum())
    tol_a = 1e-24 * sw * max(1.0, abar * abar)
    tol_b = 1e-24 * sw * max(1.0, bbar * bbar)
    if va <= tol_a or vb <= tol_b:
        return math.nan, va, vb
    c = float((w * da * db).sum()) / math.sqrt(va * vb)
    if abs(c) > 1.0 + PEARSON_GUARD:
        raise InternalConsistencyError(f"pearson value {c} outside [-1, 1] guard")
    return min(1.0, max(-1.0, c)), va, vb


def _resolve_windows(a: Trajectory, b: Trajectory, w: WindowSpec):
    if not math.isclose(a.dt, b.dt, rel_tol=GRID_ALIGN_RTOL):
        raise ArgumentError("trajectories must share the sampling step")
    m = _window_steps(w.width, a.dt)
    # index shift of b's window relative to a's, snapped to the grid
    shift = int(round((a.t0 - b.t0 + w.delay) / a.dt))
    return m, shift


def pearson(a: Trajectory, b: Trajectory, w: WindowSpec, t: float) -> float:
    """Windowed Pearson correlation of two trajectories at window start ``t``.

    Uses trapezoidal quadrature for the window averages; windows are snapped
    to the sampling grid (no sub-step interpolation). The window on ``b``
    starts at ``t + w.delay``. Returns a value in [-1, 1]; +1 is in-phase,
    -1 anti-phase.

    Raises
    ------
    WindowRangeError
        If either window is not covered by its trajectory.
    DegenerateSignalError
        If either signal has zero variance over the window.
    """
    m, shift = _resolve_windows(a, b, w)
    i0 = a.index_at(t)
    j0 = i0 + shift
    if i0 < 0 or i0 + m >= len(a):
        raise WindowRangeError(f"window [{t}, {t + w.width}] outside trajectory {a.name!r}")
    if j0 < 0 or j0 + m >= len(b):
        raise WindowRangeError(
            f"delayed window [{t + w.delay}, {t + w.delay + w.width}] outside {b.name!r}"
        )
    wts = _trapezoid_weights(m + 1)
    val, va, vb = _weighted_pearson(
        a.values[i0 : i0 + m + 1], b.values[j0 : j0 + m + 1], wts
    )
    if math.isnan(val):
        which = a.name if va <= vb else b.name
        raise DegenerateSignalError(f"zero variance in {which!r} over the window")
    return val


def pearson_series(a: Trajectory, b: Trajectory, w: WindowSpec) -> IndicatorSeries:
    """Pearson correlation on the full sliding grid of window starts.

    Degenerate windows are flagged invalid in the mask (their stored value is
    a 0.0 placeholder), never interpolated.
    """
    m, shift = _resolve_windows(a, b, w)
    i_min = max(0, -shift)
    i_max = min(len(a) - 1 - m, len(b) - 1 - m - shift)
    if i_max < i_min:
        raise WindowRangeError("no window start fits both trajectories")
    wts = _trapezoid_weights(m + 1)
    sw = wts.sum()
    wins_a = sliding_window_view(a.values, m + 1)[i_min : i_max + 1]
    wins_b = sliding_window_view(b.values, m + 1)[i_min + shift : i_max + shift + 1]
    mean_a = wins_a @ wts / sw
    mean_b = wins_b @ wts / sw
    da = wins_a - mean_a[:, None]
    db = wins_b - mean_b[:, None]
    va = (da * da) @ wts
    vb = (db * db) @ wts
    cab = (da * db) @ wts
    ok = (va > 1e-24 * sw * np.maximum(1.0, mean_a**2)) & (
        vb > 1e-24 * sw * np.maximum(1.0, mean_b**2)
    )
    vals = np.zeros(va.shape)
    vals[ok] = cab[ok] / np.sqrt(va[ok] * vb[ok])
    if np.any(np.abs(vals) > 1.0 + PEARSON_GUARD):
        raise InternalConsistencyError("pearson series left [-1, 1] guard")
    np.clip(vals, -1.0, 1.0, out=vals)
    series = Trajectory(
        name=f"pearson({a.name},{b.name})",
        t0=a.t0 + i_min * a.dt,
        dt=a.dt,
        values=vals,
    )
    return IndicatorSeries(series.name, series, ok)


# ---------------------------------------------------------------------------
# Synchronization error and phase synchronization
# ---------------------------------------------------------------------------


def _difference_second_moments(state: GaussianState, modes, centered: bool):
    """Second moments of q- = (q_i - q_j)/sqrt(2) and the matching p-."""
    i, j = modes
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    cov = state.cov[np.ix_(idx, idx)]
    mean = state.mean[idx]
    out = []
    for k in (0, 1):  # q block then p block
        var = 0.5 * (cov[k, k] + cov[k + 2, k + 2] - 2.0 * cov[k, k + 2])
        if centered:
            out.append(var)
        else:
            m = (mean[k] - mean[k + 2]) / math.sqrt(2.0)
            out.append(var + m * m)
    return out[0], out[1]


def sync_error(state: GaussianState, modes=(0, 1), centered: bool = False) -> float:
    """Synchronization error S_c = 1 / <q_-^2 + p_-^2> for two chosen modes.

    With ``centered`` the first moments are subtracted, isolating fluctuation
    (purely quantum) contributions. The result is bounded by 1 through the
    uncertainty relation of the collective difference mode; the bound is
    verified after evaluation.
    """
    if state.n_modes < 2:
        raise ArgumentError("sync_error needs a state with at least two modes")
    q2, p2 = _difference_second_moments(state, modes, centered)
    total = q2 + p2
    if total <= 0:
        raise InternalConsistencyError("non-positive difference second moments")
    value = 1.0 / total
    if value > 1.0 + PEARSON_GUARD:
        raise InternalConsistencyError(f"sync error {value} exceeds quantum bound 1")
    return value


def sync_error_bound(state: GaussianState, modes=(0, 1), centered: bool = False) -> float:
    """Uncertainty-principle bound 1 / (2 sqrt(<q_-^2><p_-^2>)) >= S_c."""
    q2, p2 = _difference_second_moments(state, modes, centered)
    return 1.0 / (2.0 * math.sqrt(q2 * p2))


def phase_sync(amp1: complex, amp2: complex, fluct_cov: np.ndarray, r_min: float = 1.0) -> float:
    """Phase synchronization S_p from locked mean-field phases.

    ``amp1``, ``amp2`` are the complex mean amplitudes <a_j> of the two modes
    whose fluctuation covariance (4x4, ordered q1,p1,q2,p2, zero mean) is
    given. Each mode's fluctuation quadratures are rotated by minus its mean
    phase; S_p = 1 / (2 <p'_-^2>) with p'_- the rotated momentum difference.
    S_p may exceed 1 (that requires collective squeezing).

    Raises
    ------
    UndefinedPhaseError
        If either |amp| falls below ``r_min``.
    """
    r1, r2 = abs(amp1), abs(amp2)
    if r1 < r_min or r2 < r_min:
        raise UndefinedPhaseError(
            f"mean amplitude below r_min={r_min}: |a1|={r1:.3g}, |a2|={r2:.3g}"
        )
    cov = np.asarray(fluct_cov, dtype=float)
    if cov.shape != (4, 4):
        raise ArgumentError("fluctuation covariance must be 4x4 (two modes)")
    # p' = -sin(phi) q + cos(phi) p  (rotation of the annihilation op by -phi)
    vecs = []
    for k, amp in enumerate((amp1, amp2)):
        phi = math.atan2(amp.imag, amp.real)
        v = np.zeros(4)
        v[2 * k] = -math.sin(phi)
        v[2 * k + 1] = math.cos(phi)
        vecs.append(v)
    d = (vecs[0] - vecs[1]) / math.sqrt(2.0)
    p2 = float(d @ cov @ d)
    if p2 <= 0:
        raise InternalConsistencyError("non-positive rotated momentum variance")
    return 1.0 / (2.0 * p2)


# ---------------------------------------------------------------------------
# Information measures
# ---------------------------------------------------------------------------


def mutual_information(state, part_a=(0,), order: str = "von_neumann") -> float:
    """Mutual information S(A) + S(B) - S(AB) across a bipartition.

    For Gaussian states ``part_a`` lists the modes of side A (side B is the
    complement). For qubit pairs the bipartition is spin 0 | spin 1. ``order``
    selects von Neumann or Renyi-2 entropies.
    """
    if order not in ("von_neumann", "renyi2"):
        raise ArgumentError("mutual information supports von_neumann or renyi2")
    if isinstance(state, GaussianState):
        part_a = tuple(sorted(set(int(k) for k in np.atleast_1d(part_a))))
        part_b = tuple(k for k in range(state.n_modes) if k not in part_a)
        if not part_a or not part_b:
            raise ArgumentError("bipartition must be a nonempty strict split")
        sa = entropy(partial_reduce(state, part_a), order)
        sb = entropy(partial_reduce(state, part_b), order)
        return sa + sb - entropy(state, order)
    if isinstance(state, QubitPairState):
        sa = entropy(partial_reduce(state, (0,)), order)
        sb = entropy(partial_reduce(state, (1,)), order)
        return sa + sb - entropy(state, order)
    raise ArgumentError(f"unsupported state type {type(state).__name__}")


def _bloch_projectors(theta: float, phi: float):
    n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    sigma_n = np.array(
        [[n[2], n[0] - 1j * n[1]], [n[0] + 1j * n[1], -n[2]]], dtype=complex
    )
    return 0.5 * (np.eye(2) + sigma_n), 0.5 * (np.eye(2) - sigma_n)


def _conditional_entropy(rho: np.ndarray, measured: int, theta: float, phi: float) -> float:
    """Average post-measurement entropy of the unmeasured spin."""
    total = 0.0
    for proj in _bloch_projectors(theta, phi):
        big = np.kron(proj, np.eye(2)) if measured == 0 else np.kron(np.eye(2), proj)
        sub = big @ rho @ big
        p = np.trace(sub).real
        if p < 1e-14:
            continue
        cond = statecore.qubit_partial_trace(sub / p, 1 - measured)
        total += p * entropy(cond)
    return total


def qubit_discord(state: QubitPairState, measured: int = 1, grid: int = 64) -> float:
    """Quantum discord of a qubit pair with projective measurements.

    Minimizes the conditional entropy over projective measurements on the
    ``measured`` spin via a deterministic Bloch-angle grid followed by
    Nelder-Mead refinement, then returns I - J clamped at zero.
    """
    if measured not in (0, 1):
        raise ArgumentError("measured side must be 0 or 1")
    rho = state.rho
    s_meas = entropy(partial_reduce(state, (measured,)))
    s_total = entropy(state)

    thetas = np.linspace(0.0, math.pi, grid)
    phis = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    best, best_xy = math.inf, (0.0, 0.0)
    for th in thetas:
        for ph in phis:
            val = _conditional_entropy(rho, measured, th, ph)
            if val < best:
                best, best_xy = val, (th, ph)
    res = optimize.minimize(
        lambda x: _conditional_entropy(rho, measured, x[0], x[1]),
        x0=np.array(best_xy),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400},
    )
    cond_min = min(best, float(res.fun))
    discord = s_meas - s_total + cond_min
    if discord < -1e-5:
        raise InternalConsistencyError(f"discord {discord} below -1e-5")
    return max(0.0, discord)


def _f_thermal(x: float) -> float:
    """Entropy of a thermal symplectic eigenvalue in vacuum-normalized units."""
    if x <= 1.0 + 1e-12:
        return 0.0
    return ((x + 1) / 2) * math.log((x + 1) / 2) - ((x - 1) / 2) * math.log((x - 1) / 2)


def gaussian_discord(state: GaussianState, measured: int = 1) -> float:
    """Gaussian quantum discord of a two-mode state (Gaussian measurements).

    Closed form in terms of the symplectic invariants of the covariance
    matrix written in vacuum-normalized units (sigma = 2 cov): with
    a = det A, b = det B (measured mode), c = det C, d = det sigma, the
    minimal conditional one-mode determinant after a general single-mode
    Gaussian measurement on B is

        e_min = [2 c^2 + (b - 1)(d - a) + 2|c| sqrt(c^2 + (b - 1)(d - a))]
                / (b - 1)^2

    when (d - a b)^2 <= (1 + b) c^2 (a + d) (the optimum is a heterodyne-like
    isotropic measurement), and otherwise

        e_min = [a b - c^2 + d - sqrt(c^4 + (d - a b)^2 - 2 c^2 (a b + d))]
                / (2 b)

    (the optimum is an infinitely squeezed, homodyne-like measurement). The
    discord is f(sqrt(b)) - f(nu-) - f(nu+) + f(sqrt(e_min)) with f the
    thermal entropy function and nu the symplectic eigenvalues of sigma.
    Restricted to Gaussian measurements by design.
    """
    if state.n_modes != 2:
        raise ArgumentError("gaussian_discord expects a two-mode state")
    if measured not in (0, 1):
        raise ArgumentError("measured mode must be 0 or 1")
    sigma = 2.0 * state.cov
    if measured == 0:  # permute so the measured mode sits in the B block
        perm = [2, 3, 0, 1]
        sigma = sigma[np.ix_(perm, perm)]
    blk_a = sigma[:2, :2]
    blk_b = sigma[2:, 2:]
    blk_c = sigma[:2, 2:]
    if np.max(np.abs(blk_c)) < 1e-12:
        return 0.0
    a = float(np.linalg.det(blk_a))
    b = float(np.linalg.det(blk_b))
    c = float(np.linalg.det(blk_c))
    d = float(np.linalg.det(sigma))
    if b - 1.0 < 1e-12:
        # measured mode pure, hence uncorrelated with the rest
        return 0.0
    if (d - a * b) ** 2 <= (1.0 + b) * c * c * (a + d) * (1.0 + 1e-12):
        root = math.sqrt(max(c * c + (b - 1.0) * (d - a), 0.0))
        e_min = (2.0 * c * c + (b - 1.0) * (d - a) + 2.0 * abs(c) * root) / (b - 1.0) ** 2
    else:
        disc = c**4 + (d - a * b) ** 2 - 2.0 * c * c * (a * b + d)
        e_min = (a * b - c * c + d - math.sqrt(max(disc, 0.0))) / (2.0 * b)
    nus = 2.0 * symplectic_eigenvalues(state.cov)
    value = (
        _f_thermal(math.sqrt(b))
        - _f_thermal(nus[0])
        - _f_thermal(nus[1])
        + _f_thermal(math.sqrt(max(e_min, 1.0)))
    )
    return max(0.0, value)


def concurrence(state: QubitPairState) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = state.rho
    sy = np.array([[0.0, -1j], [1j, 0.0]])
    flip = np.kron(sy, sy)
    r_mat = rho @ flip @ rho.conj() @ flip
    lams = np.sqrt(np.abs(np.sort(np.linalg.eigvals(r_mat).real)[::-1]))
    return max(0.0, lams[0] - lams[1] - lams[2] - lams[3])


def log_negativity(state: GaussianState) -> float:
    """Logarithmic negativity of a two-mode Gaussian state (nats).

    Partial transposition flips the momentum of the second mode; the result
    is max(0, -ln(2 nu-)) with nu- the smallest symplectic eigenvalue of the
    transposed covariance.
    """
    if state.n_modes != 2:
        raise ArgumentError("log_negativity expects a two-mode state")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    cov_pt = flip @ state.cov @ flip
    nu_min = np.abs(np.linalg.eigvals(statecore.symplectic_form(2) @ cov_pt)).min()
    return max(0.0, -math.log(2.0 * nu_min))


def spin_z_correlator(state: QubitPairState) -> float:
    """Phase-locking correlator <sigma1+ sigma2- + sigma2+ sigma1->."""
    value = 2.0 * state.rho[1, 2].real
    return float(value)


def g2_intensity(state: GaussianState, modes=(0, 1)) -> float:
    """Normalized intensity correlation <n_a n_b> / (<n_a><n_b>).

    Fourth moments are evaluated by the Gaussian moment (Isserlis) expansion
    including mean displacements.

    Raises
    ------
    DegenerateStateError
        If either mean occupation is below 1e-9.
    """
    i, j = modes
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    cov = state.cov[np.ix_(idx, idx)]
    mean = state.mean[idx]
    alpha = (mean[0] + 1j * mean[1]) / math.sqrt(2.0)
    beta = (mean[2] + 1j * mean[3]) / math.sqrt(2.0)
    n_a_f = 0.5 * (cov[0, 0] + cov[1, 1] - 1.0)
    n_b_f = 0.5 * (cov[2, 2] + cov[3, 3] - 1.0)
    # cross-mode operator moments from the quadrature covariance
    ab = 0.5 * (cov[0, 2] - cov[1, 3] + 1j * (cov[0, 3] + cov[1, 2]))
    adag_b = 0.5 * (cov[0, 2] + cov[1, 3] + 1j * (cov[0, 3] - cov[1, 2]))
    n_a = abs(alpha) ** 2 + n_a_f
    n_b = abs(beta) ** 2 + n_b_f
    if n_a < 1e-9 or n_b < 1e-9:
        raise DegenerateStateError("vanishing mean occupation; g2 undefined")
    nanb = (
        abs(alpha) ** 2 * abs(beta) ** 2
        + abs(alpha) ** 2 * n_b_f
        + abs(beta) ** 2 * n_a_f
        + 2.0 * (alpha.conjugate() * beta.conjugate() * ab).real
        + 2.0 * (alpha.conjugate() * beta * adag_b.conjugate()).real
        + n_a_f * n_b_f
        + abs(ab) ** 2
        + abs(adag_b) ** 2
    )
    return float(nanb / (n_a * n_b))


def kuramoto_order(phases) -> tuple[float, float]:
    """Order parameter (r, psi) of a set of phases: r e^{i psi} = mean e^{i theta}."""
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ArgumentError("kuramoto_order needs at least one phase")
    z = np.mean(np.exp(1j * phases))
    return float(abs(z)), float(np.angle(z))
