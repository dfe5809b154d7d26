"""Two detuned spins with Ising coupling under secular Born-Markov dissipation.

The pair Hamiltonian is H = w1/2 sz1 + w2/2 sz2 + lam sx1 sx2 and the bath
couples through O = asymmetry * sx1 + sx2 (asymmetry 0 is a bath attached to
the second spin only, asymmetry 1 a common bath). Jump operators are built by
numerical eigenoperator decomposition of O into Bohr-frequency sectors, which
reproduces the four-rate structure of the secular dissipator without the
analytic quasi-particle rotation angles. The Lamb shift commutes with H and
is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    ConfigError,
    DegeneracyError,
    InternalConsistencyError,
    ValidationError,
)
from .grids import SweepGrid
from .measures import WindowSpec, concurrence, mutual_information, pearson
from .statecore import QubitPairState, SpectralDensity, Trajectory, thermal_occupation

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1j], [1j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
ID2 = np.eye(2)

SX1 = np.kron(SX, ID2)
SX2 = np.kron(ID2, SX)
SZ1 = np.kron(SZ, ID2)
SZ2 = np.kron(ID2, SZ)

DEGENERACY_TOL = 1e-9
ANALYTIC_GAP_TOL = 1e-10
EVOLVED_PSD_TOL = 1e-7


@dataclass(frozen=True)
class SpinModelSpec:
    """Model parameters: spin frequencies, Ising coupling, bath."""

    omega1: float
    omega2: float
    lam: float
    asymmetry: float = 0.0
    bath: SpectralDensity = SpectralDensity(alpha=0.01, cutoff=20.0)
    temperature: float = 0.0

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValidationError("spin frequencies must be positive")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")

    def hamiltonian(self) -> np.ndarray:
        return 0.5 * self.omega1 * SZ1 + 0.5 * self.omega2 * SZ2 + self.lam * SX1 @ SX2

    def coupling_operator(self) -> np.ndarray:
        return self.asymmetry * SX1 + SX2


@dataclass(frozen=True)
class SpinSpectrum:
    """Eigensystem of the pair Hamiltonian with the quasi-particle energies.

    ``energies`` ascending, ``basis`` columns the eigenvectors. E1 > E2 > 0
    are the two positive Bohr frequencies of the bath-coupled transitions.
    """

    energies: np.ndarray
    basis: np.ndarray
    e1: float
    e2: float


@dataclass(frozen=True)
class LindbladTerm:
    """One secular dissipator term: rate times the normalized jump operator."""

    frequency: float  # Bohr frequency; positive lowers energy, negative raises
    rate: float
    operator: np.ndarray
    weight: float  # squared Frobenius norm of the unnormalized eigenoperator


def quasiparticle_energies(omega1: float, omega2: float, lam: float) -> tuple[float, float]:
    """Closed-form quasi-particle energies of the Ising-coupled pair."""
    wp, wm = omega1 + omega2, omega1 - omega2
    sp = math.sqrt(4.0 * lam * lam + wp * wp)
    sm = math.sqrt(4.0 * lam * lam + wm * wm)
    return 0.5 * (sp + sm), 0.5 * (sp - sm)


def diagonalize(spec: SpinModelSpec) -> SpinSpectrum:
    """Numerical eigendecomposition cross-checked against the closed form.

    Raises
    ------
    DegeneracyError
        If E1 and E2 coincide within 1e-9, where the secular construction
        is invalid.
    """
    h = spec.hamiltonian().real
    energies, basis = np.linalg.eigh(h)
    e1 = energies[3] - energies[1]
    e2 = energies[3] - energies[2]
    e1_ref, e2_ref = quasiparticle_energies(spec.omega1, spec.omega2, spec.lam)
    if abs(e1 - e1_ref) > ANALYTIC_GAP_TOL or abs(e2 - e2_ref) > ANALYTIC_GAP_TOL:
        raise InternalConsistencyError(
            f"numeric gaps ({e1}, {e2}) disagree with closed form ({e1_ref}, {e2_ref})"
        )
    if e1 - e2 < DEGENERACY_TOL:
        raise DegeneracyError(
            f"quasi-energies degenerate (E1-E2={e1 - e2:.3g}); secular approximation invalid"
        )
    if not e1 > e2 > 0:
        raise ValidationError(f"inadmissible spectrum E1={e1}, E2={e2}")
    return SpinSpectrum(energies=energies, basis=basis, e1=e1, e2=e2)


def secular_rates(
    spec: SpinModelSpec, spectrum: SpinSpectrum, coupling: np.ndarray | None = None
) -> list[LindbladTerm]:
    """Eigenoperator decomposition of the bath coupling into Bohr sectors.

    For each positive Bohr frequency E with nonzero weight this yields a
    lowering term with rate 2 pi J(E) (nbar + 1) w and a raising term with
    rate 2 pi J(E) nbar w, where w is the squared Frobenius norm of the
    eigenoperator and the stored jump operator is normalized. A diagonal
    (zero-frequency) sector uses the dephasing limit of the bath spectrum,
    which vanishes at T = 0 for an Ohmic bath.
    """
    op = spec.coupling_operator() if coupling is None else np.asarray(coupling)
    u = spectrum.basis
    op_eig = u.conj().T @ op @ u
    energies = spectrum.energies
    gaps = energies[None, :] - energies[:, None]  # gaps[k, l] = e_l - e_k
    terms: list[LindbladTerm] = []

    pairs = [(k, l) for k in range(4) for l in range(4)]
    buckets: dict[float, list] = {}
    for k, l in pairs:
        gap = gaps[k, l]
        if gap < -DEGENERACY_TOL:
            continue  # raising terms are generated from their lowering partner
        key = 0.0 if abs(gap) <= DEGENERACY_TOL else gap
        for existing in buckets:
            if abs(existing - key) <= DEGENERACY_TOL:
                key = existing
                break
        buckets.setdefault(key, []).append((k, l))

    for freq in sorted(buckets):
        a_eig = np.zeros((4, 4), dtype=complex)
        for k, l in buckets[freq]:
            a_eig[k, l] = op_eig[k, l]
        weight = float(np.sum(np.abs(a_eig) ** 2))
        if weight < 1e-14:
            continue
        a_op = u @ (a_eig / math.sqrt(weight)) @ u.conj().T
        if freq == 0.0:
            rate = 2.0 * math.pi * spec.bath.zero_frequency_weight(spec.temperature) * weight
            if rate > 0:
                terms.append(LindbladTerm(0.0, rate, a_op, weight))
            continue
        nbar = thermal_occupation(freq, spec.temperature)
        base = 2.0 * math.pi * spec.bath.j(freq) * weight
        terms.append(LindbladTerm(freq, base * (nbar + 1.0), a_op, weight))
        if nbar > 0:
            terms.append(LindbladTerm(-freq, base * nbar, a_op.conj().T, weight))
    return terms


def liouvillian(spec: SpinModelSpec, coupling: np.ndarray | None = None) -> np.ndarray:
    """16x16 generator of the secular master equation (row-major vec)."""
    spectrum = diagonalize(spec)
    terms = secular_rates(spec, spectrum, coupling)
    h = spec.hamiltonian().astype(complex)
    eye = np.eye(4)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for term in terms:
        a_op = term.operator
        adag_a = a_op.conj().T @ a_op
        gen += term.rate * (
            np.kron(a_op, a_op.conj())
            - 0.5 * (np.kron(adag_a, eye) + np.kron(eye, adag_a.T))
        )
    return gen


def max_rate(terms) -> float:
    return max((t.rate for t in terms), default=0.0)


def _taylor4(m: np.ndarray) -> np.ndarray:
    eye = np.eye(m.shape[0], dtype=m.dtype)
    out = eye + m / 4.0
    out = eye + (m / 3.0) @ out
    out = eye + (m / 2.0) @ out
    return eye + m @ out


def _check_step(spec: SpinModelSpec, dt: float, spectrum, terms) -> None:
    scale = max(spectrum.e1, max_rate(terms))
    if dt * scale >= 0.05:
        raise ConfigError(
            f"step dt={dt} too large: dt * max(E1, rates) = {dt * scale:.3g} >= 0.05"
        )


def evolve_rho(
    rho0: QubitPairState,
    spec: SpinModelSpec,
    times,
    coupling: np.ndarray | None = None,
) -> list[QubitPairState]:
    """RK4 integration of the secular master equation on a uniform grid.

    For this linear autonomous equation the four-stage RK4 update equals the
    degree-4 Taylor polynomial of exp(dt L) applied per step; states are
    validated with the looser positivity tolerance 1e-7 that the integrator
    guarantees.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ArgumentError("need at least two time points")
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0.0):
        raise ArgumentError("time grid must be uniform")
    spectrum = diagonalize(spec)
    terms = secular_rates(spec, spectrum, coupling)
    _check_step(spec, dt, spectrum, terms)
    gen = liouvillian(spec, coupling)
    step = _taylor4(dt * gen)
    vec = rho0.rho.ravel().astype(complex)
    states = [rho0]
    for _ in range(times.size - 1):
        vec = step @ vec
        rho = vec.reshape(4, 4)
        rho = 0.5 * (rho + rho.conj().T)
        states.append(QubitPairState(rho, eig_tol=EVOLVED_PSD_TOL))
    return states


@dataclass(frozen=True)
class LocalOperatorCoeffs:
    """Coefficients of a single-spin observable a_x sx + a_y sy + a_z sz + a_d I."""

    a_x: float = 0.0
    a_y: float = 0.0
    a_z: float = 0.0
    a_d: float = 0.0

    def matrix(self, site: int) -> np.ndarray:
        local = self.a_x * SX + self.a_y * SY + self.a_z * SZ + self.a_d * ID2
        if site == 0:
            return np.kron(local, ID2)
        if site == 1:
            return np.kron(ID2, local)
        raise ArgumentError("site must be 0 or 1")


def observable_traj(states, site: int, coeffs: LocalOperatorCoeffs, times) -> Trajectory:
    """Expectation trajectory of a local observable along evolved states."""
    times = np.asarray(times, dtype=float)
    if len(states) != times.size:
        raise ArgumentError("states and times must have equal length")
    op = coeffs.matrix(site)
    vals = np.empty(times.size)
    for k, state in enumerate(states):
        v = np.einsum("ij,ji->", state.rho, op)
        if abs(v.imag) > 1e-10:
            raise InternalConsistencyError(f"observable acquired imaginary part {v.imag:.3g}")
        vals[k] = v.real
    dt = times[1] - times[0] if times.size > 1 else 1.0
    return Trajectory(name=f"site{site}_obs", t0=times[0], dt=dt, values=vals)


# ---------------------------------------------------------------------------
# Synchronization diagram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpinDiagramScenario:
    """Sweep of (omega2, lambda) producing the indicator layers C, Z_I, MI, E.

    C is the Pearson correlation of <sx1> and <sx2> at ``t_pearson`` over
    ``window``; Z_I integrates the phase-locking correlator up to
    ``z_horizon``; MI and concurrence are evaluated at ``t_corr``.
    """

    omega1: float = 1.0
    omega2_values: tuple = tuple(np.linspace(0.7, 1.3, 20))
    lambda_values: tuple = tuple(np.linspace(0.01, 0.2, 20))
    asymmetry: float = 0.0
    alpha: float = 0.01
    cutoff: float = 20.0
    temperature: float = 0.0
    t_pearson: float = 75.0
    window: float = 10.0
    t_corr: float = 80.0
    z_horizon: float = 100.0
    dt: float = 0.01
    sample_dt: float = 0.05
    coupling_channel: str = "x"

    def spec_for(self, omega2: float, lam: float) -> SpinModelSpec:
        return SpinModelSpec(
            omega1=self.omega1,
            omega2=omega2,
            lam=lam,
            asymmetry=self.asymmetry,
            bath=SpectralDensity(alpha=self.alpha, cutoff=self.cutoff),
            temperature=self.temperature,
        )

    def coupling_for(self, spec: SpinModelSpec) -> np.ndarray:
        if self.coupling_channel == "x":
            return spec.coupling_operator()
        if self.coupling_channel == "z":
            return self.asymmetry * SZ1 + SZ2
        raise ValidationError("coupling_channel must be 'x' or 'z'")


DIAGRAM_LAYERS = ("C", "Z_I", "MI", "E")


def diagram_cell(scn: SpinDiagramScenario, omega2: float, lam: float) -> dict:
    """Evolve one cell and extract all diagram layers.

    Raises DegeneracyError for inadmissible cells; callers flag and continue.
    """
    spec = scn.spec_for(omega2, lam)
    spectrum = diagonalize(spec)
    coupling = scn.coupling_for(spec)
    terms = secular_rates(spec, spectrum, coupling)
    _check_step(spec, scn.dt, spectrum, terms)
    marginal = spectrum.e1 - spectrum.e2 < 10.0 * max_rate(terms)

    gen = liouvillian(spec, coupling)
    step = _taylor4(scn.dt * gen)
    stride = int(round(scn.sample_dt / scn.dt))
    t_final = max(scn.t_pearson + scn.window, scn.z_horizon, scn.t_corr)
    n_steps = int(round(t_final / scn.dt))
    sx1_vec = SX1.T.astype(complex).ravel()  # Tr(O rho) = vec(O^T) . vec(rho)
    sx2_vec = SX2.T.astype(complex).ravel()

    vec = QubitPairState.plus_plus().rho.ravel().astype(complex)
    n_samples = n_steps // stride + 1
    sx1 = np.empty(n_samples)
    sx2 = np.empty(n_samples)
    zvals = np.empty(n_samples)
    k_corr = int(round(scn.t_corr / scn.sample_dt))
    rho_corr = None
    k = 0
    for step_idx in range(n_steps + 1):
        if step_idx % stride == 0:
            rho = vec.reshape(4, 4)
            sx1[k] = (sx1_vec @ vec).real
            sx2[k] = (sx2_vec @ vec).real
            zvals[k] = 2.0 * rho[1, 2].real
            if k == k_corr:
                rho_corr = 0.5 * (rho + rho.conj().T)
            k += 1
        if step_idx == n_steps:
            break
        vec = step @ vec
    tr = vec.reshape(4, 4).trace().real
    if abs(tr - 1.0) > 1e-7:
        raise InternalConsistencyError(f"trace drifted to {tr}")

    traj1 = Trajectory("sx1", 0.0, scn.sample_dt, sx1)
    traj2 = Trajectory("sx2", 0.0, scn.sample_dt, sx2)
    c_val = pearson(traj1, traj2, WindowSpec(width=scn.window), scn.t_pearson)
    n_z = int(round(scn.z_horizon / scn.sample_dt))
    z_int = float(np.trapezoid(zvals[: n_z + 1], dx=scn.sample_dt))
    state_corr = QubitPairState(rho_corr, eig_tol=EVOLVED_PSD_TOL)
    return {
        "C": c_val,
        "Z_I": z_int,
        "MI": mutual_information(state_corr),
        "E": concurrence(state_corr),
        "_marginal": marginal,
    }


def diagram(scn: SpinDiagramScenario) -> SweepGrid:
    """Full synchronization diagram; degenerate cells are flagged, not fatal."""
    grid = SweepGrid.empty(
        "omega2",
        "lambda",
        scn.omega2_values,
        scn.lambda_values,
        DIAGRAM_LAYERS,
        meta={
            "asymmetry": scn.asymmetry,
            "t_pearson": scn.t_pearson,
            "window": scn.window,
            "t_corr": scn.t_corr,
            "z_horizon": scn.z_horizon,
        },
    )
    for i, omega2 in enumerate(grid.values1):
        for j, lam in enumerate(grid.values2):
            try:
                cell = diagram_cell(scn, omega2, lam)
            except DegeneracyError:
                grid.set_cell(i, j, {}, status="degenerate")
                continue
            except Exception as exc:
                grid.set_cell(i, j, {}, status=f"error: {exc}")
                continue
            marginal = cell.pop("_marginal")
            grid.set_cell(i, j, cell, status="secular-marginal" if marginal else "ok")
    return grid
