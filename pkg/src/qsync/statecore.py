"""State representations, validation, entropies and reductions.

Conventions used throughout the package:

* hbar = 1 and oscillator masses are scaled to 1.
* Dimensionless quadratures q = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2),
  so each vacuum quadrature variance equals 1/2.
* Gaussian mean vectors and covariance matrices are ordered
  (q1, p1, q2, p2, ...), i.e. mode-interleaved.
* Spin pairs live in the product basis (up-up, up-down, down-up, down-down).
* All entropies are reported in nats.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import InitVar, dataclass

import numpy as np

from .errors import ArgumentError, ValidationError

SYMMETRY_TOL = 1e-10
UNCERTAINTY_TOL = 1e-9
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9

VACUUM_VARIANCE = 0.5


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for (q1, p1, ..., qN, pN) ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix.

    Returns the moduli of the eigenvalues of i*Omega*cov, each listed once,
    sorted in descending order. For a physical state every value is >= 1/2.

    Raises
    ------
    ValidationError
        If ``cov`` is not symmetric (tolerance 1e-10) or not square/even.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValidationError(f"covariance must be 2N x 2N, got {cov.shape}")
    if not np.allclose(cov, cov.T, atol=SYMMETRY_TOL, rtol=0.0):
        raise ValidationError("covariance matrix is not symmetric")
    n = cov.shape[0] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ cov)
    # eigenvalues come in +/- i*nu pairs; moduli list every nu twice
    moduli = np.sort(np.abs(eigs))[::-1]
    return moduli[::2]


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state of N bosonic modes: first moments plus covariance.

    ``mean`` has length 2N ordered (q1, p1, ..., qN, pN); ``cov`` is the
    symmetric 2N x 2N covariance matrix of the same quadratures. Vacuum has
    mean zero and cov = I/2.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ValidationError(
                f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}"
            )
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(cov)):
            raise ValidationError("non-finite entries in state")
        nus = symplectic_eigenvalues(cov)
        if nus.min() < VACUUM_VARIANCE - UNCERTAINTY_TOL:
            raise ValidationError(
                f"uncertainty relation violated: min symplectic eigenvalue {nus.min():.12g}"
            )
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n_modes: int = 1) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))

    @classmethod
    def thermal(cls, nbar: float, n_modes: int = 1) -> "GaussianState":
        """Product of identical thermal modes with occupation ``nbar``."""
        if nbar < 0:
            raise ArgumentError("nbar must be >= 0")
        return cls(np.zeros(2 * n_modes), (nbar + VACUUM_VARIANCE) * np.eye(2 * n_modes))

    @classmethod
    def squeezed_vacuum(cls, r: float, angle: float = 0.0) -> "GaussianState":
        """Single-mode squeezed vacuum; ``angle`` = 0 squeezes q."""
        c, s = math.cos(2 * angle), math.sin(2 * angle)
        rot = np.array([[c, s], [s, -c]])
        cov = VACUUM_VARIANCE * (math.cosh(2 * r) * np.eye(2) - math.sinh(2 * r) * rot)
        return cls(np.zeros(2), cov)

    @classmethod
    def two_mode_squeezed(cls, r: float) -> "GaussianState":
        """Two-mode squeezed vacuum in standard form."""
        ch, sh = math.cosh(2 * r), math.sinh(2 * r)
        a = VACUUM_VARIANCE * ch * np.eye(2)
        c = VACUUM_VARIANCE * sh * np.diag([1.0, -1.0])
        cov = np.block([[a, c], [c, a]])
        return cls(np.zeros(4), cov)

    def mode_block(self, modes) -> np.ndarray:
        """Quadrature index array for the given mode indices (0-based)."""
        modes = np.atleast_1d(np.asarray(modes, dtype=int))
        return np.concatenate([(2 * modes)[:, None], (2 * modes + 1)[:, None]], axis=1).ravel()


@dataclass(frozen=True)
class QubitPairState:
    """Two-qubit density matrix in the basis (uu, ud, du, dd).

    ``eig_tol`` loosens the positivity check for states produced by numerical
    integration, which preserve positivity only to integrator accuracy.
    """

    rho: np.ndarray
    eig_tol: InitVar[float] = PSD_TOL

    def __post_init__(self, eig_tol):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValidationError("non-finite entries in density matrix")
        if not np.allclose(rho, rho.conj().T, atol=HERMITICITY_TOL, rtol=0.0):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr:.12g} differs from 1")
        evs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evs.min() < -eig_tol:
            raise ValidationError(f"negative eigenvalue {evs.min():.3g}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, ket) -> "QubitPairState":
        ket = np.asarray(ket, dtype=complex).ravel()
        if ket.size != 4:
            raise ArgumentError("ket must have 4 amplitudes")
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def product(cls, ket1, ket2) -> "QubitPairState":
        return cls.from_ket(np.kron(np.asarray(ket1, complex), np.asarray(ket2, complex)))

    @classmethod
    def bell_phi_plus(cls) -> "QubitPairState":
        return cls.from_ket([1.0, 0.0, 0.0, 1.0])

    @classmethod
    def maximally_mixed(cls) -> "QubitPairState":
        return cls(0.25 * np.eye(4))

    @classmethod
    def plus_plus(cls) -> "QubitPairState":
        """Both spins along +x, the default initial state of the spin model."""
        return cls.product([1.0, 1.0], [1.0, 1.0])


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled time series of a named real observable."""

    name: str
    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if values.ndim != 1 or values.size == 0:
            raise ValidationError("values must be a nonempty vector")
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"non-finite samples in trajectory {self.name!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    def index_at(self, t: float) -> int:
        """Nearest grid index to time ``t`` (windows are grid-aligned)."""
        return int(round((t - self.t0) / self.dt))

    def to_csv(self, path) -> None:
        write_csv(path, ["t", "value"], zip(self.times, self.values))


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic bath spectral density with exponential cutoff.

    J(w) = alpha * w * exp(-w / cutoff) for w >= 0.
    """

    alpha: float
    cutoff: float
    kind: str = "ohmic"
    cutoff_shape: str = "exponential"

    def __post_init__(self):
        if self.kind != "ohmic":
            raise ValidationError(f"unsupported spectral density kind {self.kind!r}")
        if self.cutoff_shape != "exponential":
            raise ValidationError(f"unsupported cutoff shape {self.cutoff_shape!r}")
        if self.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if self.cutoff <= 0:
            raise ValidationError("cutoff must be > 0")

    def j(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0):
            raise ArgumentError("spectral density evaluated at negative frequency")
        out = self.alpha * omega * np.exp(-omega / self.cutoff)
        return float(out) if out.ndim == 0 else out

    def zero_frequency_weight(self, temperature: float) -> float:
        """lim_{w->0+} J(w) * (2 nbar(w) + 1), the dephasing-sector weight."""
        return 2.0 * self.alpha * max(temperature, 0.0)


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation nbar(omega, T) with k_B = 1."""
    if omega <= 0:
        raise ArgumentError("occupation defined for positive frequency")
    if temperature <= 0:
        return 0.0
    x = omega / temperature
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


# ---------------------------------------------------------------------------
# Entropies and purity
# ---------------------------------------------------------------------------

ENTROPY_ORDERS = ("von_neumann", "renyi2", "linear")


def _g_thermal(nu: np.ndarray) -> np.ndarray:
    """Entropy contribution of one symplectic eigenvalue (vacuum units 1/2)."""
    nu = np.asarray(nu, dtype=float)
    plus = nu + 0.5
    minus = np.clip(nu - 0.5, 0.0, None)
    out = plus * np.log(plus)
    mask = minus > 0
    out[mask] -= minus[mask] * np.log(minus[mask])
    return out


def _dm_eigenvalues(rho: np.ndarray) -> np.ndarray:
    evs = np.linalg.eigvalsh(np.asarray(rho))
    return np.clip(evs, 0.0, None)


def purity(state) -> float:
    """Tr rho^2; for Gaussian states 1/sqrt(det(2 cov))."""
    if isinstance(state, GaussianState):
        return 1.0 / math.sqrt(np.linalg.det(2.0 * state.cov))
    rho = state.rho if isinstance(state, QubitPairState) else np.asarray(state)
    return float(np.sum(np.abs(rho) ** 2))


def entropy(state, order: str = "von_neumann") -> float:
    """Entropy of a Gaussian state, a QubitPairState, or a raw density matrix.

    ``order`` selects von Neumann (nats), Renyi-2, or linear entropy
    1 - Tr rho^2.
    """
    if order not in ENTROPY_ORDERS:
        raise ArgumentError(f"unknown entropy order {order!r}")
    if isinstance(state, GaussianState):
        if order == "von_neumann":
            return float(np.sum(_g_thermal(symplectic_eigenvalues(state.cov))))
        det2 = np.linalg.det(2.0 * state.cov)
        if order == "renyi2":
            return 0.5 * math.log(det2)
        return 1.0 - 1.0 / math.sqrt(det2)
    rho = state.rho if isinstance(state, QubitPairState) else np.asarray(state)
    evs = _dm_eigenvalues(rho)
    if order == "von_neumann":
        pos = evs[evs > 1e-300]
        return float(-np.sum(pos * np.log(pos)))
    p2 = float(np.sum(evs**2))
    if order == "renyi2":
        return -math.log(p2)
    return 1.0 - p2


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------


def partial_reduce(state, keep):
    """Reduced state on the subsystems listed in ``keep`` (0-based indices).

    Gaussian states return a smaller GaussianState. Qubit pairs return the
    2x2 reduced density matrix of the kept spin.
    """
    keep = tuple(sorted(set(int(k) for k in np.atleast_1d(keep))))
    if isinstance(state, GaussianState):
        n = state.n_modes
        if not keep or len(keep) >= n or any(k < 0 or k >= n for k in keep):
            raise ArgumentError(f"keep must be a nonempty strict subset of 0..{n - 1}")
        idx = state.mode_block(keep)
        return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])
    if isinstance(state, QubitPairState):
        if keep not in ((0,), (1,)):
            raise ArgumentError("keep must be (0,) or (1,) for a qubit pair")
        rho = state.rho.reshape(2, 2, 2, 2)
        if keep == (0,):
            return np.trace(rho, axis1=1, axis2=3)
        return np.trace(rho, axis1=0, axis2=2)
    raise ArgumentError(f"unsupported state type {type(state).__name__}")


def qubit_partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Partial trace of a raw 4x4 two-qubit matrix, keeping spin ``keep``."""
    rho = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.trace(rho, axis1=1, axis2=3)
    if keep == 1:
        return np.trace(rho, axis1=0, axis2=2)
    raise ArgumentError("keep must be 0 or 1")


# ---------------------------------------------------------------------------
# State snapshot files
# ---------------------------------------------------------------------------


def write_csv(path, header, rows) -> None:
    """Write a CSV atomically: comma separated, '.' decimal, LF, UTF-8."""
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
    os.replace(tmp, path)


def _format_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def save_state_csv(state, path) -> None:
    """Snapshot a state to CSV.

    Gaussian: columns kind, n_modes, mean entries, then row-major covariance.
    Qubit pair: columns kind, then (re, im) pairs of the 16 row-major entries.
    """
    if isinstance(state, GaussianState):
        n = state.n_modes
        header = ["kind", "n_modes"]
        header += [f"mean_{i}" for i in range(2 * n)]
        header += [f"cov_{i}_{j}" for i in range(2 * n) for j in range(2 * n)]
        row = ["gaussian", n, *state.mean, *state.cov.ravel()]
        write_csv(path, header, [row])
    elif isinstance(state, QubitPairState):
        header = ["kind"]
        for i in range(4):
            for j in range(4):
                header += [f"rho_{i}_{j}_re", f"rho_{i}_{j}_im"]
        row = ["qubit_pair"]
        for v in state.rho.ravel():
            row += [v.real, v.imag]
        write_csv(path, header, [row])
    else:
        raise ArgumentError(f"unsupported state type {type(state).__name__}")


def load_state_csv(path):
    """Inverse of :func:`save_state_csv`; the loaded state is re-validated."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        row = next(reader)
    kind = row[header.index("kind")]
    if kind == "gaussian":
        n = int(row[header.index("n_modes")])
        vals = [float(x) for x in row[2:]]
        mean = np.array(vals[: 2 * n])
        cov = np.array(vals[2 * n :]).reshape(2 * n, 2 * n)
        return GaussianState(mean, cov)
    if kind == "qubit_pair":
        vals = [float(x) for x in row[1:]]
        flat = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
        return QubitPairState(flat.reshape(4, 4))
    raise ValidationError(f"unknown state kind {kind!r}")
