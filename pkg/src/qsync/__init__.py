"""Open-quantum-system synchronization models and measure cross-comparison.

Three dynamical families (dissipative harmonic networks, coupled
optomechanical units, Ising-coupled spin pairs) plus a classical Kuramoto
baseline, with every synchronization indicator and correlation quantifier
needed to compare them: windowed Pearson correlation, synchronization error,
phase synchronization, mutual information, quantum discord, concurrence,
logarithmic negativity, intensity correlations and the spin phase-locking
correlator.
"""

__version__ = "0.1.0"

from .statecore import (
    GaussianState,
    QubitPairState,
    SpectralDensity,
    Trajectory,
    entropy,
    partial_reduce,
    purity,
    symplectic_eigenvalues,
)
from .measures import (
    IndicatorSeries,
    WindowSpec,
    concurrence,
    g2_intensity,
    gaussian_discord,
    kuramoto_order,
    log_negativity,
    mutual_information,
    pearson,
    pearson_series,
    phase_sync,
    qubit_discord,
    spin_z_correlator,
    sync_error,
    sync_error_bound,
)

__all__ = [
    "GaussianState",
    "QubitPairState",
    "SpectralDensity",
    "Trajectory",
    "IndicatorSeries",
    "WindowSpec",
    "entropy",
    "partial_reduce",
    "purity",
    "symplectic_eigenvalues",
    "concurrence",
    "g2_intensity",
    "gaussian_discord",
    "kuramoto_order",
    "log_negativity",
    "mutual_information",
    "pearson",
    "pearson_series",
    "phase_sync",
    "qubit_discord",
    "spin_z_correlator",
    "sync_error",
    "sync_error_bound",
]
