import time
from types import SimpleNamespace

import numpy as np
import pytest

from qsync import kuramoto, linear_osc, optomech, spins

SPIN_W2_GRID = tuple(np.linspace(0.7, 1.3, 20))
SPIN_LAM_GRID = tuple(np.linspace(0.01, 0.2, 20))
TONGUE_W2_GRID = tuple(np.linspace(0.5, 1.5, 21))
TONGUE_LAM_GRID = tuple(np.linspace(0.0, 0.3, 13))


@pytest.fixture(scope="session")
def fig_sync_bundle():
    spec = optomech.OptomechSpec.figure_sync()
    start = time.perf_counter()
    run = optomech.co_integrate(spec, 1500.0)
    wall = time.perf_counter() - start
    indicators = optomech.indicator_suite(run)
    return SimpleNamespace(run=run, indicators=indicators, wall=wall)


@pytest.fixture(scope="session")
def fig_detuned_bundle():
    spec = optomech.OptomechSpec.figure_detuned()
    start = time.perf_counter()
    run = optomech.co_integrate(spec, 1500.0)
    wall = time.perf_counter() - start
    indicators = optomech.indicator_suite(run)
    return SimpleNamespace(run=run, indicators=indicators, wall=wall)


@pytest.fixture(scope="session")
def spin_local_grid():
    scn = spins.SpinDiagramScenario(
        asymmetry=0.0, omega2_values=SPIN_W2_GRID, lambda_values=SPIN_LAM_GRID
    )
    return spins.diagram(scn)


@pytest.fixture(scope="session")
def spin_common_grid():
    scn = spins.SpinDiagramScenario(
        asymmetry=1.0, omega2_values=SPIN_W2_GRID, lambda_values=SPIN_LAM_GRID
    )
    return spins.diagram(scn)


@pytest.fixture(scope="session")
def tongue_grids():
    out = {}
    for bath in ("common", "separate"):
        scn = linear_osc.TongueScenario(
            bath=bath, omega2_values=TONGUE_W2_GRID, lambda_values=TONGUE_LAM_GRID
        )
        out[bath] = linear_osc.tongue_diagram(scn)
    return out


@pytest.fixture(scope="session")
def kuramoto_kc_bundle():
    base = kuramoto.KuramotoSpec(
        n=2000,
        frequencies=kuramoto.LorentzianFreqs(center=1.0, gamma=0.5),
        coupling=0.0,
        noise=0.0,
        dt=0.02,
        t_final=100.0,
        seed=42,
    )
    start = time.perf_counter()
    estimate = kuramoto.estimate_kc(base, np.arange(0.2, 2.01, 0.15))
    wall = time.perf_counter() - start
    return SimpleNamespace(estimate=estimate, wall=wall)
