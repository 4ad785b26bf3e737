import numpy as np
import pytest

from quadspin.runner.config import load_config
from quadspin.runner.trajectory import run_trajectory
from quadspin.spin import DensityMatrix, SpinNumber

ALL_SPINS = [SpinNumber(k) for k in range(1, 10)]
QUAD_SPINS = [SpinNumber(k) for k in range(2, 10)]
PRESET_SPINS = [SpinNumber(3), SpinNumber(7)]


def random_density(spin: SpinNumber, rng: np.random.Generator, rank: int = None) -> DensityMatrix:
    d = spin.dim
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, spin)


def random_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def relaxed_trajectories():
    """Full windowed runs (k = 1, 11, ..., 1001) for both presets, relaxation on."""
    return {name: run_trajectory(load_config({"preset": name})) for name in ("na23", "cs133")}
