"""Quadrupolar spin squeezing under one-axis twisting with Redfield relaxation."""

from .errors import InvariantViolation, QuadspinError, ValidationError
from .liouville import (
    PRESETS,
    RelaxationParams,
    Superoperator,
    equilibrium_state,
    lab_hamiltonian,
    relaxation_superoperator,
    twisting_hamiltonian,
)
from .observables import (
    EquilibriumBounds,
    MacroscopicityResult,
    SqueezingResult,
    UncertaintyReport,
    equilibrium_bounds,
    macroscopicity,
    noncartesian_operators,
    squeezing,
    uncertainty_report,
)
from .propagate import Generator, TimeGrid, build_generator, paper_windows, propagate, propagate_grid
from .spin import (
    CoherentStateParams,
    DensityMatrix,
    SpinNumber,
    coherent_state,
    expectation,
    make_quadrupole_tensors,
    make_spin_operators,
    make_tensor_basis,
    variance,
)
from .wigner import WignerGrid, multipole_moments, wigner_at, wigner_grid

__version__ = "0.1.0"
