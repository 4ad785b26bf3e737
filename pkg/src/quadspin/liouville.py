"""
Hamiltonians, quadrupolar Redfield relaxation and the equilibrium state.

Superoperators act on column-stacked (Fortran order) operators, so that
``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .spin import DensityMatrix, Matrix, SpinNumber, make_quadrupole_tensors, make_spin_operators


def vec(op: Matrix) -> np.ndarray:
    return np.asarray(op).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> Matrix:
    return np.asarray(v).reshape(dim, dim, order="F")


def left_commutator_super(a: Matrix) -> np.ndarray:
    """Matrix of ``X -> [A, X]``."""
    eye = np.eye(a.shape[0])
    return np.kron(eye, a) - np.kron(a.T, eye)


def right_commutator_super(a: Matrix) -> np.ndarray:
    """Matrix of ``X -> [X, A]``."""
    return -left_commutator_super(a)


@dataclass(frozen=True)
class RelaxationParams:
    """
    Quadrupolar relaxation inputs.

    Attributes
    ----------
    j0, j1, j2 : float
        Spectral densities ``J(p omega)`` for ``p = 0, 1, 2`` in seconds. ``J`` is
        even, so negative orders reuse these values.
    c_q : float
        Quadrupolar relaxation constant in Hz^2. It already contains the squared
        coupling ``(eQ V_zz / hbar)^2 / (2I(2I-1))^2`` and the asymmetry factor,
        which is why the ``Q(p)`` operators are dimensionless.
    omega_q : float
        Quadrupolar angular frequency in rad/s.
    """

    j0: float
    j1: float
    j2: float
    c_q: float
    omega_q: float
    label: str = "custom"

    def __post_init__(self):
        for name in ("j0", "j1", "j2", "omega_q"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValidationError(f"{name} must be positive and finite, got {val}")
        if not (math.isfinite(self.c_q) and self.c_q >= 0):
            raise ValidationError(f"c_q must be non-negative and finite, got {self.c_q}")

    def spectral_density(self, p: int) -> float:
        return (self.j0, self.j1, self.j2)[abs(p)]

    @property
    def nu_q(self) -> float:
        """Quadrupolar frequency in Hz; ``1 / nu_q`` is the twisting revival period."""
        return self.omega_q / (2 * math.pi)


NS = 1e-9

# Table values in their published units: ns, ns, ns, Hz^2, Hz.
PRESET_TABLE: dict[str, dict[str, object]] = {
    "na23": {"spin": "3/2", "j0_ns": 14, "j1_ns": 4, "j2_ns": 3.4, "c_q_hz2": 1.2e10, "nu_q_hz": 16700},
    "cs133": {"spin": "7/2", "j0_ns": 590, "j1_ns": 27, "j2_ns": 1.28, "c_q_hz2": 9.9e6, "nu_q_hz": 5970},
}


def _preset(name: str) -> tuple[SpinNumber, RelaxationParams]:
    row = PRESET_TABLE[name]
    params = RelaxationParams(
        j0=row["j0_ns"] * NS,
        j1=row["j1_ns"] * NS,
        j2=row["j2_ns"] * NS,
        c_q=row["c_q_hz2"],
        omega_q=2 * math.pi * row["nu_q_hz"],
        label=name,
    )
    return SpinNumber.parse(row["spin"]), params


PRESETS: dict[str, tuple[SpinNumber, RelaxationParams]] = {name: _preset(name) for name in PRESET_TABLE}


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``d x d`` operators stored as a ``d^2 x d^2`` matrix."""

    spin: SpinNumber
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.spin.dim**2
        if self.matrix.shape != (n, n):
            raise ValidationError(f"superoperator shape {self.matrix.shape} does not match d^2={n}")

    def __call__(self, op: Matrix) -> Matrix:
        op = np.asarray(op)
        if op.shape != (self.spin.dim, self.spin.dim):
            raise ValidationError(f"operator shape {op.shape} does not match spin {self.spin}")
        return unvec(self.matrix @ vec(op), self.spin.dim)


def lab_hamiltonian(spin: SpinNumber, omega_l: float, omega_rf: float, omega_q: float) -> Matrix:
    """Rotating-frame NMR Hamiltonian: Zeeman offset plus first-order quadrupolar term, rad/s."""
    ops = make_spin_operators(spin)
    return -(omega_l - omega_rf) * ops.Iz + (omega_q / 6) * (3 * ops.Iz @ ops.Iz - ops.Isq)


def twisting_hamiltonian(spin: SpinNumber, omega_q: float) -> Matrix:
    """One-axis twisting Hamiltonian ``(omega_q / 2) Iz^2``.

    Equal to the on-resonance :func:`lab_hamiltonian` plus ``(omega_q / 6) I(I+1)``
    times the identity, which only contributes a global phase.
    """
    iz = make_spin_operators(spin).Iz
    return (omega_q / 2) * iz @ iz


def relaxation_superoperator(spin: SpinNumber, params: RelaxationParams) -> Superoperator:
    """
    Schrodinger-picture Redfield map
    ``R[X] = -c_q sum_p (-1)^p J_|p| [[X, Q(p)], Q(-p)]``.

    Its trace-adjoint reproduces the Heisenberg rate equation
    ``d<T>/dt = -c_q sum_p (-1)^p J_p <[Q(p), [Q(-p), T]]>`` for every operator ``T``.
    """
    quad = make_quadrupole_tensors(spin)
    n = spin.dim**2
    mat = np.zeros((n, n), dtype=complex)
    for p in range(-2, 3):
        inner = right_commutator_super(quad[p])
        outer = right_commutator_super(quad[-p])
        mat += (-1) ** p * params.spectral_density(p) * (outer @ inner)
    return Superoperator(spin, -params.c_q * mat)


def equilibrium_state(spin: SpinNumber) -> DensityMatrix:
    """High-temperature equilibrium ``(Iz + I) / Tr(Iz + I)``; populations ``(I+m)/(I(2I+1))``."""
    weights = np.arange(spin.two_i, -1, -1, dtype=float)  # I + m, descending m
    total = spin.two_i * (spin.two_i + 1) / 2
    return DensityMatrix(np.diag(weights / total).astype(complex), spin)
