"""
Single-spin operator algebra.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)`` with
``d = 2I + 1``. Rows and columns follow the Zeeman ladder in descending
magnetic quantum number, ``|I, I>, |I, I-1>, ..., |I, -I>``. Units use
hbar = 1, so angular-momentum operators are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import numpy as np
from numpy.typing import NDArray

from .errors import InvariantViolation, ValidationError

Matrix = NDArray[np.complex128]


@dataclass(frozen=True, order=True)
class SpinNumber:
    """Spin quantum number stored as the integer ``2I``."""

    two_i: int

    def __post_init__(self):
        if not isinstance(self.two_i, (int, np.integer)) or isinstance(self.two_i, bool):
            raise ValidationError(f"two_i must be an integer, got {self.two_i!r}")
        if self.two_i < 1:
            raise ValidationError(f"spin must be at least 1/2 (two_i >= 1), got two_i={self.two_i}")
        object.__setattr__(self, "two_i", int(self.two_i))

    @classmethod
    def parse(cls, value: Union[str, float, Fraction, "SpinNumber"]) -> "SpinNumber":
        """Build from ``"7/2"``, ``3.5``, ``Fraction(7, 2)`` or an existing instance."""
        if isinstance(value, SpinNumber):
            return value
        try:
            frac = Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse spin value {value!r}") from exc
        twice = 2 * frac
        if twice.denominator != 1:
            raise ValidationError(f"spin must be an integer or half-integer, got {value!r}")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.two_i / 2

    @property
    def dim(self) -> int:
        return self.two_i + 1

    def dimension(self) -> int:
        return self.dim

    def m_values(self) -> NDArray[np.float64]:
        """Magnetic quantum numbers in basis order (descending)."""
        return self.value - np.arange(self.dim)

    def __str__(self) -> str:
        return f"{self.two_i}/2" if self.two_i % 2 else str(self.two_i // 2)


class SpinOperators(NamedTuple):
    Ix: Matrix
    Iy: Matrix
    Iz: Matrix
    Iplus: Matrix
    Iminus: Matrix
    Isq: Matrix


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Validated spin state: Hermitian and unit trace within ``tol``, positive
    semidefinite within ``psd_tol`` (defaults to ``tol``).
    """

    matrix: Matrix
    spin: SpinNumber
    tol: float = 1e-10
    psd_tol: Optional[float] = None

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = self.spin.dim
        if mat.shape != (d, d):
            raise ValidationError(f"density matrix shape {mat.shape} does not match spin {self.spin} (d={d})")
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > self.tol:
            raise InvariantViolation(f"density matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        trace_err = abs(np.trace(mat) - 1.0)
        if trace_err > self.tol:
            raise InvariantViolation(f"density matrix trace deviates from 1 by {trace_err:.3e}")
        lowest = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
        if lowest < -(self.tol if self.psd_tol is None else self.psd_tol):
            raise InvariantViolation(f"density matrix has negative eigenvalue {lowest:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def fidelity(self, other: "DensityMatrix") -> float:
        """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

        When either state is pure this reduces to ``Tr(rho sigma)``, which is
        used directly; the square roots of roundoff-level eigenvalues would
        otherwise cost about eight digits.
        """
        if self.purity() > 1 - 1e-12 or other.purity() > 1 - 1e-12:
            return float(np.real(np.sum(self.matrix * other.matrix.T)))
        w, v = np.linalg.eigh(self.matrix)
        sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
        inner = sqrt_rho @ other.matrix @ sqrt_rho
        ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
        return float(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2)


@dataclass(frozen=True)
class CoherentStateParams:
    theta: float = math.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValidationError(f"theta must lie in [0, pi], got {self.theta}")
        if not math.isfinite(self.phi):
            raise ValidationError(f"phi must be finite, got {self.phi}")


def _matrix_of(rho) -> Matrix:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def make_spin_operators(spin: SpinNumber) -> SpinOperators:
    """Cartesian, ladder and Casimir operators for ``spin``."""
    m = spin.m_values()
    j = spin.value
    # <m+1|I+|m> sits just above the diagonal in descending-m order
    ladder = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    iplus = np.diag(ladder.astype(complex), k=1)
    iminus = iplus.conj().T
    iz = np.diag(m.astype(complex))
    ix = (iplus + iminus) / 2
    iy = (iplus - iminus) / 2j
    isq = j * (j + 1) * np.eye(spin.dim, dtype=complex)
    return SpinOperators(ix, iy, iz, iplus, iminus, isq)


def make_tensor_basis(spin: SpinNumber) -> dict[tuple[int, int], Matrix]:
    """
    Trace-orthonormal irreducible tensor operators ``T_{l,m}``.

    Each rank starts from ``T_{l,l} = (-1)^l N (I+)^l`` and is lowered with
    ``[I-, T_{l,m}] = sqrt((l+m)(l-m+1)) T_{l,m-1}``. The phase choice gives
    ``T_{1,0}`` proportional to ``+Iz`` and ``T_{l,m}^dag = (-1)^m T_{l,-m}``,
    the convention paired with standard spherical harmonics in :mod:`quadspin.wigner`.

    Returns
    -------
    dict
        Keys ``(l, m)`` for ``l = 0..2I`` and ``m = -l..l``, in that order.
    """
    ops = make_spin_operators(spin)
    basis: dict[tuple[int, int], Matrix] = {}
    for rank in range(spin.two_i + 1):
        top = (-1) ** rank * np.linalg.matrix_power(ops.Iplus, rank)
        top = top / np.linalg.norm(top)
        chain = {rank: top}
        current = top
        for order in range(rank, -rank, -1):
            lowered = commutator(ops.Iminus, current) / math.sqrt((rank + order) * (rank - order + 1))
            # renormalize to suppress drift over long chains
            current = lowered / np.linalg.norm(lowered)
            chain[order - 1] = current
        for order in range(-rank, rank + 1):
            basis[(rank, order)] = chain[order]
    return basis


def make_quadrupole_tensors(spin: SpinNumber) -> dict[int, Matrix]:
    """
    Dimensionless rank-2 quadrupolar operators ``Q(p)``, ``p = -2..2``.

    The prefactor ``eQ / (2I(2I-1))`` is left out; it is already folded into
    the relaxation constant ``c_q`` (see :class:`quadspin.liouville.RelaxationParams`).
    """
    if spin.two_i < 2:
        raise ValidationError(f"spin {spin} has no quadrupole coupling (requires I >= 1)")
    ops = make_spin_operators(spin)
    c = math.sqrt(6) / 2
    ip, im, iz = ops.Iplus, ops.Iminus, ops.Iz
    return {
        -2: c * im @ im,
        -1: c * (iz @ im + im @ iz),
        0: 3 * iz @ iz - ops.Isq,
        1: -c * (iz @ ip + ip @ iz),
        2: c * ip @ ip,
    }


def coherent_state(spin: SpinNumber, params: CoherentStateParams = CoherentStateParams()) -> DensityMatrix:
    """
    Spin coherent state ``|zeta(theta, phi)>`` with ``zeta = tan(theta/2) exp(-i phi)``.

    ``theta = 0`` is the reference state ``|I, -I>``. The amplitudes are
    evaluated as ``sin(theta/2)^(I+m) cos(theta/2)^(I-m) exp(-i(I+m)phi)``
    times the binomial root, which equals the ``zeta`` form for ``theta < pi``
    and gives the limiting state ``|I, I>`` at ``theta = pi`` directly.
    """
    half = params.theta / 2
    s, c = math.sin(half), math.cos(half)
    if params.theta == math.pi:
        c = 0.0
    amps = np.zeros(spin.dim, dtype=complex)
    for idx in range(spin.dim):
        k = spin.two_i - idx  # I + m
        amps[idx] = (
            math.sqrt(math.comb(spin.two_i, k))
            * s**k
            * c ** (spin.two_i - k)
            * np.exp(-1j * k * params.phi)
        )
    amps /= np.linalg.norm(amps)
    return DensityMatrix(np.outer(amps, amps.conj()), spin)


def expectation(rho, op: Matrix) -> complex:
    """``Tr(rho O)``."""
    mat = _matrix_of(rho)
    op = np.asarray(op)
    if mat.shape != op.shape:
        raise ValidationError(f"dimension mismatch: state {mat.shape} vs operator {op.shape}")
    return complex(np.einsum("ij,ji->", mat, op))


def real_expectation(rho, op: Matrix, tol: float = 1e-10) -> float:
    """Expectation of a Hermitian operator; the imaginary residue must stay below ``tol``."""
    val = expectation(rho, op)
    if abs(val.imag) > tol:
        raise InvariantViolation(f"expectation of Hermitian operator has imaginary part {val.imag:.3e}")
    return val.real


def is_hermitian(op: Matrix, tol: float = 1e-10) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) <= tol)


def variance(rho, op: Matrix, tol: float = 1e-10) -> float:
    """``<O^2> - <O>^2`` for Hermitian ``O``; roundoff negatives down to ``-tol`` clamp to 0."""
    if not is_hermitian(op, tol):
        raise ValidationError("variance requires a Hermitian operator")
    mean = real_expectation(rho, op, tol)
    second = real_expectation(rho, op @ op, tol)
    var = second - mean**2
    if var < -tol:
        raise InvariantViolation(f"negative variance {var:.3e}")
    return max(var, 0.0)
