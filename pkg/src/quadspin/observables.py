"""
Squeezing, uncertainty and macroscopicity diagnostics for a spin state whose
mean spin points along +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation, ValidationError
from .spin import DensityMatrix, Matrix, SpinNumber, make_spin_operators, real_expectation, variance

RADICAND_TOL = 1e-10
ROBERTSON_SLACK = 1e-9
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SqueezingResult:
    a: float
    b: float
    c: float
    xi: float
    xi_squared: float
    alpha: float
    degenerate: bool = False


@dataclass(frozen=True)
class UncertaintyReport:
    """Variances and standard-deviation products for the (y, z) and (p, m) pairs.

    ``prod_yz`` is ``dIy * dIz`` (product of standard deviations), compared
    against ``bound = |<Ix>| / 2``.
    """

    var_iy: float
    var_iz: float
    var_ip: float
    var_im: float
    prod_yz: float
    prod_pm: float
    bound: float
    mean_ix: float
    mean_iy: float
    mean_iz: float


@dataclass(frozen=True)
class MacroscopicityResult:
    n_eff: float
    operator_label: str = "custom"


class EquilibriumBounds(NamedTuple):
    xi_sq_eq: float
    prod_eq: float
    n_eff_loss: float


def _rho(rho) -> DensityMatrix:
    if not isinstance(rho, DensityMatrix):
        raise ValidationError("expected a DensityMatrix")
    return rho


def squeezing(rho: DensityMatrix) -> SqueezingResult:
    """
    Squeezing parameter ``xi = sqrt((C - sqrt(A^2 + B^2)) / I)`` and angle.

    ``A = <Iz^2 - Iy^2>``, ``B = <Iz Iy + Iy Iz>``, ``C = <Iz^2 + Iy^2>``.
    The angle is the principal-branch ``alpha = arctan(B / A) / 2`` in
    ``(-pi/4, pi/4]``; ``A = 0`` maps to ``+-pi/4`` by the sign of ``B``.
    When ``A`` and ``B`` both vanish (isotropic transverse moments) the angle
    is set to 0 and the result is flagged ``degenerate``.
    """
    rho = _rho(rho)
    ops = make_spin_operators(rho.spin)
    iy, iz = ops.Iy, ops.Iz
    iy2, iz2 = iy @ iy, iz @ iz
    a = real_expectation(rho, iz2 - iy2)
    b = real_expectation(rho, iz @ iy + iy @ iz)
    c = real_expectation(rho, iz2 + iy2)
    spread = math.hypot(a, b)
    radicand = 0.5 * (c - spread)
    if radicand < -RADICAND_TOL:
        raise InvariantViolation(f"squeezing radicand {radicand:.3e} is negative")
    radicand = max(radicand, 0.0)
    xi_sq = radicand / (rho.spin.value / 2)
    degenerate = spread <= DEGENERATE_TOL * max(1.0, abs(c))
    if degenerate:
        alpha = 0.0
    elif a == 0.0:
        alpha = math.copysign(math.pi / 4, b)
    else:
        alpha = 0.5 * math.atan(b / a)
    return SqueezingResult(a, b, c, math.sqrt(xi_sq), xi_sq, alpha, degenerate)


def noncartesian_operators(spin: SpinNumber, alpha: float) -> tuple[Matrix, Matrix]:
    """``Ip = Iy cos(alpha) - Iz sin(alpha)`` and ``Im = -Iy sin(alpha) - Iz cos(alpha)``.

    ``[Ip, Im] = -i Ix`` for every ``alpha``.
    """
    if not math.isfinite(alpha):
        raise ValidationError(f"alpha must be finite, got {alpha}")
    ops = make_spin_operators(spin)
    ca, sa = math.cos(alpha), math.sin(alpha)
    ip = ops.Iy * ca - ops.Iz * sa
    im = -ops.Iy * sa - ops.Iz * ca
    return ip, im


def uncertainty_report(rho: DensityMatrix, alpha: float) -> UncertaintyReport:
    rho = _rho(rho)
    ops = make_spin_operators(rho.spin)
    ip, im = noncartesian_operators(rho.spin, alpha)
    var_iy = variance(rho, ops.Iy)
    var_iz = variance(rho, ops.Iz)
    var_ip = variance(rho, ip)
    var_im = variance(rho, im)
    mean_ix = real_expectation(rho, ops.Ix)
    report = UncertaintyReport(
        var_iy=var_iy,
        var_iz=var_iz,
        var_ip=var_ip,
        var_im=var_im,
        prod_yz=math.sqrt(var_iy * var_iz),
        prod_pm=math.sqrt(var_ip * var_im),
        bound=abs(mean_ix) / 2,
        mean_ix=mean_ix,
        mean_iy=real_expectation(rho, ops.Iy),
        mean_iz=real_expectation(rho, ops.Iz),
    )
    for name in ("prod_yz", "prod_pm"):
        value = getattr(report, name)
        if value < report.bound - ROBERTSON_SLACK:
            raise InvariantViolation(f"Robertson bound violated: {name}={value:.12g} < {report.bound:.12g}")
    return report


def macroscopicity(rho: DensityMatrix, op: Matrix, spin: SpinNumber = None, label: str = "custom") -> MacroscopicityResult:
    """Effective size ``(2 / I) Var(O)``."""
    rho = _rho(rho)
    spin = spin or rho.spin
    if spin != rho.spin:
        raise ValidationError(f"spin {spin} does not match state spin {rho.spin}")
    return MacroscopicityResult(2.0 / spin.value * variance(rho, op), label)


def equilibrium_bounds(spin: SpinNumber) -> EquilibriumBounds:
    """Closed-form equilibrium squeezing, (y, z) uncertainty product and macroscopicity loss."""
    j = spin.value
    xi_sq = 2 * (j + 1) / 3
    prod = (j + 1) * math.sqrt((2 * j - 1) * j) / (3 * math.sqrt(3))
    loss = 2 * (2 * j - 1) / 3
    return EquilibriumBounds(xi_sq, prod, loss)


def macroscopicity_endpoints(spin: SpinNumber) -> tuple[float, float]:
    """``(2I, 2(I+1)/3)``: cat-state maximum and equilibrium value of ``N_eff``."""
    j = spin.value
    return 2 * j, 2 * (j + 1) / 3
