"""
Spherical Wigner function from the multipole expansion

    W(theta, phi) = N * sum_{l,m} rho_lm Y_lm,    rho_lm = Tr(rho T_lm^dag)

with ``N`` fixed so the function integrates to one over the sphere.

Sphere coordinates follow the coherent-state labelling: the point
``(theta, phi)`` is the direction ``(sin t cos p, sin t sin p, -cos t)``, i.e.
the mean-spin direction of ``coherent_state(theta, phi)``. ``theta = 0`` is
the ``-z`` pole (the ``|I, -I>`` reference state) and the equator is unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InvariantViolation, ValidationError
from .spin import DensityMatrix, Matrix, make_tensor_basis

IMAG_TOL = 1e-10
NORM_TOL = 1e-3


def legendre_table(lmax: int, x: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    """
    Orthonormalized associated Legendre functions ``p_lm(x)`` for ``0 <= m <= l <= lmax``,
    including the Condon-Shortley phase, so that ``Y_lm = p_lm(cos t) exp(i m phi)``.
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    table: dict[tuple[int, int], np.ndarray] = {}
    diag = np.full_like(x, 1.0 / math.sqrt(4 * math.pi))
    for m in range(lmax + 1):
        if m > 0:
            diag = -math.sqrt((2 * m + 1) / (2 * m)) * s * diag
        table[(m, m)] = diag
        if m + 1 <= lmax:
            table[(m + 1, m)] = math.sqrt(2 * m + 3) * x * diag
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            table[(l, m)] = a * (x * table[(l - 1, m)] - b * table[(l - 2, m)])
    return table


def spherical_harmonics(lmax: int, theta, phi) -> dict[tuple[int, int], np.ndarray]:
    """Orthonormal ``Y_lm`` at standard polar angle ``theta`` (from +z), all ``|m| <= l <= lmax``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    legendre = legendre_table(lmax, np.cos(theta))
    out = {}
    for (l, m), p in legendre.items():
        y = p * np.exp(1j * m * phi)
        out[(l, m)] = y
        if m > 0:
            out[(l, -m)] = (-1) ** m * np.conj(y)
    return out


def multipole_moments(rho: DensityMatrix, basis: Mapping[tuple[int, int], Matrix] = None) -> dict[tuple[int, int], complex]:
    """``rho_lm = Tr(rho T_lm^dag)`` over a trace-orthonormal tensor basis."""
    if basis is None:
        basis = make_tensor_basis(rho.spin)
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    moments = {}
    for key, tensor in basis.items():
        if tensor.shape != mat.shape:
            raise ValidationError(f"basis element {key} has shape {tensor.shape}, state has {mat.shape}")
        # Tr(rho T^dag) = sum_ij rho_ij conj(T_ij)
        moments[key] = complex(np.sum(mat * tensor.conj()))
    return moments


def wigner_at(moments: Mapping[tuple[int, int], complex], theta, phi):
    """Normalized Wigner function at coherent-state coordinates ``(theta, phi)``; scalars or arrays."""
    lmax = max(l for l, _ in moments)
    dim = lmax + 1
    harmonics = spherical_harmonics(lmax, math.pi - np.asarray(theta, dtype=float), phi)
    total = sum(moments[key] * harmonics[key] for key in moments)
    total = np.asarray(total) * math.sqrt(dim / (4 * math.pi))
    residue = float(np.max(np.abs(total.imag))) if total.size else 0.0
    if residue > IMAG_TOL:
        raise InvariantViolation(f"Wigner function has imaginary residue {residue:.3e}")
    real = total.real
    return float(real) if real.ndim == 0 else real


@dataclass(frozen=True, eq=False)
class WignerGrid:
    n_theta: int
    n_phi: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def d_theta(self) -> float:
        return math.pi / (self.n_theta - 1)

    @property
    def d_phi(self) -> float:
        return 2 * math.pi / self.n_phi

    def integral(self) -> float:
        weights = np.sin(self.theta)[:, None] * self.d_theta * self.d_phi
        return float(np.sum(self.values * weights))

    def directions(self) -> np.ndarray:
        """Cartesian unit vectors of the nodes, shape ``(n_theta, n_phi, 3)``."""
        t, p = np.meshgrid(self.theta, self.phi, indexing="ij")
        return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), -np.cos(t)], axis=-1)

    def argmax(self) -> tuple[float, float]:
        j, k = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[j]), float(self.phi[k])

    def second_moments(self) -> np.ndarray:
        """``sum W n_i n_j dOmega`` over the grid, a 3x3 matrix in (x, y, z)."""
        n = self.directions()
        w = self.values * np.sin(self.theta)[:, None] * self.d_theta * self.d_phi
        return np.einsum("jk,jka,jkb->ab", w, n, n)

    def minor_axis_angle(self) -> float:
        """
        Angle ``alpha`` of the narrowest transverse direction ``(0, cos a, -sin a)``
        of the distribution, from the (y, z) block of :meth:`second_moments`.
        Returned in ``(-pi/2, pi/2]``.
        """
        block = self.second_moments()[1:, 1:]
        evals, evecs = np.linalg.eigh(block)
        uy, uz = evecs[:, 0]
        alpha = math.atan2(-uz, uy)
        if alpha <= -math.pi / 2:
            alpha += math.pi
        elif alpha > math.pi / 2:
            alpha -= math.pi
        return alpha


def wigner_grid(rho: DensityMatrix, n_theta: int = 181, n_phi: int = 361) -> WignerGrid:
    """
    Evaluate W on ``n_theta`` nodes spanning ``[0, pi]`` (poles included) and
    ``n_phi`` nodes spanning ``[0, 2 pi)``.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValidationError(f"degenerate Wigner grid {n_theta}x{n_phi}; need at least 2x2")
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    values = wigner_at(multipole_moments(rho), tt, pp)
    grid = WignerGrid(n_theta, n_phi, theta, phi, values)
    lmax = rho.spin.two_i
    # the quadrature only resolves degree-lmax harmonics on fine enough grids
    if n_phi > 2 * lmax and n_theta > 8 * (lmax + 1):
        err = abs(grid.integral() - 1.0)
        if err > NORM_TOL:
            raise InvariantViolation(f"Wigner grid integrates to 1 {err:+.3e}")
    return grid
