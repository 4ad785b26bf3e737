"""
Exact propagation of the affine master equation

    d rho / dt = -i [H, rho] + R[rho - rho_eq]

by exponentiating the ``(d^2 + 1)``-dimensional augmented generator.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvariantViolation, ValidationError
from .liouville import Superoperator, left_commutator_super, unvec, vec
from .spin import DensityMatrix, Matrix, SpinNumber

TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Generator:
    spin: SpinNumber
    linear: np.ndarray = field(repr=False)
    affine: np.ndarray = field(repr=False)
    relaxation_enabled: bool

    def augmented(self) -> np.ndarray:
        """``[[linear, affine], [0, 0]]``; its exponential carries the affine drive."""
        n = self.linear.shape[0]
        aug = np.zeros((n + 1, n + 1), dtype=complex)
        aug[:n, :n] = self.linear
        aug[:n, n] = self.affine
        return aug

    def fixed_point_residual(self, rho: DensityMatrix) -> float:
        return float(np.linalg.norm(self.linear @ vec(rho.matrix) + self.affine))


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """
    Ordered sample times in seconds.

    ``windows`` holds, for ``paper_windows`` grids, the window index ``k`` each
    sample belongs to (window ``k`` spans ``[k-1, k]`` revival periods).
    """

    samples: np.ndarray
    scheme: str = "uniform"
    windows: Optional[np.ndarray] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValidationError("time grid must be a non-empty 1-D sequence")
        if np.any(samples < 0):
            raise ValidationError("time grid must be non-negative")
        if np.any(np.diff(samples) <= 0):
            raise ValidationError("time grid must be strictly increasing")
        if self.scheme not in ("uniform", "paper_windows", "explicit"):
            raise ValidationError(f"unknown grid scheme {self.scheme!r}")
        object.__setattr__(self, "samples", samples)
        if self.windows is not None:
            object.__setattr__(self, "windows", np.asarray(self.windows, dtype=int))

    def __len__(self) -> int:
        return self.samples.size

    @classmethod
    def uniform(cls, t_end: float, n: int) -> "TimeGrid":
        if n < 1:
            raise ValidationError("uniform grid needs at least one sample")
        return cls(np.linspace(0.0, t_end, n), "uniform")

    @classmethod
    def explicit(cls, times: Iterable[float]) -> "TimeGrid":
        return cls(np.asarray(list(times), dtype=float), "explicit")


DEFAULT_WINDOWS = tuple(range(1, 1002, 10))
DEFAULT_SAMPLES_PER_WINDOW = 64


def paper_windows(
    nu_q: float,
    windows: Sequence[int] = DEFAULT_WINDOWS,
    samples_per_window: int = DEFAULT_SAMPLES_PER_WINDOW,
) -> TimeGrid:
    """
    Windowed grid: window ``k`` is sampled uniformly (endpoints included) on
    ``[k-1, k] / nu_q``. A start sample that coincides with the previous
    window's end is kept only once, attributed to the earlier window.
    """
    if samples_per_window < 2:
        raise ValidationError("samples_per_window must be at least 2")
    ks = list(windows)
    if not ks or any(k < 1 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValidationError(f"window indices must be increasing integers >= 1, got {ks}")
    times, labels = [], []
    last_end = None
    for k in ks:
        frac = np.linspace(k - 1, k, samples_per_window)
        if last_end == k - 1:
            frac = frac[1:]
        last_end = k
        times.extend(frac / nu_q)
        labels.extend([k] * frac.size)
    return TimeGrid(np.array(times), "paper_windows", np.array(labels))


def build_generator(
    hamiltonian: Matrix,
    relaxation: Optional[Superoperator] = None,
    rho_eq: Optional[DensityMatrix] = None,
) -> Generator:
    """Generator of ``-i[H, rho] + R[rho - rho_eq]`` (the relaxation part is optional)."""
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    d = hamiltonian.shape[0]
    if hamiltonian.shape != (d, d) or d < 2:
        raise ValidationError(f"Hamiltonian must be square with d >= 2, got shape {hamiltonian.shape}")
    spin = SpinNumber(d - 1)
    linear = -1j * left_commutator_super(hamiltonian)
    affine = np.zeros(d * d, dtype=complex)
    if relaxation is None:
        if rho_eq is not None:
            raise ValidationError("rho_eq given without a relaxation superoperator")
        return Generator(spin, linear, affine, False)
    if rho_eq is None:
        raise ValidationError("relaxation requires an equilibrium state")
    if relaxation.spin != spin or rho_eq.spin != spin:
        raise ValidationError(
            f"dimension mismatch: H is spin {spin}, R is spin {relaxation.spin}, rho_eq is spin {rho_eq.spin}"
        )
    linear = linear + relaxation.matrix
    affine = -relaxation.matrix @ vec(rho_eq.matrix)
    return Generator(spin, linear, affine, True)


def _checked_state(raw: Matrix, spin: SpinNumber, positivity_tol: float = POSITIVITY_TOL) -> DensityMatrix:
    herm = 0.5 * (raw + raw.conj().T)
    drift = abs(np.trace(herm) - 1.0)
    if drift > TRACE_TOL:
        raise InvariantViolation(f"trace drift {drift:.3e} exceeds {TRACE_TOL:.0e}")
    lowest = np.linalg.eigvalsh(herm)[0]
    if lowest < -positivity_tol:
        raise InvariantViolation(f"negative eigenvalue {lowest:.3e} below -{positivity_tol:.0e}")
    return DensityMatrix(herm, spin, tol=TRACE_TOL, psd_tol=positivity_tol)


def propagator(gen: Generator, t: float) -> np.ndarray:
    """``expm(augmented * t)``."""
    if not (t >= 0 and math.isfinite(t)):
        raise ValidationError(f"propagation time must be finite and non-negative, got {t}")
    return scipy.linalg.expm(gen.augmented() * t)


def propagate(
    rho0: DensityMatrix, gen: Generator, t: float, positivity_tol: float = POSITIVITY_TOL
) -> DensityMatrix:
    """
    State at time ``t``. Trace drift beyond ``TRACE_TOL`` or an eigenvalue
    below ``-positivity_tol`` raises :class:`InvariantViolation`.
    """
    if rho0.spin != gen.spin:
        raise ValidationError(f"state spin {rho0.spin} does not match generator spin {gen.spin}")
    v = np.append(vec(rho0.matrix), 1.0)
    out = propagator(gen, t) @ v
    return _checked_state(unvec(out[:-1], gen.spin.dim), gen.spin, positivity_tol)


def propagate_grid(
    rho0: DensityMatrix,
    gen: Generator,
    grid: TimeGrid,
    workers: int = 1,
    positivity_tol: float = POSITIVITY_TOL,
) -> list[tuple[float, DensityMatrix]]:
    """Propagate to every grid time, each with a single exponential from ``t = 0``."""
    times = [float(t) for t in grid.samples]

    def one(item):
        idx, t = item
        try:
            return t, propagate(rho0, gen, t, positivity_tol)
        except InvariantViolation as exc:
            raise InvariantViolation(f"sample {idx} (t={t:.6e} s): {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, enumerate(times)))
    return [one(item) for item in enumerate(times)]
