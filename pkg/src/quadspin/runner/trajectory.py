"""Trajectory generation and post-processing (minima, normalized derivatives)."""

from __future__ import annotations

import math
import os
from dataclasses import astuple, dataclass, fields
from typing import Optional, Sequence

import numpy as np

from ..errors import InvariantViolation, ValidationError
from ..liouville import equilibrium_state, relaxation_superoperator, twisting_hamiltonian
from ..observables import macroscopicity, noncartesian_operators, squeezing, uncertainty_report
from ..propagate import Generator, TimeGrid, build_generator, propagate, propagate_grid
from ..spin import DensityMatrix, coherent_state, make_spin_operators
from .config import SimulationConfig

# separates roundoff-level wiggles from physical extrema in minima detection
MINIMA_ATOL = 1e-9
# R[rho - rho_eq] is not completely positive: a pure initial state dips to
# eigenvalues near -1e-4 during the first fraction of a period before
# relaxation takes over. Trajectories tolerate that and report the dip.
TRAJECTORY_POSITIVITY_TOL = 1e-3


@dataclass(frozen=True)
class ObservableRecord:
    """One row of the trajectory table.

    ``window`` is the index ``k`` of the sampling window the row belongs to
    (0 outside windowed grids) and ``min_eigenvalue`` the lowest eigenvalue of
    the state. Both are bookkeeping only and are not written to CSV.
    """

    t: float
    t_over_nuq: float
    xi: float
    xi_sq: float
    alpha_deg: float
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
    neff_p: float
    neff_y: float
    purity: float
    trace_residual: float
    window: int = 0
    min_eigenvalue: float = 0.0

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)][:-2]

    def values(self) -> tuple[float, ...]:
        return astuple(self)[:-2]


def record_for_state(rho: DensityMatrix, t: float, nu_q: float, window: int = 0) -> ObservableRecord:
    sq = squeezing(rho)
    unc = uncertainty_report(rho, sq.alpha)
    ip, _ = noncartesian_operators(rho.spin, sq.alpha)
    iy = make_spin_operators(rho.spin).Iy
    return ObservableRecord(
        t=t,
        t_over_nuq=t * nu_q,
        xi=sq.xi,
        xi_sq=sq.xi_squared,
        alpha_deg=math.degrees(sq.alpha),
        var_iy=unc.var_iy,
        var_iz=unc.var_iz,
        var_ip=unc.var_ip,
        var_im=unc.var_im,
        prod_yz=unc.prod_yz,
        prod_pm=unc.prod_pm,
        bound=unc.bound,
        mean_ix=unc.mean_ix,
        mean_iy=unc.mean_iy,
        mean_iz=unc.mean_iz,
        neff_p=macroscopicity(rho, ip, label="Ip").n_eff,
        neff_y=macroscopicity(rho, iy, label="Iy").n_eff,
        purity=rho.purity(),
        trace_residual=float(np.real(np.trace(rho.matrix))) - 1.0,
        window=window,
        min_eigenvalue=float(np.linalg.eigvalsh(rho.matrix)[0]),
    )


def build_config_generator(cfg: SimulationConfig) -> Generator:
    hamiltonian = twisting_hamiltonian(cfg.spin, cfg.relaxation.omega_q)
    if not cfg.relaxation_enabled:
        return build_generator(hamiltonian)
    return build_generator(
        hamiltonian, relaxation_superoperator(cfg.spin, cfg.relaxation), equilibrium_state(cfg.spin)
    )


def default_workers() -> int:
    raw = os.environ.get("QUADSPIN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ValidationError(f"QUADSPIN_THREADS must be an integer, got {raw!r}") from exc


def state_at(cfg: SimulationConfig, t: float, positivity_tol: float = TRAJECTORY_POSITIVITY_TOL) -> DensityMatrix:
    return propagate(coherent_state(cfg.spin, cfg.initial), build_config_generator(cfg), t, positivity_tol)


def run_trajectory(
    cfg: SimulationConfig,
    grid: Optional[TimeGrid] = None,
    workers: Optional[int] = None,
    positivity_tol: float = TRAJECTORY_POSITIVITY_TOL,
) -> list[ObservableRecord]:
    """Propagate the configured initial state over the grid and tabulate every observable."""
    nu_q = cfg.relaxation.nu_q
    grid = grid or cfg.grid.build(nu_q)
    gen = build_config_generator(cfg)
    rho0 = coherent_state(cfg.spin, cfg.initial)
    states = propagate_grid(rho0, gen, grid, workers or default_workers(), positivity_tol)
    labels = grid.windows if grid.windows is not None else np.zeros(len(grid), dtype=int)
    records = []
    for idx, ((t, rho), k) in enumerate(zip(states, labels)):
        try:
            records.append(record_for_state(rho, t, nu_q, int(k)))
        except InvariantViolation as exc:
            raise InvariantViolation(f"sample {idx} (t={t:.6e} s): {exc}") from exc
    return records


def local_minima(values: Sequence[float], atol: float = 0.0) -> list[int]:
    """
    Indices of strict local minima by three-point comparison.

    Consecutive values differing by at most ``atol`` form a plateau; a plateau
    lower than both neighbours counts once, at its earliest sample. Plateaus
    touching either end of the series are never minima.
    """
    vals = np.asarray(values, dtype=float)
    runs: list[tuple[int, float]] = []
    for i, v in enumerate(vals):
        if runs and abs(v - vals[i - 1]) <= atol:
            continue
        runs.append((i, v))
    out = []
    for j in range(1, len(runs) - 1):
        start, v = runs[j]
        if runs[j - 1][1] > v and runs[j + 1][1] > v:
            out.append(start)
    return out


def detect_minima(
    records: Sequence[ObservableRecord], column: str = "xi", atol: float = 0.0
) -> list[tuple[float, float]]:
    if len(records) < 3:
        raise ValidationError("minima detection needs at least 3 records")
    vals = [getattr(r, column) for r in records]
    return [(records[i].t, vals[i]) for i in local_minima(vals, atol)]


def split_windows(records: Sequence[ObservableRecord]) -> dict[int, list[ObservableRecord]]:
    out: dict[int, list[ObservableRecord]] = {}
    for rec in records:
        out.setdefault(rec.window, []).append(rec)
    return out


def window_minima(
    records: Sequence[ObservableRecord], column: str = "xi", atol: float = MINIMA_ATOL
) -> dict[int, list[tuple[float, float]]]:
    """Minima of ``column`` found separately inside each sampling window."""
    return {
        k: detect_minima(chunk, column, atol) if len(chunk) >= 3 else []
        for k, chunk in split_windows(records).items()
    }


def derivative_series(
    records: Sequence[ObservableRecord], column: str, by_window: bool = True
) -> list[tuple[float, float]]:
    """
    Time derivative of ``column`` normalized so its largest magnitude is 1.

    Second-order central differences inside, one-sided at the ends
    (``numpy.gradient``). With ``by_window`` the differences never straddle
    the gap between two sampling windows.
    """
    if len(records) < 2:
        raise ValidationError("derivative needs at least 2 records")
    t = np.array([r.t for r in records])
    if np.any(np.diff(t) <= 0):
        raise ValidationError("derivative requires strictly increasing, non-duplicate timestamps")
    vals = np.array([getattr(r, column) for r in records], dtype=float)
    labels = np.array([r.window for r in records]) if by_window else np.zeros(len(records), dtype=int)
    deriv = np.zeros_like(vals)
    bounds = np.flatnonzero(np.diff(labels)) + 1
    for seg in np.split(np.arange(len(records)), bounds):
        if seg.size >= 2:
            deriv[seg] = np.gradient(vals[seg], t[seg])
    peak = np.max(np.abs(deriv))
    if peak > 0:
        deriv = deriv / peak
    return list(zip(t.tolist(), deriv.tolist()))


def window_peak(records: Sequence[ObservableRecord], series: Sequence[float]) -> dict[int, float]:
    """Largest ``|series|`` value inside each window."""
    out: dict[int, float] = {}
    for rec, val in zip(records, series):
        out[rec.window] = max(out.get(rec.window, 0.0), abs(val))
    return out


def decay_window(peaks: dict[int, float], threshold: float) -> Optional[int]:
    """First window from which every later window stays below ``threshold``."""
    ks = sorted(peaks)
    for i, k in enumerate(ks):
        if all(peaks[j] < threshold for j in ks[i:]):
            return k
    return None
