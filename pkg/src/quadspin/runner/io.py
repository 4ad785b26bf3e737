"""Delimited and SVG writers. All text files are UTF-8 with LF line endings."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from ..errors import QuadspinError
from ..liouville import equilibrium_state
from ..observables import equilibrium_bounds, macroscopicity_endpoints, squeezing, uncertainty_report
from ..spin import SpinNumber
from ..wigner import WignerGrid
from .trajectory import ObservableRecord

SCHEMA_LINE = "# quadspin-schema=1"
BOUNDS_COLUMNS = [
    "spin",
    "i",
    "xi_sq_eq",
    "prod_eq",
    "n_eff_max",
    "n_eff_eq",
    "n_eff_loss",
    "xi_sq_rho",
    "prod_yz_rho",
]


class OutputError(QuadspinError, OSError):
    """Writing an output file failed."""


def fmt(value: float) -> str:
    """17 significant digits in scientific notation."""
    return f"{value:.16e}"


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _rows(header: Sequence[str], rows: Iterable[Sequence[Any]], comment: str = None) -> str:
    lines = [comment] if comment else []
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def emit_trajectory_csv(records: Sequence[ObservableRecord], path) -> Path:
    return _write_text(path, _rows(ObservableRecord.columns(), (r.values() for r in records), SCHEMA_LINE))


def read_trajectory_csv(path) -> list[dict[str, float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(lines)]


def emit_series_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path) -> Path:
    return _write_text(path, _rows(header, rows))


def emit_wigner_csv(grid: WignerGrid, path) -> Path:
    """Long format ``theta,phi,w``, theta-major."""
    tt, pp = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    rows = zip(tt.ravel(), pp.ravel(), grid.values.ravel())
    return _write_text(path, _rows(["theta", "phi", "w"], rows))


def emit_wigner_svg(grid: WignerGrid, path, cell: int = 2) -> Path:
    """
    Equirectangular heatmap (phi across, theta down) in linear grayscale,
    black at the grid minimum and white at the maximum. A constant grid is
    drawn mid-gray. Equal neighbouring cells in a row are merged into one rect.
    """
    vals = grid.values
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo > 0:
        levels = np.rint((vals - lo) / (hi - lo) * 255).astype(int)
    else:
        levels = np.full(vals.shape, 128, dtype=int)
    width, height = grid.n_phi * cell, grid.n_theta * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" shape-rendering="crispEdges">'
    ]
    for j in range(grid.n_theta):
        row = levels[j]
        start = 0
        for k in range(1, grid.n_phi + 1):
            if k == grid.n_phi or row[k] != row[start]:
                g = row[start]
                parts.append(
                    f'<rect x="{start * cell}" y="{j * cell}" width="{(k - start) * cell}" '
                    f'height="{cell}" fill="rgb({g},{g},{g})"/>'
                )
                start = k
    parts.append("</svg>")
    return _write_text(path, "\n".join(parts) + "\n")


def bounds_rows(spins: Sequence[SpinNumber]) -> list[list]:
    """Closed-form equilibrium values next to the same quantities evaluated on ``rho_eq``."""
    rows = []
    for spin in spins:
        b = equilibrium_bounds(spin)
        n_max, n_eq = macroscopicity_endpoints(spin)
        rho = equilibrium_state(spin)
        sq = squeezing(rho)
        unc = uncertainty_report(rho, sq.alpha)
        rows.append([str(spin), spin.value, b.xi_sq_eq, b.prod_eq, n_max, n_eq, b.n_eff_loss, sq.xi_squared, unc.prod_yz])
    return rows


def emit_bounds_table(spins: Sequence[SpinNumber], path) -> Path:
    return _write_text(path, _rows(BOUNDS_COLUMNS, bounds_rows(spins)))


def emit_json(data: Any, path) -> Path:
    return _write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")
