"""Matplotlib renderings written next to the CSV outputs (PNG, Agg backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..wigner import WignerGrid  # noqa: E402
from .trajectory import ObservableRecord, derivative_series, split_windows  # noqa: E402

STYLE = {
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 7,
    "legend.frameon": False,
    "savefig.dpi": 150,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def _overlay(ax, records, column, scale=1.0, max_curves=12):
    """Plot ``column`` per window against the phase ``t nu_q - (k - 1)``."""
    chunks = split_windows(records)
    ks = sorted(chunks)
    if len(ks) > max_curves:
        picks = np.unique(np.linspace(0, len(ks) - 1, max_curves).round().astype(int))
        ks = [ks[i] for i in picks]
    cmap = plt.get_cmap("viridis")
    for i, k in enumerate(ks):
        chunk = chunks[k]
        x = [r.t_over_nuq - (k - 1 if k else 0) for r in chunk]
        y = [getattr(r, column) * scale for r in chunk]
        ax.plot(x, y, color=cmap(i / max(len(ks) - 1, 1)), lw=1, label=f"k={k}" if k else None)


def plot_trajectory(records: Sequence[ObservableRecord], path, title: str = "") -> Path:
    """Four panels: squeezing parameter, angle, uncertainty products and N_eff."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(2, 2, figsize=(8, 6))
        ax = axes.ravel()
        _overlay(ax[0], records, "xi")
        ax[0].axhline(1.0, color="0.6", lw=0.8, ls="--")
        ax[0].set_ylabel(r"$\xi$")
        _overlay(ax[1], records, "alpha_deg")
        ax[1].set_ylabel(r"$\alpha_\xi$ (deg)")
        t = [r.t_over_nuq for r in records]
        ax[2].plot(t, [r.prod_pm for r in records], ".", ms=2, label=r"$\Delta I_p \Delta I_m$")
        ax[2].plot(t, [r.prod_yz for r in records], ".", ms=2, label=r"$\Delta I_y \Delta I_z$")
        ax[2].plot(t, [r.bound for r in records], ".", ms=1, color="0.4", label=r"$|\langle I_x\rangle|/2$")
        ax[2].set_ylabel("uncertainty product")
        ax[2].legend()
        ax[3].plot(t, [r.neff_p for r in records], ".", ms=2, label=r"$N_{eff}^p$")
        ax[3].plot(t, [r.neff_y for r in records], ".", ms=1, label=r"$N_{eff}^y$")
        ax[3].set_ylabel(r"$N_{eff}$")
        ax[3].legend()
        if len({r.window for r in records}) > 1:
            ax[0].legend(ncol=2)
            for a in ax[2:]:
                a.set_xscale("symlog", linthresh=1.0)
        for a in ax[:2]:
            a.set_xlabel(r"$t\,\nu_Q - (k-1)$")
        for a in ax[2:]:
            a.set_xlabel(r"$t\,\nu_Q$")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_derivative(records: Sequence[ObservableRecord], path, column: str = "prod_pm") -> Path:
    series = derivative_series(records, column)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.plot([r.t_over_nuq for r in records], [v for _, v in series], ".", ms=2)
        ax.set_xscale("symlog", linthresh=1.0)
        ax.set_xlabel(r"$t\,\nu_Q$")
        ax.set_ylabel(f"normalized d({column})/dt")
        fig.tight_layout()
        return _save(fig, path)


def plot_wigner(grid: WignerGrid, path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        extent = (0, 360, 180, 0)
        im = ax.imshow(grid.values, extent=extent, aspect="auto", cmap="RdBu_r",
                       vmin=-np.abs(grid.values).max(), vmax=np.abs(grid.values).max())
        ax.set_xlabel(r"$\phi$ (deg)")
        ax.set_ylabel(r"$\theta$ (deg)")
        fig.colorbar(im, ax=ax, label="W")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_bounds(rows: Sequence[Sequence], path) -> Path:
    """Equilibrium squeezing and uncertainty product against I, with least-squares lines."""
    spins = np.array([float(r[1]) for r in rows])
    xi_sq = np.array([float(r[2]) for r in rows])
    prod = np.array([float(r[3]) for r in rows])
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(7, 3))
        for ax, y, color, label in (
            (axes[0], xi_sq, "tab:red", r"$\xi^2_{eq}$"),
            (axes[1], prod, "tab:blue", r"$(\Delta I_y \Delta I_z)_{eq}$"),
        ):
            ax.plot(spins, y, "o", color=color)
            if spins.size >= 2:
                slope, icpt = np.polyfit(spins, y, 1)
                ax.plot(spins, slope * spins + icpt, "-", color=color, lw=1,
                        label=f"fit: {slope:.3f} I + {icpt:.3f}")
                ax.legend()
            ax.set_xlabel("I")
            ax.set_ylabel(label)
        fig.tight_layout()
        return _save(fig, path)
