"""
Command-line interface.

    quadspin simulate --preset na23 --out runs/na23
    quadspin wigner --preset cs133 --periods 0.1 --grid 181x361 --out runs/w --svg
    quadspin bounds --spins 1/2:9/2 --out runs/bounds.csv
    quadspin cat --preset cs133 --out runs/cat

Exit status: 0 success, 1 invalid input, 2 numerical invariant violated.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from ..errors import InvariantViolation, QuadspinError, ValidationError
from ..observables import equilibrium_bounds, macroscopicity, noncartesian_operators, squeezing
from ..spin import SpinNumber, make_spin_operators
from ..wigner import wigner_grid
from . import figures, io
from .config import SimulationConfig, load_config, parse_windows
from ..propagate import POSITIVITY_TOL
from .trajectory import (
    TRAJECTORY_POSITIVITY_TOL,
    derivative_series,
    decay_window,
    run_trajectory,
    state_at,
    window_minima,
    window_peak,
)

EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 1, 2
DECAY_THRESHOLD = 1e-2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise ValidationError(f"grid must look like NTHETAxNPHI, got {text!r}") from exc


def parse_spins(text: str) -> list[SpinNumber]:
    """``"1/2,3/2,7/2"`` or ``"1/2:9/2"`` (half-integer steps) or ``"1/2:9/2:1"``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValidationError(f"cannot parse spin range {text!r}")
        lo, hi = SpinNumber.parse(parts[0]), SpinNumber.parse(parts[1])
        step = 2 * Fraction(parts[2]) if len(parts) == 3 else Fraction(1)
        if step <= 0 or step.denominator != 1:
            raise ValidationError(f"spin range step must be a positive multiple of 1/2, got {parts[2]!r}")
        return [SpinNumber(k) for k in range(lo.two_i, hi.two_i + 1, int(step))]
    return [SpinNumber.parse(p) for p in text.split(",") if p.strip()]


def _config_from_args(args, overrides: dict) -> SimulationConfig:
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        except ValueError as exc:
            raise ValidationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValidationError("config must be a JSON object")
        if args.preset and doc.get("preset", args.preset) != args.preset:
            raise ValidationError(f"--preset {args.preset} conflicts with config preset {doc['preset']!r}")
        doc.setdefault("preset", args.preset)
    else:
        if not args.preset:
            raise ValidationError("either --preset or --config is required")
        doc = {"preset": args.preset}
    for key, val in overrides.items():
        if key == "grid":
            grid = dict(doc.get("grid", {}))
            grid.update(val)
            doc["grid"] = grid
        else:
            doc[key] = val
    return load_config(doc)


def cmd_simulate(args) -> int:
    overrides = {}
    if args.no_relaxation:
        overrides["relaxation"] = False
    grid = {}
    if args.windows:
        grid["windows"] = list(parse_windows(args.windows))
    if args.samples_per_window:
        grid["samples_per_window"] = args.samples_per_window
    if grid:
        overrides["grid"] = grid
    cfg = _config_from_args(args, overrides)
    out = Path(args.out)
    tol = POSITIVITY_TOL if args.strict_positivity else TRAJECTORY_POSITIVITY_TOL
    records = run_trajectory(cfg, positivity_tol=tol)
    nu_q = cfg.relaxation.nu_q

    io.emit_json(cfg.to_dict(), out / "config.json")
    if "trajectory_csv" in cfg.outputs:
        io.emit_trajectory_csv(records, out / "trajectory.csv")
    deriv = derivative_series(records, "prod_pm")
    io.emit_series_csv(
        ["t", "t_over_nuq", "window", "d_prod_pm"],
        ((t, t * nu_q, rec.window, v) for (t, v), rec in zip(deriv, records)),
        out / "derivative.csv",
    )
    minima = window_minima(records, "xi")
    first_min = next((m[0] for _, m in sorted(minima.items()) if m), None)
    peaks = window_peak(records, [v for _, v in deriv])
    last = records[-1]
    lowest = min(records, key=lambda r: r.min_eigenvalue)
    summary = {
        "preset": cfg.preset,
        "spin": str(cfg.spin),
        "relaxation": cfg.relaxation_enabled,
        "samples": len(records),
        "xi_minima_per_window": {str(k): [[t, v] for t, v in m] for k, m in minima.items() if m},
        "first_xi_minimum": list(first_min) if first_min else None,
        "prod_pm_derivative_decay_window": decay_window(peaks, DECAY_THRESHOLD),
        "final": dataclasses.asdict(last),
        "positivity": {
            "min_eigenvalue": lowest.min_eigenvalue,
            "at_t": lowest.t,
            "samples_below_strict_tol": sum(r.min_eigenvalue < -POSITIVITY_TOL for r in records),
            "tolerance_used": tol,
        },
        "equilibrium_bounds": equilibrium_bounds(cfg.spin)._asdict(),
    }
    io.emit_json(summary, out / "summary.json")

    if first_min and ({"wigner_csv", "wigner_svg"} & set(cfg.outputs)):
        grid_w = wigner_grid(state_at(cfg, first_min[0], tol), 181, 361)
        if "wigner_csv" in cfg.outputs:
            io.emit_wigner_csv(grid_w, out / "wigner_first_min.csv")
        if "wigner_svg" in cfg.outputs:
            io.emit_wigner_svg(grid_w, out / "wigner_first_min.svg")
        if "figures" in cfg.outputs:
            figures.plot_wigner(grid_w, out / "wigner_first_min.png", f"{cfg.preset} first xi minimum")
    if "bounds_table" in cfg.outputs:
        spins = [SpinNumber(k) for k in range(1, 10)]
        io.emit_bounds_table(spins, out / "bounds.csv")
    if "figures" in cfg.outputs and not args.no_figures:
        figures.plot_trajectory(records, out / "trajectory.png", f"{cfg.preset} (I = {cfg.spin})")
        figures.plot_derivative(records, out / "derivative.png")
    print(f"wrote {len(records)} samples to {out}")
    return EXIT_OK


def _wigner_outputs(rho, out: Path, n_theta: int, n_phi: int, svg: bool, figs: bool, title: str) -> dict:
    grid = wigner_grid(rho, n_theta, n_phi)
    io.emit_wigner_csv(grid, out / "wigner.csv")
    if svg:
        io.emit_wigner_svg(grid, out / "wigner.svg")
    if figs:
        figures.plot_wigner(grid, out / "wigner.png", title)
    theta, phi = grid.argmax()
    return {"argmax_theta": theta, "argmax_phi": phi, "max": float(grid.values.max()), "integral": grid.integral()}


def cmd_wigner(args) -> int:
    overrides = {"relaxation": False} if args.no_relaxation else {}
    cfg = _config_from_args(args, overrides)
    if (args.time is None) == (args.periods is None):
        raise ValidationError("give exactly one of --time (seconds) or --periods")
    t = args.time if args.time is not None else args.periods / cfg.relaxation.nu_q
    n_theta, n_phi = parse_grid(args.grid)
    rho = state_at(cfg, t)
    out = Path(args.out)
    sq = squeezing(rho)
    info = _wigner_outputs(rho, out, n_theta, n_phi, args.svg, not args.no_figures, f"{cfg.preset} t = {t:.4g} s")
    info.update({"t": t, "t_over_nuq": t * cfg.relaxation.nu_q, "xi": sq.xi, "alpha": sq.alpha})
    io.emit_json(info, out / "wigner_summary.json")
    print(f"wrote Wigner grid {n_theta}x{n_phi} to {out}")
    return EXIT_OK


def cmd_cat(args) -> int:
    cfg = _config_from_args(args, {"relaxation": False})
    t = math.pi / cfg.relaxation.omega_q
    rho = state_at(cfg, t)
    sq = squeezing(rho)
    ip, _ = noncartesian_operators(cfg.spin, sq.alpha)
    n_theta, n_phi = parse_grid(args.grid)
    out = Path(args.out)
    info = _wigner_outputs(rho, out, n_theta, n_phi, True, not args.no_figures, f"{cfg.preset} cat state")
    info.update(
        {
            "t": t,
            "purity": rho.purity(),
            "alpha": sq.alpha,
            "neff_p": macroscopicity(rho, ip).n_eff,
            "neff_y": macroscopicity(rho, make_spin_operators(cfg.spin).Iy).n_eff,
            "neff_max_expected": 2 * cfg.spin.value,
        }
    )
    io.emit_json(info, out / "cat_summary.json")
    print(f"cat state at t = {t:.6e} s: N_eff(Ip) = {info['neff_p']:.12g}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    spins = parse_spins(args.spins)
    if not spins:
        raise ValidationError("no spins given")
    out = Path(args.out)
    io.emit_bounds_table(spins, out)
    if not args.no_figures:
        figures.plot_bounds(io.bounds_rows(spins), out.with_suffix(".png"))
    print(f"wrote bounds for {len(spins)} spins to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadspin", description=__doc__.splitlines()[1])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, preset_required=False):
        p.add_argument("--preset", choices=["na23", "cs133", "custom"], required=preset_required)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=True)
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("simulate", help="windowed trajectory with all observables")
    common(p)
    p.add_argument("--no-relaxation", action="store_true")
    p.add_argument("--windows", help='window indices, e.g. "1:1001:10" or "1,21,41"')
    p.add_argument("--samples-per-window", type=int)
    p.add_argument(
        "--strict-positivity",
        action="store_true",
        help="fail (exit 2) on any eigenvalue below -1e-8 instead of tolerating the early transient dip",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("wigner", help="Wigner grid at one time")
    common(p)
    p.add_argument("--time", type=float, help="seconds")
    p.add_argument("--periods", type=float, help="time in units of 1/nu_Q")
    p.add_argument("--grid", default="181x361")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--no-relaxation", action="store_true")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("cat", help="relaxation-free evolution to t = pi/omega_Q plus Wigner grid")
    common(p)
    p.add_argument("--grid", default="181x361")
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser("bounds", help="equilibrium bounds table over spins")
    p.add_argument("--spins", required=True, help='e.g. "1/2:9/2" or "3/2,7/2"')
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantViolation as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except QuadspinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
