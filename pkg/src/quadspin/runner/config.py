"""
Simulation configuration.

Configs are JSON objects. Recognised keys (anything else is rejected):

``preset``
    ``"na23"``, ``"cs133"`` or ``"custom"`` (required).
``spin``, ``j0_ns``, ``j1_ns``, ``j2_ns``, ``c_q_hz2``, ``nu_q_hz``
    Physical parameters. Required for ``custom``, forbidden for presets.
    Spectral densities are in nanoseconds, ``c_q`` in Hz^2 and the
    quadrupolar frequency ``nu_q = omega_q / 2 pi`` in Hz.
``relaxation``
    bool, default ``true``.
``theta``, ``phi``
    Initial coherent-state angles in radians (default ``pi/2``, ``0``).
``grid``
    ``{"scheme": "paper_windows", "windows": [1, 11, ...] | "1:1001:10",
    "samples_per_window": 64}`` or ``{"scheme": "uniform", "periods": 1.0,
    "samples": 65}``. Defaults to the windowed grid ``k = 1, 11, ..., 1001``.
``outputs``
    List drawn from ``trajectory_csv``, ``wigner_csv``, ``wigner_svg``,
    ``bounds_table``, ``figures``. Default ``["trajectory_csv", "figures"]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Union

from ..errors import ValidationError
from ..liouville import NS, PRESET_TABLE, PRESETS, RelaxationParams
from ..propagate import DEFAULT_SAMPLES_PER_WINDOW, DEFAULT_WINDOWS, TimeGrid, paper_windows
from ..spin import CoherentStateParams, SpinNumber

PHYSICAL_KEYS = ("spin", "j0_ns", "j1_ns", "j2_ns", "c_q_hz2", "nu_q_hz")
TOP_KEYS = {"preset", "relaxation", "theta", "phi", "grid", "outputs", *PHYSICAL_KEYS}
GRID_KEYS = {"scheme", "windows", "samples_per_window", "periods", "samples"}
OUTPUTS = ("trajectory_csv", "wigner_csv", "wigner_svg", "bounds_table", "figures")
DEFAULT_OUTPUTS = ("trajectory_csv", "figures")


@dataclass(frozen=True)
class GridSpec:
    scheme: str = "paper_windows"
    windows: tuple[int, ...] = DEFAULT_WINDOWS
    samples_per_window: int = DEFAULT_SAMPLES_PER_WINDOW
    periods: float = 1.0
    samples: int = 65

    def build(self, nu_q: float) -> TimeGrid:
        if self.scheme == "paper_windows":
            return paper_windows(nu_q, self.windows, self.samples_per_window)
        return TimeGrid.uniform(self.periods / nu_q, self.samples)


@dataclass(frozen=True)
class SimulationConfig:
    preset: str
    spin: SpinNumber
    relaxation: RelaxationParams
    relaxation_enabled: bool = True
    initial: CoherentStateParams = CoherentStateParams()
    grid: GridSpec = GridSpec()
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    # physical inputs in their document units, echoed verbatim
    physical: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def to_dict(self) -> dict[str, Any]:
        """Config echo in the input schema, with resolved physical values."""
        physical = self.physical or PRESET_TABLE.get(self.preset)
        if not physical:
            r = self.relaxation
            physical = {
                "spin": str(self.spin),
                "j0_ns": r.j0 / NS,
                "j1_ns": r.j1 / NS,
                "j2_ns": r.j2 / NS,
                "c_q_hz2": r.c_q,
                "nu_q_hz": r.nu_q,
            }
        return {
            "preset": self.preset,
            **{key: physical[key] for key in PHYSICAL_KEYS},
            "relaxation": self.relaxation_enabled,
            "theta": self.initial.theta,
            "phi": self.initial.phi,
            "grid": _grid_to_dict(self.grid),
            "outputs": list(self.outputs),
        }


def _grid_to_dict(grid: GridSpec) -> dict[str, Any]:
    if grid.scheme == "paper_windows":
        return {"scheme": grid.scheme, "windows": list(grid.windows), "samples_per_window": grid.samples_per_window}
    return {"scheme": grid.scheme, "periods": grid.periods, "samples": grid.samples}


def parse_windows(spec: Union[str, list, tuple]) -> tuple[int, ...]:
    """``"1:1001:10"`` (inclusive stop), ``"1,21,41"`` or a list of ints."""
    if isinstance(spec, str):
        text = spec.strip()
        try:
            if ":" in text:
                parts = [int(p) for p in text.split(":")]
                if len(parts) not in (2, 3):
                    raise ValueError
                start, stop = parts[0], parts[1]
                step = parts[2] if len(parts) == 3 else 1
                if step <= 0:
                    raise ValueError
                windows = tuple(range(start, stop + 1, step))
            else:
                windows = tuple(int(p) for p in text.split(",") if p.strip())
        except ValueError as exc:
            raise ValidationError(f"cannot parse window list {spec!r}") from exc
    else:
        try:
            windows = tuple(int(k) for k in spec)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot parse window list {spec!r}") from exc
    if not windows or any(k < 1 for k in windows) or any(b <= a for a, b in zip(windows, windows[1:])):
        raise ValidationError(f"windows must be increasing integers >= 1, got {spec!r}")
    return windows


def _number(doc: Mapping[str, Any], key: str, positive: bool = True) -> float:
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"{key} must be a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val) or (positive and val <= 0):
        raise ValidationError(f"{key} must be positive and finite, got {val}")
    return val


def _grid(doc: Optional[Mapping[str, Any]]) -> GridSpec:
    if doc is None:
        return GridSpec()
    if not isinstance(doc, Mapping):
        raise ValidationError("grid must be an object")
    unknown = set(doc) - GRID_KEYS
    if unknown:
        raise ValidationError(f"unknown grid keys: {sorted(unknown)}")
    scheme = doc.get("scheme", "paper_windows")
    if scheme == "paper_windows":
        extra = set(doc) & {"periods", "samples"}
        if extra:
            raise ValidationError(f"keys {sorted(extra)} only apply to the uniform scheme")
        windows = parse_windows(doc.get("windows", DEFAULT_WINDOWS))
        spw = doc.get("samples_per_window", DEFAULT_SAMPLES_PER_WINDOW)
        if isinstance(spw, bool) or not isinstance(spw, int) or spw < 2:
            raise ValidationError(f"samples_per_window must be an integer >= 2, got {spw!r}")
        return GridSpec("paper_windows", windows, spw)
    if scheme == "uniform":
        extra = set(doc) & {"windows", "samples_per_window"}
        if extra:
            raise ValidationError(f"keys {sorted(extra)} only apply to the paper_windows scheme")
        periods = _number(doc, "periods") if "periods" in doc else 1.0
        samples = doc.get("samples", 65)
        if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
            raise ValidationError(f"samples must be a positive integer, got {samples!r}")
        return GridSpec("uniform", periods=periods, samples=samples)
    raise ValidationError(f"unknown grid scheme {scheme!r}")


def load_config(source: Union[str, Mapping[str, Any]]) -> SimulationConfig:
    """Parse and validate a JSON config document (text or already-decoded mapping)."""
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
    else:
        doc = dict(source)
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    preset = doc.get("preset")
    if preset is None:
        raise ValidationError("missing required field 'preset'")

    if preset in PRESETS:
        given = [k for k in PHYSICAL_KEYS if k in doc]
        if given:
            raise ValidationError(f"preset {preset!r} fixes {given}; use preset 'custom' to set them")
        spin, params = PRESETS[preset]
        physical = dict(PRESET_TABLE[preset])
    elif preset == "custom":
        for key in PHYSICAL_KEYS:
            if key not in doc:
                raise ValidationError(f"custom preset is missing field '{key}'")
        spin = SpinNumber.parse(doc["spin"])
        if spin.two_i < 2:
            raise ValidationError(f"spin {spin} has no quadrupole coupling")
        params = RelaxationParams(
            j0=_number(doc, "j0_ns") * NS,
            j1=_number(doc, "j1_ns") * NS,
            j2=_number(doc, "j2_ns") * NS,
            c_q=_number(doc, "c_q_hz2", positive=False),
            omega_q=2 * math.pi * _number(doc, "nu_q_hz"),
            label="custom",
        )
        physical = {key: doc[key] for key in PHYSICAL_KEYS}
    else:
        raise ValidationError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)} or 'custom'")

    relaxation = doc.get("relaxation", True)
    if not isinstance(relaxation, bool):
        raise ValidationError(f"relaxation must be true or false, got {relaxation!r}")
    theta = _number(doc, "theta", positive=False) if "theta" in doc else math.pi / 2
    phi = _number(doc, "phi", positive=False) if "phi" in doc else 0.0
    outputs = doc.get("outputs", list(DEFAULT_OUTPUTS))
    if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
        raise ValidationError(f"outputs must be a list drawn from {list(OUTPUTS)}, got {outputs!r}")
    return SimulationConfig(
        preset=preset,
        spin=spin,
        relaxation=params,
        relaxation_enabled=relaxation,
        initial=CoherentStateParams(theta, phi),
        grid=_grid(doc.get("grid")),
        outputs=tuple(dict.fromkeys(outputs)),
        physical=physical,
    )
