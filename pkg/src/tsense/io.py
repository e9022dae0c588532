"""File formats: trace CSV, sweep directories, calibration CSV, scenario
configs, run manifests, and NDJSON event reports.

All numeric output uses shortest round-trip decimals so written files are
stable golden artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .response import BasinState, CalibrationCurve
from .simulate import (
    FrequencyTrace,
    LiquidEvent,
    ScenarioConfig,
    SolidEvent,
    Sweep,
)

__all__ = [
    "SchemaError",
    "RunManifest",
    "fmt",
    "write_trace_csv",
    "read_trace_csv",
    "trace_from_rows",
    "write_calibration_csv",
    "read_calibration_csv",
    "write_sweep_dir",
    "read_sweep_dir",
    "load_scenario",
    "write_manifest",
    "write_reports_ndjson",
]

TRACE_HEADER = "time_s,frequency_hz"
CALIBRATION_HEADER = "concentration_mol_per_l,shift_hz"
SWEEP_HEADER = "frequency_hz,s11_db"


class SchemaError(ValueError):
    """Config or file violates its documented schema."""


def fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


# -- trace CSV ---------------------------------------------------------------

def write_trace_csv(trace: FrequencyTrace, path: str | Path) -> None:
    lines = [TRACE_HEADER]
    for t, f in zip(trace.times, trace.samples):
        lines.append(f"{fmt(t)},{fmt(f)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace_csv(path: str | Path) -> list[tuple[float, float]]:
    """Trace rows as (time_s, frequency_hz); uniformity is checked downstream."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise SchemaError(f"{path}: expected header {TRACE_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise SchemaError(f"{path}:{lineno}: expected two columns")
        rows.append((float(parts[0]), float(parts[1])))
    return rows


def trace_from_rows(rows: list[tuple[float, float]],
                    max_jitter: float = 0.01) -> FrequencyTrace:
    """Build a uniform trace from rows, rejecting jittered timestamps."""
    if len(rows) < 2:
        raise SchemaError("trace needs >= 2 rows")
    t = np.array([r[0] for r in rows])
    f = np.array([r[1] for r in rows])
    steps = np.diff(t)
    dt = float(steps[0])
    if dt <= 0 or np.any(np.abs(steps - dt) > max_jitter * dt):
        raise SchemaError("non-uniform timestamps beyond jitter tolerance")
    return FrequencyTrace(start_time=float(t[0]), sample_period=dt, samples=f)


# -- calibration CSV ---------------------------------------------------------

def write_calibration_csv(curve: CalibrationCurve, path: str | Path) -> None:
    lines = [CALIBRATION_HEADER]
    for c, s in zip(curve.concentrations, curve.shifts):
        lines.append(f"{fmt(c)},{fmt(s)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_calibration_csv(path: str | Path) -> CalibrationCurve:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != CALIBRATION_HEADER:
        raise SchemaError(f"{path}: expected header {CALIBRATION_HEADER!r}")
    concs, shifts = [], []
    for line in lines[1:]:
        if not line.strip():
            continue
        c, s = line.split(",")
        concs.append(float(c))
        shifts.append(float(s))
    return CalibrationCurve(tuple(concs), tuple(shifts))


# -- sweep directories -------------------------------------------------------

def write_sweep_dir(sweeps: list[Sweep], out_dir: str | Path) -> None:
    """One CSV per timestep; lexicographic filename order is time order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, sw in enumerate(sweeps):
        lines = [SWEEP_HEADER]
        for f, s in zip(sw.frequencies, sw.s11_db):
            lines.append(f"{fmt(f)},{fmt(s)}")
        (out / f"sweep_{i:06d}.csv").write_text("\n".join(lines) + "\n")


def read_sweep_dir(path: str | Path) -> list[Sweep]:
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise SchemaError(f"{path}: no sweep CSVs found")
    sweeps = []
    for fp in files:
        lines = fp.read_text().splitlines()
        if not lines or lines[0].strip() != SWEEP_HEADER:
            raise SchemaError(f"{fp}: expected header {SWEEP_HEADER!r}")
        freqs, s11 = [], []
        for line in lines[1:]:
            if not line.strip():
                continue
            f, s = line.split(",")
            freqs.append(float(f))
            s11.append(float(s))
        sweeps.append(Sweep(np.array(freqs), np.array(s11)))
    return sweeps


# -- scenario configs --------------------------------------------------------

_SCENARIO_KEYS = {
    "duration", "sample_period", "baseline_frequency", "noise_sigma",
    "seed", "basin", "events", "mixing_time_constant", "liquid_ripple_ratio",
}
_BASIN_KEYS = {"volume", "concentration"}
_LIQUID_KEYS = {"type", "start_time", "concentration", "total_volume", "rate",
                "ripple_amplitude", "ripple_frequency", "decay_time"}
_SOLID_KEYS = {"type", "time", "mass", "ripple_frequency", "ripple_amplitude",
               "decay_time", "step_shift"}


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a YAML scenario config; offending keys are listed."""
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: scenario config must be a mapping")
    bad = sorted(set(data) - _SCENARIO_KEYS)
    if bad:
        raise SchemaError(f"{path}: unknown keys {bad}")
    if "duration" not in data:
        raise SchemaError(f"{path}: missing required key 'duration'")

    kwargs: dict = {"duration": float(data["duration"])}
    for key in ("sample_period", "baseline_frequency", "noise_sigma",
                "mixing_time_constant", "liquid_ripple_ratio"):
        if key in data:
            kwargs[key] = float(data[key])
    if "seed" in data:
        kwargs["seed"] = int(data["seed"])
    if "basin" in data:
        basin = data["basin"]
        bad = sorted(set(basin) - _BASIN_KEYS)
        if bad:
            raise SchemaError(f"{path}: unknown basin keys {bad}")
        kwargs["basin"] = BasinState(
            volume=float(basin.get("volume", 4000.0)),
            concentration=float(basin.get("concentration", 0.0)),
        )

    events: list[LiquidEvent | SolidEvent] = []
    for i, ev in enumerate(data.get("events") or []):
        kind = ev.get("type")
        if kind == "liquid":
            bad = sorted(set(ev) - _LIQUID_KEYS)
            if bad:
                raise SchemaError(f"{path}: events[{i}]: unknown keys {bad}")
            events.append(LiquidEvent(**{k: v for k, v in ev.items() if k != "type"}))
        elif kind == "solid":
            bad = sorted(set(ev) - _SOLID_KEYS)
            if bad:
                raise SchemaError(f"{path}: events[{i}]: unknown keys {bad}")
            events.append(SolidEvent(**{k: v for k, v in ev.items() if k != "type"}))
        else:
            raise SchemaError(f"{path}: events[{i}]: type must be liquid|solid")
    kwargs["events"] = tuple(events)
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


# -- manifests and reports ---------------------------------------------------

@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str
    seed: int
    output_dir: str
    tool_version: str


def write_manifest(manifest: RunManifest, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest.__dict__, indent=2, sort_keys=True) + "\n")
    return path


def write_reports_ndjson(reports, path: str | Path) -> None:
    lines = [json.dumps(r.to_json_dict()) for r in reports]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
