"""Command-line front end: design math, scenario simulation, calibration,
and trace analysis with rendered report figures."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, io, microstrip, plots
from .constants import SAMPLE_PERIOD_S
from .pipeline import (
    Action,
    PipelineConfig,
    compute_stages,
    extract_resonance,
    run_pipeline,
)
from .response import SensorShiftModel, build_calibration_curve
from .simulate import simulate_scenario, synth_sweep

log = logging.getLogger("tsense")

EXIT_USER_ERROR = 2
EXIT_NUMERIC_ERROR = 3


def _setup_logging() -> None:
    level = os.environ.get("TS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(exc: BaseException) -> None:
    if isinstance(exc, (ValueError, OSError)):
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USER_ERROR)
    click.echo(f"internal numeric failure: {exc}", err=True)
    sys.exit(EXIT_NUMERIC_ERROR)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Time-transient RF water sensing toolkit."""
    _setup_logging()


@main.command()
@click.option("--w", "width", type=float, required=True, help="Trace width (m).")
@click.option("--h", "height", type=float, required=True, help="Substrate height (m).")
@click.option("--eps-r", type=float, required=True, help="Substrate relative permittivity.")
@click.option("--f", "freq", type=float, required=True, help="Design frequency (Hz).")
@click.option("--stub-c", type=float, default=None,
              help="Target stub capacitance (F) for length synthesis.")
def design(width: float, height: float, eps_r: float, freq: float,
           stub_c: float | None) -> None:
    """Microstrip line parameters and open-stub synthesis."""
    try:
        line = microstrip.MicrostripLine(width, height, eps_r)
        eps_eff = line.eps_eff
        z0 = line.z0
        beta = microstrip.phase_constant(freq, eps_eff)
        lam_g = microstrip.guided_wavelength(freq, eps_eff)
        result = {
            "eps_eff": eps_eff,
            "z0_ohm": z0,
            "beta_rad_per_m": beta,
            "guided_wavelength_m": lam_g,
        }
        if stub_c is not None:
            result["stub_length_m"] = microstrip.synthesize_stub_length(
                stub_c, freq, line
            )
    except Exception as exc:
        _fail(exc)
    width_col = max(len(k) for k in result)
    for key, val in result.items():
        click.echo(f"{key:<{width_col}}  {io.fmt(val)}")
    click.echo(json.dumps(result))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--emit-sweeps", is_flag=True,
              help="Also write one synthetic S11 sweep CSV per timestep.")
def simulate(config_path: str, seed: int | None, out_dir: str,
             emit_sweeps: bool) -> None:
    """Render a scripted scenario to a trace CSV (and optional sweep directory)."""
    try:
        cfg = io.load_scenario(config_path)
        if seed is not None:
            cfg = dataclasses.replace(cfg, seed=seed)
        manifest = io.RunManifest(
            command="simulate",
            config_path=str(config_path),
            seed=cfg.seed,
            output_dir=str(out_dir),
            tool_version=__version__,
        )
        io.write_manifest(manifest, out_dir)
        trace = simulate_scenario(cfg)
        io.write_trace_csv(trace, Path(out_dir) / "trace.csv")
        if emit_sweeps:
            sweeps = [synth_sweep(f) for f in trace.samples]
            io.write_sweep_dir(sweeps, Path(out_dir) / "sweeps")
    except Exception as exc:
        _fail(exc)
    click.echo(f"wrote {len(trace)} samples to {out_dir}/trace.csv")


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="Trace CSV, or a directory of per-timestep sweep CSVs.")
@click.option("--calibration", "calibration_path", type=click.Path(exists=True),
              default=None, help="Calibration CSV; defaults to the model-derived curve.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--dump-stages", is_flag=True,
              help="Write intermediate stage CSVs and a stages figure.")
@click.option("--sweep-period", type=float, default=SAMPLE_PERIOD_S,
              help="Sample period assumed for sweep-directory input (s).")
def analyze(in_path: str, calibration_path: str | None, out_dir: str,
            dump_stages: bool, sweep_period: float) -> None:
    """Run the two-stage detector over a trace and write NDJSON event reports."""
    try:
        calibration = (
            io.read_calibration_csv(calibration_path) if calibration_path else None
        )
        cfg = PipelineConfig(calibration=calibration)
        manifest = io.RunManifest(
            command="analyze",
            config_path=str(in_path),
            seed=0,
            output_dir=str(out_dir),
            tool_version=__version__,
        )
        io.write_manifest(manifest, out_dir)

        src = Path(in_path)
        if src.is_dir():
            sweeps = io.read_sweep_dir(src)
            rows = [
                (i * sweep_period, extract_resonance(sw))
                for i, sw in enumerate(sweeps)
            ]
        else:
            rows = io.read_trace_csv(src)
        trace = io.trace_from_rows(rows, max_jitter=cfg.max_jitter)

        reports = list(run_pipeline(rows, cfg))
        out = Path(out_dir)
        io.write_reports_ndjson(reports, out / "reports.ndjson")
        plots.plot_trace_overview(trace, reports, out / "overview.png")
        if dump_stages:
            stages = compute_stages(trace, cfg)
            for name in ("shift", "derivative", "filtered", "magnitude"):
                lines = [f"time_s,{name}"]
                for t, v in zip(stages[f"{name}_times"], stages[name]):
                    lines.append(f"{io.fmt(t)},{io.fmt(v)}")
                (out / f"stage_{name}.csv").write_text("\n".join(lines) + "\n")
            plots.plot_stages(stages, out / "stages.png")
    except Exception as exc:
        _fail(exc)
    n_flush = sum(1 for r in reports if r.action is Action.FLUSH)
    n_analyze = sum(1 for r in reports if r.action is Action.ANALYZE)
    click.echo(
        f"{len(rows)} samples: {n_flush} FLUSH, {n_analyze} ANALYZE "
        f"-> {out_dir}/reports.ndjson"
    )


@main.command()
@click.option("--grid", default="3.125e-3:5e-1:8",
              help="Concentration grid start:stop:count (mol/L, log-spaced).")
@click.option("--out", "out_path", type=click.Path(), required=True)
def calibrate(grid: str, out_path: str) -> None:
    """Build the model-derived calibration curve and write it as CSV (plus figure)."""
    try:
        parts = grid.split(":")
        if len(parts) != 3:
            raise io.SchemaError(f"grid must be start:stop:count, got {grid!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 2 or start <= 0 or stop <= start:
            raise io.SchemaError(
                f"grid needs count >= 2 and 0 < start < stop, got {grid!r}"
            )
        concs = tuple(np.geomspace(start, stop, count))
        curve = build_calibration_curve(concs, SensorShiftModel())
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        io.write_calibration_csv(curve, out)
        plots.plot_calibration(curve, out.with_suffix(".png"))
    except Exception as exc:
        _fail(exc)
    click.echo(f"wrote {len(curve.concentrations)}-knot calibration to {out_path}")


if __name__ == "__main__":
    main()
