"""Matplotlib figures rendered next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import EventReport, Action  # noqa: E402
from .response import CalibrationCurve  # noqa: E402
from .simulate import FrequencyTrace  # noqa: E402

__all__ = ["plot_trace_overview", "plot_stages", "plot_calibration"]


def plot_trace_overview(trace: FrequencyTrace, reports: list[EventReport],
                        path: str | Path) -> None:
    """Raw resonance trace with detected events marked."""
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(trace.times, trace.samples * 1e-6, lw=0.8)
    for r in reports:
        if r.action is Action.IDLE:
            continue
        color = "tab:red" if r.action is Action.FLUSH else "tab:green"
        ax.axvline(r.time, color=color, ls="--", lw=1)
        ax.annotate(r.action.value, (r.time, ax.get_ylim()[1]),
                    color=color, fontsize=8, ha="left", va="top")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("resonance (MHz)")
    ax.set_title("Tracked resonance and detected events")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_stages(stages: dict, path: str | Path) -> None:
    """Four-panel view: shift, derivative, bandpassed derivative, band feature."""
    fig, axes = plt.subplots(4, 1, figsize=(9, 9), sharex=True)
    axes[0].plot(stages["shift_times"], stages["shift"] * 1e-3, lw=0.8)
    axes[0].set_ylabel("shift (kHz)")
    axes[1].plot(stages["derivative_times"], stages["derivative"] * 1e-3, lw=0.6)
    axes[1].set_ylabel("d(shift)/dt (kHz/s)")
    axes[2].plot(stages["filtered_times"], stages["filtered"] * 1e-3, lw=0.6)
    axes[2].set_ylabel("bandpassed (kHz/s)")
    axes[3].plot(stages["magnitude_times"], stages["magnitude"] * 1e-3,
                 marker=".", lw=0.8)
    axes[3].set_ylabel("band peak (kHz/s)")
    axes[3].set_xlabel("time (s)")
    axes[0].set_title("Analysis stages")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_calibration(curve: CalibrationCurve, path: str | Path) -> None:
    """Steady shift versus concentration (log axis over the positive knots)."""
    concs = list(curve.concentrations)
    shifts = [s * 1e-3 for s in curve.shifts]
    fig, ax = plt.subplots(figsize=(6, 4))
    pos = [(c, s) for c, s in zip(concs, shifts) if c > 0]
    ax.semilogx([p[0] for p in pos], [p[1] for p in pos], marker="o")
    ax.set_xlabel("NaCl concentration (mol/L)")
    ax.set_ylabel("steady shift (kHz)")
    ax.set_title("Calibration curve")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
