"""Scenario simulator: resonance-frequency traces for scripted basin events.

Liquid injections advance the basin concentration by perfect mixing and pull
the observed shift toward the calibrated steady value through a first-order
mixing lag; both liquid and solid events excite a damped-sinusoid surface
ripple on the tracked resonance.  White Gaussian measurement noise is added
from a per-call seeded generator, so traces are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .response import (
    BasinState,
    CalibrationCurve,
    build_calibration_curve,
    mix_concentration,
    steady_shift,
)

__all__ = [
    "DEFAULT_SOLID_RIPPLE_AMPLITUDE",
    "DEFAULT_RIPPLE_FREQUENCY",
    "DEFAULT_RIPPLE_DECAY",
    "DEFAULT_SOLID_MASS",
    "FrequencyTrace",
    "Sweep",
    "LiquidEvent",
    "SolidEvent",
    "ScenarioConfig",
    "ripple_burst",
    "simulate_scenario",
    "synth_sweep",
]

# Resonance deviation (Hz) of the ripple excited by the 50 g reference solid.
DEFAULT_SOLID_RIPPLE_AMPLITUDE = 20e3
DEFAULT_RIPPLE_FREQUENCY = 2.2  # Hz, center of the 1.6-3.0 Hz surface-wave band
DEFAULT_RIPPLE_DECAY = 2.0  # s
DEFAULT_SOLID_MASS = 50.0  # g
DEFAULT_SOLID_STEP = 30e3  # Hz, static offset from the displaced dielectric


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled resonance-frequency time series."""

    start_time: float
    sample_period: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, float))
        if self.sample_period <= 0:
            raise ValueError(f"sample_period must be > 0, got {self.sample_period}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trace samples must be finite")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.sample_period * np.arange(len(self.samples))

    @property
    def nyquist(self) -> float:
        return 0.5 / self.sample_period


@dataclass(frozen=True)
class Sweep:
    """A single |S11| sweep in dB over ascending frequencies."""

    frequencies: np.ndarray
    s11_db: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frequencies", np.asarray(self.frequencies, float))
        object.__setattr__(self, "s11_db", np.asarray(self.s11_db, float))
        if self.frequencies.shape != self.s11_db.shape:
            raise ValueError("frequencies and s11_db must have equal length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly ascending")


@dataclass(frozen=True)
class LiquidEvent:
    """Injection of solution at a constant rate starting at ``start_time``."""

    start_time: float  # s
    concentration: float  # mol/L
    total_volume: float  # mL
    rate: float = 17.0  # mL/s
    ripple_amplitude: float | None = None  # Hz; None -> ratio of the solid default
    ripple_frequency: float = DEFAULT_RIPPLE_FREQUENCY
    decay_time: float = DEFAULT_RIPPLE_DECAY

    def __post_init__(self):
        if self.concentration <= 0 or self.total_volume <= 0 or self.rate <= 0:
            raise ValueError("liquid event parameters must be positive")
        if self.start_time < 0:
            raise ValueError(f"start_time must be >= 0, got {self.start_time}")


@dataclass(frozen=True)
class SolidEvent:
    """Insertion of a solid object, exciting a ripple burst and a static offset."""

    time: float  # s
    mass: float = DEFAULT_SOLID_MASS  # g
    ripple_frequency: float = DEFAULT_RIPPLE_FREQUENCY  # Hz
    ripple_amplitude: float = DEFAULT_SOLID_RIPPLE_AMPLITUDE  # Hz at 50 g
    decay_time: float = DEFAULT_RIPPLE_DECAY  # s
    step_shift: float = DEFAULT_SOLID_STEP  # Hz

    def __post_init__(self):
        if self.time < 0:
            raise ValueError(f"time must be >= 0, got {self.time}")
        if self.mass <= 0 or self.ripple_amplitude <= 0 or self.decay_time <= 0:
            raise ValueError("mass, ripple_amplitude and decay_time must be positive")
        if self.ripple_frequency <= 0:
            raise ValueError(f"ripple_frequency must be > 0, got {self.ripple_frequency}")


def ripple_burst(t_since_event: float, ev: SolidEvent) -> float:
    """Resonance deviation (Hz) of the surface ripple ``t_since_event`` after insertion.

    Damped sinusoid; amplitude scales linearly with mass relative to the 50 g
    reference.
    """
    if t_since_event < 0:
        raise ValueError(f"t_since_event must be >= 0, got {t_since_event}")
    amp = ev.ripple_amplitude * ev.mass / DEFAULT_SOLID_MASS
    return (
        amp
        * math.exp(-t_since_event / ev.decay_time)
        * math.sin(2.0 * math.pi * ev.ripple_frequency * t_since_event)
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Scripted basin scenario driving the simulator."""

    duration: float  # s
    sample_period: float = 0.110
    baseline_frequency: float = 700.5e6
    basin: BasinState = field(default_factory=lambda: BasinState(4000.0, 0.0))
    noise_sigma: float = 200.0  # Hz
    events: tuple[LiquidEvent | SolidEvent, ...] = ()
    seed: int = 0
    calibration: CalibrationCurve | None = None
    mixing_time_constant: float = 3.0  # s, lag between mixture and observed shift
    liquid_ripple_ratio: float = 0.15  # of the 50 g solid ripple amplitude
    frequency_band: tuple[float, float] = (670e6, 730e6)
    ripple_band: tuple[float, float] = (1.6, 3.0)
    enforce_bands: bool = True

    def __post_init__(self):
        if self.duration <= 0 or self.sample_period <= 0:
            raise ValueError("duration and sample_period must be positive")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        starts = [self._event_time(e) for e in self.events]
        if any(t < 0 for t in starts):
            raise ValueError("event times must be >= 0")
        if any(b < a for a, b in zip(starts, starts[1:])):
            raise ValueError("events must be sorted by start time")
        nyquist = 0.5 / self.sample_period
        if self.enforce_bands:
            lo, hi = self.frequency_band
            if not lo <= self.baseline_frequency <= hi:
                raise ValueError(
                    f"baseline_frequency {self.baseline_frequency} outside [{lo}, {hi}] Hz"
                )
            for e in self.events:
                fr = e.ripple_frequency
                blo, bhi = self.ripple_band
                if not blo <= fr <= bhi:
                    raise ValueError(
                        f"ripple_frequency {fr} outside [{blo}, {bhi}] Hz"
                    )
                if fr >= nyquist:
                    raise ValueError(
                        f"ripple_frequency {fr} at or above Nyquist {nyquist:.3f} Hz"
                    )

    @staticmethod
    def _event_time(e: LiquidEvent | SolidEvent) -> float:
        return e.start_time if isinstance(e, LiquidEvent) else e.time


def simulate_scenario(cfg: ScenarioConfig) -> FrequencyTrace:
    """Render the scenario to a resonance-frequency trace, deterministic per seed."""
    calib = cfg.calibration if cfg.calibration is not None else build_calibration_curve()
    n = int(round(cfg.duration / cfg.sample_period))
    dt = cfg.sample_period
    t = dt * np.arange(n)

    liquids = [e for e in cfg.events if isinstance(e, LiquidEvent)]
    solids = [e for e in cfg.events if isinstance(e, SolidEvent)]

    # liquid path: mixing mass balance -> calibrated steady shift -> first-order lag
    shift = np.zeros(n)
    if liquids:
        base_shift = steady_shift(cfg.basin.concentration, calib)
        state = cfg.basin
        poured = {e: 0.0 for e in liquids}
        alpha = 1.0 - math.exp(-dt / cfg.mixing_time_constant) \
            if cfg.mixing_time_constant > 0 else 1.0
        obs = 0.0
        for k in range(n):
            for e in liquids:
                if t[k] >= e.start_time and poured[e] < e.total_volume:
                    dv = min(e.rate * dt, e.total_volume - poured[e])
                    state = mix_concentration(state, dv, e.concentration)
                    poured[e] += dv
            target = steady_shift(state.concentration, calib) - base_shift
            obs += alpha * (target - obs)
            shift[k] = obs

    # ripple bursts: solids at full amplitude, liquids at a small ratio
    ripple = np.zeros(n)
    for e in solids:
        mask = t >= e.time
        ts = t[mask] - e.time
        amp = e.ripple_amplitude * e.mass / DEFAULT_SOLID_MASS
        ripple[mask] += (
            amp * np.exp(-ts / e.decay_time) * np.sin(2 * np.pi * e.ripple_frequency * ts)
        )
        shift[mask] += e.step_shift
    for e in liquids:
        amp = (
            e.ripple_amplitude
            if e.ripple_amplitude is not None
            else cfg.liquid_ripple_ratio * DEFAULT_SOLID_RIPPLE_AMPLITUDE
        )
        mask = t >= e.start_time
        ts = t[mask] - e.start_time
        ripple[mask] += (
            amp * np.exp(-ts / e.decay_time) * np.sin(2 * np.pi * e.ripple_frequency * ts)
        )

    rng = np.random.default_rng(cfg.seed)
    noise = rng.normal(0.0, cfg.noise_sigma, n) if cfg.noise_sigma > 0 else 0.0
    samples = cfg.baseline_frequency + shift + ripple + noise
    return FrequencyTrace(start_time=0.0, sample_period=dt, samples=samples)


def synth_sweep(
    resonance: float,
    depth_db: float = 25.0,
    q_factor: float = 50.0,
    span: tuple[float, float] = (670e6, 730e6),
    n_points: int = 201,
) -> Sweep:
    """Synthetic |S11| sweep with a Lorentzian dip at ``resonance``."""
    lo, hi = span
    if not lo < resonance < hi:
        raise ValueError(f"resonance {resonance} outside span [{lo}, {hi}]")
    if n_points < 16:
        raise ValueError(f"n_points must be >= 16, got {n_points}")
    if q_factor <= 0:
        raise ValueError(f"q_factor must be > 0, got {q_factor}")
    f = np.linspace(lo, hi, n_points)
    x = 2.0 * q_factor * (f - resonance) / resonance
    s11 = -depth_db / (1.0 + x**2)
    return Sweep(frequencies=f, s11_db=s11)
