"""Trace analysis: resonance extraction, ripple spectroscopy, and the
two-stage solid/liquid sensing state machine.

The detector first scans the bandpassed derivative of the frequency-shift
signal for ripple energy in the surface-wave band (solid insertion -> FLUSH),
and otherwise fits the transient shift against the calibration curve to
estimate the injected solute concentration (-> ANALYZE).  Differentiating the
shift turns the static offset of a submerged solid into a single-sample
impulse, so only the ripple oscillation survives into the band feature.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal

from .response import (
    CalibrationCurve,
    ExpFit,
    RangeError,
    build_calibration_curve,
    fit_exponential,
    invert_concentration,
)
from .simulate import FrequencyTrace, Sweep

__all__ = [
    "EventClass",
    "Action",
    "PipelineConfig",
    "EventReport",
    "Pipeline",
    "ConfigError",
    "IngestError",
    "EdgeError",
    "NoEventError",
    "extract_resonance",
    "differentiate",
    "bandpass",
    "band_peak_magnitude",
    "classify_window",
    "estimate_concentration",
    "run_pipeline",
]


class ConfigError(ValueError):
    pass


class IngestError(ValueError):
    pass


class EdgeError(ValueError):
    """Sweep minimum sits on the sweep edge; the span must be widened."""


class NoEventError(ValueError):
    """No significant frequency shift present in the trace."""


class EventClass(str, enum.Enum):
    SOLID = "SOLID"
    LIQUID = "LIQUID"
    NONE = "NONE"


class Action(str, enum.Enum):
    FLUSH = "FLUSH"
    ANALYZE = "ANALYZE"
    IDLE = "IDLE"


@dataclass(frozen=True)
class PipelineConfig:
    band: tuple[float, float] = (1.6, 3.0)
    window_length: int = 128
    hop: int = 16
    solid_threshold: float = 1.8e4  # Hz/s absolute floor on the band feature
    noise_floor_factor: float = 5.0
    baseline_window: float = 30.0  # s of band-magnitude history for the noise floor
    f0_window: float = 10.0  # s used to establish the shift baseline and noise sigma
    calibration: CalibrationCurve | None = None
    injection_rate_assumed: float = 17.0  # mL/s
    settle_time: float = 5.0  # s lockout after a flush
    rebaseline_window: float = 8.0  # s of re-baselining after the lockout
    onset_sigma_factor: float = 3.0
    min_shift_hz: float = 20.0  # absolute onset floor for noiseless traces
    filter_order: int = 4
    min_window: int = 64  # shortest partial window analyzed during warmup
    max_jitter: float = 0.01  # fractional timestamp jitter tolerated

    def __post_init__(self):
        lo, hi = self.band
        if not 0.0 < lo < hi:
            raise ConfigError(f"band must satisfy 0 < low < high, got {self.band}")
        if self.window_length < 32:
            raise ConfigError(f"window_length must be >= 32, got {self.window_length}")
        if self.hop < 1:
            raise ConfigError(f"hop must be >= 1, got {self.hop}")
        if not 32 <= self.min_window <= self.window_length:
            raise ConfigError("min_window must be in [32, window_length]")

    def resolved_calibration(self) -> CalibrationCurve:
        return self.calibration if self.calibration is not None else build_calibration_curve()


@dataclass(frozen=True)
class EventReport:
    """Classifier output for one detected (or absent) event."""

    time: float
    event_class: EventClass
    band_peak_magnitude: float
    action: Action
    estimated_concentration: float | None = None
    fit: ExpFit | None = None
    concentration_in_span: bool = True

    def to_json_dict(self) -> dict:
        return {
            "time_s": self.time,
            "class": self.event_class.value,
            "band_peak_hz_per_s": self.band_peak_magnitude,
            "est_concentration_mol_per_l": self.estimated_concentration,
            "action": self.action.value,
        }


def extract_resonance(sweep: Sweep) -> float:
    """Resonance frequency: parabolic interpolation through the |S11| minimum."""
    y = sweep.s11_db
    i = int(np.argmin(y))
    if i == 0 or i == len(y) - 1:
        raise EdgeError(
            f"sweep minimum at edge index {i}; widen the span around "
            f"{sweep.frequencies[i]:.6g} Hz"
        )
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(sweep.frequencies[i])
    df = sweep.frequencies[i + 1] - sweep.frequencies[i]
    return float(sweep.frequencies[i] + 0.5 * (y0 - y2) / denom * df)


def differentiate(trace: FrequencyTrace) -> FrequencyTrace:
    """First difference over the sample period; output units Hz/s, length n-1."""
    if len(trace) < 2:
        raise ValueError(f"need >= 2 samples to differentiate, got {len(trace)}")
    d = np.diff(trace.samples) / trace.sample_period
    return FrequencyTrace(
        start_time=trace.start_time + 0.5 * trace.sample_period,
        sample_period=trace.sample_period,
        samples=d,
    )


def _bandpass_sos(band: tuple[float, float], fs: float, order: int) -> np.ndarray:
    lo, hi = band
    if not 0.0 < lo < hi < 0.5 * fs:
        raise ConfigError(
            f"band {band} must lie inside (0, Nyquist={0.5 * fs:.4g}) Hz"
        )
    return signal.butter(order, band, btype="bandpass", fs=fs, output="sos")


def _bandpass_array(x: np.ndarray, band: tuple[float, float], fs: float,
                    order: int = 4) -> np.ndarray:
    sos = _bandpass_sos(band, fs, order)
    return signal.sosfiltfilt(sos, x)


def bandpass(trace: FrequencyTrace, band: tuple[float, float] = (1.6, 3.0),
             order: int = 4) -> FrequencyTrace:
    """Zero-phase (forward-backward) bandpass of a trace."""
    fs = 1.0 / trace.sample_period
    return FrequencyTrace(
        start_time=trace.start_time,
        sample_period=trace.sample_period,
        samples=_bandpass_array(trace.samples, band, fs, order),
    )


def band_peak_magnitude(window: np.ndarray, band: tuple[float, float],
                        fs: float) -> float:
    """Peak amplitude-normalized DFT magnitude over bins inside ``band``.

    Hann taper with amplitude correction, so a unit in-band sinusoid reads
    close to 1.0 (bounded by scalloping loss).
    """
    x = np.asarray(window, float)
    n = len(x)
    taper = signal.windows.hann(n, sym=False)
    spec = np.abs(np.fft.rfft(x * taper)) * 2.0 / taper.sum()
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    lo, hi = band
    mask = (freqs >= lo) & (freqs <= hi)
    if not np.any(mask):
        raise ConfigError(
            f"no DFT bin inside band {band} for window of {n} samples at fs={fs:.4g}"
        )
    return float(spec[mask].max())


def classify_window(magnitude: float, cfg: PipelineConfig,
                    noise_floor: float) -> EventClass:
    """SOLID iff the band feature clears both the absolute and relative thresholds."""
    thr = max(cfg.solid_threshold, cfg.noise_floor_factor * noise_floor)
    return EventClass.SOLID if magnitude > thr else EventClass.NONE


def _onset_index(shift: np.ndarray, threshold: float) -> int | None:
    hits = np.flatnonzero(np.abs(shift) > threshold)
    return int(hits[0]) if hits.size else None


def estimate_concentration(
    trace: FrequencyTrace, cfg: PipelineConfig
) -> tuple[ExpFit, float]:
    """Fit the transient shift of a (solid-free) trace and invert the calibration.

    Time past the detected onset is converted to injected volume through the
    assumed constant injection rate.
    """
    calib = cfg.resolved_calibration()
    dt = trace.sample_period
    n_base = max(2, min(int(cfg.f0_window / dt), len(trace) // 4))
    f0 = float(np.median(trace.samples[:n_base]))
    sigma = float(np.std(trace.samples[:n_base]))
    shift = trace.samples - f0
    threshold = max(cfg.onset_sigma_factor * sigma, cfg.min_shift_hz)
    i0 = _onset_index(shift, threshold)
    if i0 is None:
        raise NoEventError(
            f"no shift beyond {threshold:.4g} Hz relative to baseline {f0:.6g} Hz"
        )
    t = trace.times
    v = cfg.injection_rate_assumed * (t[i0:] - t[i0])
    fit = fit_exponential(list(zip(v.tolist(), shift[i0:].tolist())))
    conc = invert_concentration(fit.a, calib)
    return fit, conc


class Pipeline:
    """Single-consumer streaming detector; feed samples in time order.

    Bounded working set: a ring buffer of derivative samples for the spectral
    scan, a band-magnitude history for the noise floor, and the (volume,
    shift) accumulation of the currently active liquid transient.
    """

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.calibration = cfg.resolved_calibration()
        self.dt: float | None = None
        self.prev: tuple[float, float] | None = None
        self.deriv: deque[tuple[float, float]] = deque(maxlen=cfg.window_length)
        self.mag_history: deque[float] = deque(maxlen=1)
        self.samples_since_window = 0
        # shift baseline
        self.f0: float | None = None
        self.sigma = 0.0
        self.base_buf: list[float] = []
        self.base_needed = cfg.f0_window
        self.base_start: float | None = None
        # liquid accumulation
        self.liquid_start: float | None = None
        self.liquid_samples: list[tuple[float, float]] = []
        # solid lockout / rebaseline
        self.lockout_until: float | None = None
        self.max_magnitude = 0.0
        self.last_time: float | None = None
        self.reports_emitted = 0
        self._sos: np.ndarray | None = None

    # -- internals ---------------------------------------------------------

    def _establish_rate(self, t: float) -> None:
        if self.dt is None and self.prev is not None:
            dt = t - self.prev[0]
            if dt <= 0:
                raise IngestError(f"non-increasing timestamps at t={t}")
            self.dt = dt
            n_hist = max(4, int(self.cfg.baseline_window / (self.cfg.hop * dt)))
            self.mag_history = deque(maxlen=n_hist)
            self._sos = _bandpass_sos(self.cfg.band, 1.0 / dt, self.cfg.filter_order)

    def _check_jitter(self, t: float) -> None:
        if self.dt is not None and self.prev is not None:
            step = t - self.prev[0]
            if abs(step - self.dt) > self.cfg.max_jitter * self.dt:
                raise IngestError(
                    f"timestamp jitter at t={t}: step {step:.6g} vs {self.dt:.6g}"
                )

    def _noise_floor(self) -> float:
        return float(np.median(self.mag_history)) if self.mag_history else 0.0

    def _scan_window(self, t: float) -> EventReport | None:
        buf = list(self.deriv)
        if len(buf) < self.cfg.min_window:
            return None
        times = np.array([b[0] for b in buf])
        x = np.array([b[1] for b in buf])
        filtered = signal.sosfiltfilt(self._sos, x)
        mag = band_peak_magnitude(filtered, self.cfg.band, 1.0 / self.dt)
        self.max_magnitude = max(self.max_magnitude, mag)
        floor = self._noise_floor()
        if self.lockout_until is not None and t < self.lockout_until:
            return None
        if classify_window(mag, self.cfg, floor) is EventClass.SOLID:
            peak_time = float(times[int(np.argmax(np.abs(filtered)))])
            return EventReport(
                time=peak_time,
                event_class=EventClass.SOLID,
                band_peak_magnitude=mag,
                action=Action.FLUSH,
            )
        self.mag_history.append(mag)
        return None

    def _begin_rebaseline(self, t: float) -> None:
        self.f0 = None
        self.base_buf = []
        self.base_needed = self.cfg.rebaseline_window
        self.base_start = None
        self.liquid_start = None
        self.liquid_samples = []
        self.deriv.clear()
        self.mag_history.clear()
        self.lockout_until = t + self.cfg.settle_time

    def _liquid_report(self) -> EventReport | None:
        if self.liquid_start is None or len(self.liquid_samples) < 3:
            return None
        try:
            fit = fit_exponential(self.liquid_samples)
        except Exception:
            return None
        try:
            conc = invert_concentration(fit.a, self.calibration)
            in_span = True
        except RangeError:
            conc = None
            in_span = False
        return EventReport(
            time=self.liquid_start,
            event_class=EventClass.LIQUID,
            band_peak_magnitude=self.max_magnitude,
            action=Action.ANALYZE,
            estimated_concentration=conc,
            fit=fit,
            concentration_in_span=in_span,
        )

    # -- public API --------------------------------------------------------

    def feed(self, t: float, f: float) -> list[EventReport]:
        self._establish_rate(t)
        self._check_jitter(t)
        self.last_time = t
        out: list[EventReport] = []

        if self.prev is not None and self.dt is not None:
            d = (f - self.prev[1]) / self.dt
            self.deriv.append((0.5 * (t + self.prev[0]), d))
            self.samples_since_window += 1
            if self.samples_since_window >= self.cfg.hop:
                self.samples_since_window = 0
                report = self._scan_window(t)
                if report is not None:
                    out.append(report)
                    self.reports_emitted += 1
                    self._begin_rebaseline(t)
        self.prev = (t, f)

        in_lockout = self.lockout_until is not None and t < self.lockout_until
        if self.f0 is None and not in_lockout:
            if self.base_start is None:
                self.base_start = t
            self.base_buf.append(f)
            if t - self.base_start >= self.base_needed:
                self.f0 = float(np.median(self.base_buf))
                self.sigma = float(np.std(self.base_buf))
                self.base_buf = []
        elif self.f0 is not None and not in_lockout:
            shift = f - self.f0
            threshold = max(
                self.cfg.onset_sigma_factor * self.sigma, self.cfg.min_shift_hz
            )
            if self.liquid_start is None and abs(shift) > threshold:
                self.liquid_start = t
            if self.liquid_start is not None:
                v = self.cfg.injection_rate_assumed * (t - self.liquid_start)
                self.liquid_samples.append((v, shift))
        return out

    def finalize(self) -> list[EventReport]:
        out: list[EventReport] = []
        report = self._liquid_report()
        if report is not None:
            out.append(report)
            self.reports_emitted += 1
        if self.reports_emitted == 0:
            out.append(
                EventReport(
                    time=self.last_time if self.last_time is not None else 0.0,
                    event_class=EventClass.NONE,
                    band_peak_magnitude=self.max_magnitude,
                    action=Action.IDLE,
                )
            )
        return out


def compute_stages(trace: FrequencyTrace, cfg: PipelineConfig) -> dict[str, np.ndarray]:
    """Offline view of the analysis chain for dumping and plotting.

    Returns time/value arrays for the shift, its derivative, the bandpassed
    derivative, and the hopped band-peak-magnitude timeline.
    """
    dt = trace.sample_period
    fs = 1.0 / dt
    n_base = max(2, min(int(cfg.f0_window / dt), len(trace) // 4))
    f0 = float(np.median(trace.samples[:n_base]))
    shift = FrequencyTrace(trace.start_time, dt, trace.samples - f0)
    deriv = differentiate(shift)
    filtered = bandpass(deriv, cfg.band, cfg.filter_order)
    mag_times, mags = [], []
    for end in range(cfg.min_window, len(filtered) + 1, cfg.hop):
        start = max(0, end - cfg.window_length)
        seg = filtered.samples[start:end]
        mag_times.append(filtered.times[end - 1])
        mags.append(band_peak_magnitude(seg, cfg.band, fs))
    return {
        "shift_times": shift.times,
        "shift": shift.samples,
        "derivative_times": deriv.times,
        "derivative": deriv.samples,
        "filtered_times": filtered.times,
        "filtered": filtered.samples,
        "magnitude_times": np.array(mag_times),
        "magnitude": np.array(mags),
    }


def run_pipeline(samples, cfg: PipelineConfig):
    """Run the streaming detector over (time, frequency) pairs; yields EventReports."""
    p = Pipeline(cfg)
    for t, f in samples:
        yield from p.feed(t, f)
    yield from p.finalize()
