"""Basin state, steady-state calibration, and transient-shift fitting.

The calibration curve maps NaCl molarity to steady resonance shift.  The
default curve is model-derived (concentration -> saline permittivity ->
perturbed resonance); measured curves can be loaded from CSV.  Interpolation
is piecewise linear in log-concentration because the calibration ladder is
geometric; a c = 0 baseline knot, when present, is bridged linearly in c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from . import dielectric
from .constants import CONCENTRATION_LADDER

__all__ = [
    "BasinState",
    "Injection",
    "CalibrationCurve",
    "ExpFit",
    "FitError",
    "RangeError",
    "SensorShiftModel",
    "mix_concentration",
    "steady_shift",
    "invert_concentration",
    "transient_shift",
    "fit_exponential",
    "build_calibration_curve",
]


class RangeError(ValueError):
    """Query outside the span covered by the calibration curve."""


class FitError(ValueError):
    """Degenerate or insufficient data for the exponential fit."""


@dataclass(frozen=True)
class BasinState:
    """Liquid volume (mL) and NaCl concentration (mol/L) in the basin."""

    volume: float
    concentration: float

    def __post_init__(self):
        if self.volume <= 0:
            raise ValueError(f"volume must be > 0, got {self.volume}")
        if self.concentration < 0:
            raise ValueError(f"concentration must be >= 0, got {self.concentration}")


@dataclass(frozen=True)
class Injection:
    """A scheduled liquid addition."""

    concentration: float  # mol/L
    total_volume: float  # mL
    start_time: float  # s
    rate: float = 17.0  # mL/s

    def __post_init__(self):
        if self.concentration <= 0 or self.total_volume <= 0 or self.rate <= 0:
            raise ValueError("injection parameters must be positive")
        if self.start_time < 0:
            raise ValueError(f"start_time must be >= 0, got {self.start_time}")


def mix_concentration(
    state: BasinState, added_volume: float, added_concentration: float
) -> BasinState:
    """Perfect-mixing mass balance after adding a volume of solution."""
    if added_volume < 0:
        raise ValueError(f"added_volume must be >= 0, got {added_volume}")
    if added_volume == 0:
        return state
    new_volume = state.volume + added_volume
    new_conc = (
        state.concentration * state.volume + added_concentration * added_volume
    ) / new_volume
    return BasinState(new_volume, new_conc)


@dataclass(frozen=True)
class CalibrationCurve:
    """Monotone concentration -> steady shift map, exact at its knots."""

    concentrations: tuple[float, ...]
    shifts: tuple[float, ...]

    def __post_init__(self):
        c = np.asarray(self.concentrations, float)
        s = np.asarray(self.shifts, float)
        if c.size != s.size or c.size < 2:
            raise ValueError("curve needs >= 2 (concentration, shift) points")
        if c[0] < 0:
            raise ValueError("concentrations must be >= 0")
        if np.any(np.diff(c) <= 0):
            raise ValueError("concentrations must be strictly increasing")
        ds = np.diff(s)
        if np.any(ds == 0) or (np.any(ds > 0) and np.any(ds < 0)):
            raise ValueError("shifts must be strictly monotone")

    @property
    def increasing(self) -> bool:
        return self.shifts[-1] > self.shifts[0]

    @property
    def concentration_span(self) -> tuple[float, float]:
        return self.concentrations[0], self.concentrations[-1]

    @property
    def shift_span(self) -> tuple[float, float]:
        lo, hi = self.shifts[0], self.shifts[-1]
        return (lo, hi) if lo <= hi else (hi, lo)


def _segment_index(values: tuple[float, ...], x: float) -> int:
    # rightmost segment [values[i], values[i+1]] containing x
    for i in range(len(values) - 1):
        if values[i] <= x <= values[i + 1]:
            return i
    raise AssertionError("x not bracketed")


def steady_shift(c: float, curve: CalibrationCurve) -> float:
    """Steady-state resonance shift (Hz) at concentration ``c`` by knot interpolation."""
    c_lo, c_hi = curve.concentration_span
    if not c_lo <= c <= c_hi:
        raise RangeError(
            f"concentration {c} outside calibration span [{c_lo}, {c_hi}] mol/L"
        )
    i = _segment_index(curve.concentrations, c)
    c0, c1 = curve.concentrations[i], curve.concentrations[i + 1]
    s0, s1 = curve.shifts[i], curve.shifts[i + 1]
    if c == c0:
        return s0
    if c == c1:
        return s1
    if c0 == 0.0:
        w = (c - c0) / (c1 - c0)
    else:
        w = (math.log(c) - math.log(c0)) / (math.log(c1) - math.log(c0))
    return s0 + w * (s1 - s0)


def invert_concentration(shift: float, curve: CalibrationCurve) -> float:
    """Unique concentration whose steady shift equals ``shift``."""
    s_lo, s_hi = curve.shift_span
    if not s_lo <= shift <= s_hi:
        raise RangeError(
            f"shift {shift} outside calibration shift span [{s_lo}, {s_hi}] Hz"
        )
    shifts = curve.shifts if curve.increasing else tuple(-s for s in curve.shifts)
    target = shift if curve.increasing else -shift
    i = _segment_index(shifts, target)
    s0, s1 = shifts[i], shifts[i + 1]
    c0, c1 = curve.concentrations[i], curve.concentrations[i + 1]
    if target == s0:
        return c0
    if target == s1:
        return c1
    w = (target - s0) / (s1 - s0)
    if c0 == 0.0:
        return c0 + w * (c1 - c0)
    return math.exp(math.log(c0) + w * (math.log(c1) - math.log(c0)))


@dataclass(frozen=True)
class ExpFit:
    """Saturating-exponential fit shift(v) = a*(1 - exp(-b*v))."""

    a: float  # Hz, asymptotic shift
    b: float  # 1/mL, rate constant
    residual_rms: float = 0.0
    b_identifiable: bool = True

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"b must be > 0, got {self.b}")
        if self.residual_rms < 0:
            raise ValueError(f"residual_rms must be >= 0, got {self.residual_rms}")


def transient_shift(v: float, fit: ExpFit) -> float:
    """Shift after adding volume ``v`` (mL): a*(1 - exp(-b*v))."""
    if v < 0:
        raise ValueError(f"volume must be >= 0, got {v}")
    return fit.a * -math.expm1(-fit.b * v)


def fit_exponential(samples: list[tuple[float, float]]) -> ExpFit:
    """Least-squares fit of (volume, shift) samples to a*(1 - exp(-b*v)).

    Separable in a: for a trial b the optimal amplitude is closed-form, so the
    search is one-dimensional in log(b), then polished jointly.
    """
    if len(samples) < 3:
        raise FitError(f"need >= 3 samples, got {len(samples)}")
    v = np.asarray([s[0] for s in samples], float)
    y = np.asarray([s[1] for s in samples], float)
    if np.any(v < 0):
        raise FitError("volumes must be >= 0")
    if len(np.unique(v)) != len(v):
        raise FitError("volumes must be distinct")
    vmax = float(v.max())
    if vmax == 0:
        raise FitError("all volumes zero")

    nonzero = v > 0
    if np.all(y == 0.0):
        return ExpFit(a=0.0, b=1.0 / vmax, residual_rms=0.0, b_identifiable=False)
    if np.all(y[nonzero] == y[nonzero][0]) and np.any(y[nonzero] != 0.0) and nonzero.sum() >= 2:
        # a pure step carries no rate information
        raise FitError("shifts constant over distinct volumes: rate unidentifiable")

    def amp_for(b: float) -> float:
        m = -np.expm1(-b * v)
        denom = float(m @ m)
        return 0.0 if denom == 0.0 else float(m @ y) / denom

    def sse_logb(lb: float) -> float:
        b = math.exp(lb)
        m = -np.expm1(-b * v)
        a = amp_for(b)
        r = y - a * m
        return float(r @ r)

    # coarse bracket over plausible rates, then 1-D refine
    grid = np.log(np.geomspace(1e-2 / vmax, 1e2 / vmax, 200))
    best = min(grid, key=sse_logb)
    lo = best - (grid[1] - grid[0])
    hi = best + (grid[1] - grid[0])
    res = minimize_scalar(sse_logb, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    b0 = math.exp(res.x)
    a0 = amp_for(b0)

    def resid(p):
        return p[0] * -np.expm1(-p[1] * v) - y

    sol = least_squares(resid, x0=[a0, b0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    a_hat, b_hat = float(sol.x[0]), float(sol.x[1])
    if b_hat <= 0 or not math.isfinite(a_hat) or not math.isfinite(b_hat):
        raise FitError("exponential fit diverged")
    rms = float(np.sqrt(np.mean(resid(sol.x) ** 2)))
    return ExpFit(a=a_hat, b=b_hat, residual_rms=rms)


@dataclass(frozen=True)
class SensorShiftModel:
    """Perturbation model turning water permittivity into a resonance shift.

    The resonator sees a background effective permittivity plus a small
    coupled fraction of the water's real permittivity; the resonance scales
    as 1/sqrt of the total.  Coefficients are declared model parameters, not
    measured values.
    """

    reference_frequency: float = 700.5e6  # Hz, zero-concentration resonance
    coupling: float = 0.02
    background_permittivity: float = 10.0
    temperature: float = 25.0
    salinity_model: dielectric.StogrynModel | dielectric.TableModel = field(
        default_factory=dielectric.StogrynModel
    )

    def _eps_total(self, c: float) -> float:
        p = dielectric.saline_params_from_concentration(
            c, self.temperature, self.salinity_model
        )
        eps = dielectric.debye_saline(self.reference_frequency, p)
        return self.background_permittivity + self.coupling * eps.real_part

    def resonance(self, c: float) -> float:
        return self.reference_frequency * math.sqrt(
            self._eps_total(0.0) / self._eps_total(c)
        )

    def shift(self, c: float) -> float:
        return self.resonance(c) - self.reference_frequency


def build_calibration_curve(
    concentrations: tuple[float, ...] = CONCENTRATION_LADDER,
    model: SensorShiftModel | None = None,
    include_zero: bool = True,
) -> CalibrationCurve:
    """Model-derived calibration curve over a concentration grid."""
    if model is None:
        model = SensorShiftModel()
    concs = tuple(sorted(concentrations))
    if len(concs) < 1 or (len(concs) < 2 and not include_zero):
        raise ValueError("need at least 2 grid points (including any zero knot)")
    points = []
    if include_zero and (not concs or concs[0] > 0.0):
        points.append((0.0, 0.0))
    for c in concs:
        points.append((c, model.shift(c)))
    if len(points) < 2:
        raise ValueError("need at least 2 grid points")
    return CalibrationCurve(
        concentrations=tuple(p[0] for p in points),
        shifts=tuple(p[1] for p in points),
    )
