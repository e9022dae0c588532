"""Microstrip transmission-line design math for the stub-loaded sensor.

Effective permittivity and characteristic impedance use the standard wide-trace
(w/h >= 1) closed forms; narrow traces are rejected rather than extrapolated.
Line transformations genuinely have poles, which are surfaced as an explicit
marker value instead of raising.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .constants import SPEED_OF_LIGHT

__all__ = [
    "OPEN",
    "POLE",
    "is_pole",
    "OutOfValidityError",
    "SynthesisError",
    "MicrostripLine",
    "LineSection",
    "effective_permittivity",
    "characteristic_impedance",
    "phase_constant",
    "guided_wavelength",
    "terminated_line_impedance",
    "open_stub_impedance",
    "synthesize_stub_length",
]

# Sentinel load for an open-ended line.
OPEN = object()

# Marker returned where a line transformation has a pole (infinite impedance).
POLE = complex(math.inf, math.inf)

_POLE_RATIO = 1e-12


def is_pole(z: complex) -> bool:
    return z == POLE or not (math.isfinite(z.real) and math.isfinite(z.imag))


class OutOfValidityError(ValueError):
    """Geometry outside the validity range of the closed-form approximation."""


class SynthesisError(ValueError):
    """No stub length can realize the requested reactance."""


def effective_permittivity(w: float, h: float, eps_r: float) -> float:
    """Quasi-static effective permittivity of a microstrip of width ``w`` over substrate ``h``."""
    if w <= 0 or h <= 0:
        raise ValueError(f"geometry must be positive, got w={w}, h={h}")
    if eps_r < 1:
        raise ValueError(f"eps_r must be >= 1, got {eps_r}")
    return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 * (1.0 + 12.0 * h / w) ** -0.5


def characteristic_impedance(w: float, h: float, eps_r: float) -> float:
    """Characteristic impedance (ohm) for wide traces, w/h >= 1.

    Uses the 1.444 constant of the standard reference inside the log term.
    """
    if w <= 0 or h <= 0:
        raise ValueError(f"geometry must be positive, got w={w}, h={h}")
    if eps_r < 1:
        raise ValueError(f"eps_r must be >= 1, got {eps_r}")
    u = w / h
    if u < 1.0:
        raise OutOfValidityError(
            f"w/h = {u:.4g} < 1: narrow-trace geometry outside the wide-trace formula"
        )
    eps_eff = effective_permittivity(w, h, eps_r)
    return 120.0 * math.pi / (
        math.sqrt(eps_eff) * (u + 1.393 + 0.667 * math.log(u + 1.444))
    )


def phase_constant(f: float, eps_eff: float) -> float:
    """Propagation phase constant beta (rad/m) at frequency ``f``."""
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    if eps_eff < 1:
        raise ValueError(f"eps_eff must be >= 1, got {eps_eff}")
    return 2.0 * math.pi * f * math.sqrt(eps_eff) / SPEED_OF_LIGHT


def guided_wavelength(f: float, eps_eff: float) -> float:
    """Guided wavelength lambda_g = 2*pi/beta (m)."""
    return 2.0 * math.pi / phase_constant(f, eps_eff)


@dataclass(frozen=True)
class MicrostripLine:
    """Trace geometry plus substrate, with derived eps_eff and Z0."""

    trace_width: float  # m
    substrate_height: float  # m
    substrate_eps_r: float

    @property
    def eps_eff(self) -> float:
        return effective_permittivity(
            self.trace_width, self.substrate_height, self.substrate_eps_r
        )

    @property
    def z0(self) -> float:
        return characteristic_impedance(
            self.trace_width, self.substrate_height, self.substrate_eps_r
        )


@dataclass(frozen=True)
class LineSection:
    """A length of line with a termination (complex ohm, or OPEN)."""

    line: MicrostripLine
    length: float  # m
    termination: complex | object = OPEN

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"length must be > 0, got {self.length}")

    def input_impedance(self, f: float) -> complex:
        beta = phase_constant(f, self.line.eps_eff)
        if self.termination is OPEN:
            return open_stub_impedance(self.line.z0, beta, self.length)
        return terminated_line_impedance(
            self.line.z0, complex(self.termination), beta, self.length
        )


def terminated_line_impedance(
    z0: float, z_load: complex, beta: float, length: float
) -> complex:
    """Input impedance looking into a line of length ``length`` toward ``z_load``."""
    if z0 <= 0:
        raise ValueError(f"z0 must be > 0, got {z0}")
    if length <= 0:
        raise ValueError(f"length must be > 0, got {length}")
    t = cmath.tan(beta * length)
    num = z_load + 1j * z0 * t
    den = z0 + 1j * z_load * t
    if abs(den) < _POLE_RATIO * abs(num):
        return POLE
    return z0 * num / den


def open_stub_impedance(z0: float, beta: float, length: float) -> complex:
    """Input reactance of an open-ended stub: -j*Z0*cot(beta*l)."""
    if z0 <= 0:
        raise ValueError(f"z0 must be > 0, got {z0}")
    if length <= 0:
        raise ValueError(f"length must be > 0, got {length}")
    bl = beta * length
    s, c = math.sin(bl), math.cos(bl)
    if abs(s) < _POLE_RATIO * abs(c):
        return POLE
    return -1j * z0 * c / s


def synthesize_stub_length(
    target_capacitance: float, f: float, line: MicrostripLine
) -> float:
    """Stub length in (0, lambda_g/4) whose open-end reactance equals -1/(2*pi*f*C).

    Bracketed root-finding on the monotone cot branch; the solution is unique.
    """
    if target_capacitance <= 0:
        raise ValueError(f"capacitance must be > 0, got {target_capacitance}")
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    beta = phase_constant(f, line.eps_eff)
    lam_g = 2.0 * math.pi / beta
    z0 = line.z0
    x_target = 1.0 / (2.0 * math.pi * f * target_capacitance)

    eps = lam_g * 1e-9
    lo, hi = eps, lam_g / 4.0 - eps

    def g(l: float) -> float:
        return z0 / math.tan(beta * l) - x_target

    if g(lo) < 0.0:
        # cot cannot reach the requested reactance even at the shortest length
        c_min = 1.0 / (2.0 * math.pi * f * z0 / math.tan(beta * lo))
        raise SynthesisError(
            f"capacitance {target_capacitance:.4g} F below the achievable minimum "
            f"{c_min:.4g} F at f={f:.4g} Hz"
        )
    length = brentq(g, lo, hi, xtol=lam_g * 1e-16, rtol=8.9e-16)
    return float(length)
