"""Complex permittivity of pure and saline water.

Single-relaxation Debye model for pure water, extended with an ionic
conductivity term for NaCl solutions.  Stored with the engineering sign
convention eps = eps' - j*eps'' (loss_part is eps'' >= 0); the underlying
relaxation term is evaluated with a +j denominator and the sign of its
imaginary part flipped on output.

Concentration-dependent saline parameters follow the Stogryn (1971)
polynomial fits versus normality and temperature; for NaCl molarity and
normality coincide.  A table-backed model can be substituted for measured
calibrations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .constants import (
    VACUUM_PERMITTIVITY,
    WATER_EPS_INF_25C,
    WATER_EPS_STATIC_25C,
    WATER_TAU_25C,
)

__all__ = [
    "ComplexPermittivity",
    "WaterDebyeParams",
    "SalineDebyeParams",
    "StogrynModel",
    "TableModel",
    "DielectricConfig",
    "debye_pure_water",
    "debye_saline",
    "saline_params_from_concentration",
    "pure_water_params",
    "loss_tangent",
    "load_dielectric_config",
    "DEFAULT_WATER",
]


@dataclass(frozen=True)
class ComplexPermittivity:
    """Relative permittivity at one frequency, eps = real_part - j*loss_part."""

    real_part: float
    loss_part: float

    def __post_init__(self):
        if self.loss_part < 0:
            raise ValueError(f"loss_part must be >= 0, got {self.loss_part}")

    def as_complex(self) -> complex:
        return complex(self.real_part, -self.loss_part)


@dataclass(frozen=True)
class WaterDebyeParams:
    """Debye parameters of pure water: high-frequency and static permittivity, relaxation time."""

    eps_inf: float
    eps_static: float
    tau: float  # s

    def __post_init__(self):
        if not (self.eps_static > self.eps_inf > 1.0):
            raise ValueError(
                f"require eps_static > eps_inf > 1, got {self.eps_static}, {self.eps_inf}"
            )
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class SalineDebyeParams:
    """Debye parameters of an ionic solution plus its DC conductivity in S/m."""

    eps_inf: float
    eps_static: float
    tau: float  # s
    conductivity: float  # S/m

    def __post_init__(self):
        if not self.eps_static > self.eps_inf:
            raise ValueError(
                f"require eps_static > eps_inf, got {self.eps_static}, {self.eps_inf}"
            )
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.conductivity < 0:
            raise ValueError(f"conductivity must be >= 0, got {self.conductivity}")


DEFAULT_WATER = WaterDebyeParams(
    eps_inf=WATER_EPS_INF_25C, eps_static=WATER_EPS_STATIC_25C, tau=WATER_TAU_25C
)


def debye_pure_water(f: float, p: WaterDebyeParams = DEFAULT_WATER) -> ComplexPermittivity:
    """Pure-water permittivity at frequency ``f`` (Hz) from the Debye relaxation model."""
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    relax = (p.eps_static - p.eps_inf) / (1.0 + 1j * 2.0 * math.pi * f * p.tau)
    return ComplexPermittivity(p.eps_inf + relax.real, -relax.imag)


def debye_saline(f: float, p: SalineDebyeParams) -> ComplexPermittivity:
    """Saline-water permittivity: Debye relaxation plus the ionic conductivity loss term."""
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    omega = 2.0 * math.pi * f
    relax = (p.eps_static - p.eps_inf) / (1.0 + 1j * omega * p.tau)
    cond_loss = p.conductivity / (omega * VACUUM_PERMITTIVITY)
    return ComplexPermittivity(p.eps_inf + relax.real, -relax.imag + cond_loss)


def loss_tangent(e: ComplexPermittivity) -> float:
    """tan(delta) = eps'' / eps'."""
    if e.real_part <= 0:
        raise ValueError(f"real_part must be > 0, got {e.real_part}")
    return e.loss_part / e.real_part


def _check_range(c: float, temperature: float) -> None:
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concentration must be in [0, 1] mol/L, got {c}")
    if not 0.0 <= temperature <= 50.0:
        raise ValueError(f"temperature must be in [0, 50] degC, got {temperature}")


class StogrynModel:
    """Stogryn (1971) polynomial fits for NaCl solutions.

    Normality N equals molarity for NaCl.  eps_inf is held at the
    configured pure-water value: the fits cover the static permittivity,
    relaxation time, and conductivity only.
    """

    def __init__(self, eps_inf: float = WATER_EPS_INF_25C):
        self.eps_inf = eps_inf

    @staticmethod
    def static_permittivity_water(t: float) -> float:
        return 87.74 - 0.40008 * t + 9.398e-4 * t**2 + 1.410e-6 * t**3

    @staticmethod
    def tau_water(t: float) -> float:
        two_pi_tau = 1.1109e-10 - 3.824e-12 * t + 6.938e-14 * t**2 - 5.096e-16 * t**3
        return two_pi_tau / (2.0 * math.pi)

    def params(self, c: float, temperature: float) -> SalineDebyeParams:
        n = c  # molarity -> normality, identity for NaCl
        t = temperature
        a_n = 1.0 - 0.2551 * n + 5.151e-2 * n**2 - 6.889e-3 * n**3
        b_nt = (
            0.1463e-2 * n * t + 1.0 - 0.04896 * n - 0.02967 * n**2 + 5.644e-3 * n**3
        )
        eps_static = self.static_permittivity_water(t) * a_n
        tau = self.tau_water(t) * b_nt
        sigma_25 = n * (
            10.394
            - 2.3776 * n
            + 0.68258 * n**2
            - 9.13538e-2 * n**3
            + 1.0086e-2 * n**4
        )
        d = 25.0 - t
        phi = d * (
            2.033e-2
            + 1.266e-4 * d
            + 2.464e-6 * d**2
            - n * (1.849e-5 - 2.551e-7 * d + 2.551e-8 * d**2)
        )
        conductivity = sigma_25 * math.exp(-phi)
        return SalineDebyeParams(self.eps_inf, eps_static, tau, conductivity)


class TableModel:
    """Saline parameters interpolated from a measured calibration table.

    Rows: concentration_mol_per_l, eps_static, tau_s, conductivity_s_per_m,
    sorted by ascending concentration.  Temperature is ignored (tables are
    assumed measured at the deployment temperature).
    """

    def __init__(self, rows: list[tuple[float, float, float, float]],
                 eps_inf: float = WATER_EPS_INF_25C):
        if len(rows) < 2:
            raise ValueError("table model needs at least 2 rows")
        concs = [r[0] for r in rows]
        if any(b <= a for a, b in zip(concs, concs[1:])):
            raise ValueError("table concentrations must be strictly increasing")
        self.rows = rows
        self.eps_inf = eps_inf

    @classmethod
    def from_csv(cls, path: str | Path, eps_inf: float = WATER_EPS_INF_25C) -> "TableModel":
        rows = []
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(
                    (
                        float(rec["concentration_mol_per_l"]),
                        float(rec["eps_static"]),
                        float(rec["tau_s"]),
                        float(rec["conductivity_s_per_m"]),
                    )
                )
        return cls(rows, eps_inf)

    def params(self, c: float, temperature: float) -> SalineDebyeParams:
        concs = [r[0] for r in self.rows]
        if not concs[0] <= c <= concs[-1]:
            raise ValueError(
                f"concentration {c} outside table span [{concs[0]}, {concs[-1]}]"
            )
        for (c0, e0, t0, s0), (c1, e1, t1, s1) in zip(self.rows, self.rows[1:]):
            if c0 <= c <= c1:
                w = 0.0 if c1 == c0 else (c - c0) / (c1 - c0)
                return SalineDebyeParams(
                    self.eps_inf,
                    e0 + w * (e1 - e0),
                    t0 + w * (t1 - t0),
                    s0 + w * (s1 - s0),
                )
        raise AssertionError("unreachable")


def saline_params_from_concentration(
    c: float, temperature: float = 25.0, model: StogrynModel | TableModel | None = None
) -> SalineDebyeParams:
    """Saline Debye parameters for NaCl molarity ``c`` at ``temperature`` (degC)."""
    _check_range(c, temperature)
    if model is None:
        model = StogrynModel()
    return model.params(c, temperature)


def pure_water_params(temperature: float = 25.0,
                      eps_inf: float = WATER_EPS_INF_25C) -> SalineDebyeParams:
    """Zero-solute limit of the Stogryn fits at the given temperature."""
    return saline_params_from_concentration(0.0, temperature, StogrynModel(eps_inf))


@dataclass(frozen=True)
class DielectricConfig:
    """Resolved dielectric configuration: water defaults plus the salinity model."""

    water: WaterDebyeParams
    salinity_model: StogrynModel | TableModel


def load_dielectric_config(path: str | Path) -> DielectricConfig:
    """Parse a flat ``key = value`` config file.

    Recognized keys: water.eps_static, water.eps_inf, water.tau_s,
    saline.model (stogryn1971 | table), saline.table_path.
    Unknown keys are rejected.
    """
    known = {
        "water.eps_static",
        "water.eps_inf",
        "water.tau_s",
        "saline.model",
        "saline.table_path",
    }
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val

    water = WaterDebyeParams(
        eps_inf=float(values.get("water.eps_inf", WATER_EPS_INF_25C)),
        eps_static=float(values.get("water.eps_static", WATER_EPS_STATIC_25C)),
        tau=float(values.get("water.tau_s", WATER_TAU_25C)),
    )
    model_name = values.get("saline.model", "stogryn1971")
    if model_name == "stogryn1971":
        model: StogrynModel | TableModel = StogrynModel(eps_inf=water.eps_inf)
    elif model_name == "table":
        if "saline.table_path" not in values:
            raise ValueError("saline.model = table requires saline.table_path")
        model = TableModel.from_csv(values["saline.table_path"], eps_inf=water.eps_inf)
    else:
        raise ValueError(f"unknown saline.model {model_name!r}")
    return DielectricConfig(water=water, salinity_model=model)
