import math

import numpy as np
import pytest

from tsense.microstrip import (
    MicrostripLine,
    LineSection,
    OPEN,
    OutOfValidityError,
    SynthesisError,
    characteristic_impedance,
    effective_permittivity,
    guided_wavelength,
    is_pole,
    open_stub_impedance,
    phase_constant,
    synthesize_stub_length,
    terminated_line_impedance,
)

# RT5880 stub geometry used throughout
W, H, EPS_R = 2.4e-3, 0.79e-3, 2.2
EPS_EFF_FROZEN = 1.8696799449853  # independent scalar evaluation
Z0_FROZEN = 50.7605507611303


class TestEffectivePermittivity:
    def test_air_substrate(self):
        for w, h in ((1e-3, 1e-3), (5e-3, 0.5e-3)):
            assert effective_permittivity(w, h, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_parallel_plate_limit(self):
        assert effective_permittivity(1e6, 1.0, 4.0) == pytest.approx(4.0, abs=1e-2)

    def test_frozen_rt5880(self):
        assert effective_permittivity(W, H, EPS_R) == pytest.approx(
            EPS_EFF_FROZEN, rel=1e-9
        )

    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError):
            effective_permittivity(0.0, H, EPS_R)
        with pytest.raises(ValueError):
            effective_permittivity(W, -1.0, EPS_R)

    def test_bounds_random(self):
        rng = np.random.default_rng(42)
        for _ in range(10_000):
            u = rng.uniform(1.0, 100.0)
            er = rng.uniform(1.0, 12.0)
            h = rng.uniform(0.1e-3, 2e-3)
            e = effective_permittivity(u * h, h, er)
            assert 1.0 <= e <= er + 1e-12


class TestCharacteristicImpedance:
    def test_frozen_rt5880(self):
        assert characteristic_impedance(W, H, EPS_R) == pytest.approx(
            Z0_FROZEN, rel=1e-9
        )

    def test_scale_invariance(self):
        z1 = characteristic_impedance(W, H, EPS_R)
        z2 = characteristic_impedance(2 * W, 2 * H, EPS_R)
        assert z2 == pytest.approx(z1, rel=1e-12)

    def test_air_exceeds_loaded(self):
        z_air = characteristic_impedance(2.0, 1.0, 1.0)
        z_sub = characteristic_impedance(2.0, 1.0, 2.2)
        assert z_air == pytest.approx(89.3802517127241, rel=1e-9)
        assert z_sub == pytest.approx(66.1300126435248, rel=1e-9)
        assert z_air > z_sub

    def test_narrow_trace_rejected(self):
        with pytest.raises(OutOfValidityError):
            characteristic_impedance(0.5e-3, 0.79e-3, 2.2)


class TestPhaseConstant:
    def test_frozen_air(self):
        assert phase_constant(700e6, 1.0) == pytest.approx(14.6709151536618, rel=1e-12)

    def test_sqrt_scaling(self):
        assert phase_constant(700e6, 4.0) == pytest.approx(
            2 * phase_constant(700e6, 1.0), rel=1e-15
        )

    def test_wavelength_identity(self):
        for f, ee in ((1e8, 1.0), (700e6, 1.87), (5e9, 9.8)):
            assert guided_wavelength(f, ee) * phase_constant(f, ee) == pytest.approx(
                2 * math.pi, rel=1e-12
            )

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            phase_constant(0.0, 1.0)
        with pytest.raises(ValueError):
            phase_constant(1e9, 0.5)


class TestTerminatedLine:
    def test_matched_load_fixed_point(self):
        rng = np.random.default_rng(7)
        beta = 20.0
        for _ in range(100):
            length = rng.uniform(1e-4, 0.5)
            z = terminated_line_impedance(50.0, 50.0 + 0j, beta, length)
            assert z == pytest.approx(50.0 + 0j, rel=1e-9)

    def test_short_at_quarter_wave_is_pole(self):
        beta = 20.0
        length = (math.pi / 2) / beta
        assert is_pole(terminated_line_impedance(50.0, 0.0 + 0j, beta, length))

    def test_frozen_eighth_wave_transform(self):
        beta = 20.0
        length = (math.pi / 4) / beta
        z = terminated_line_impedance(50.0, 25.0 + 0j, beta, length)
        assert z.real == pytest.approx(40.0, rel=1e-12)
        assert z.imag == pytest.approx(30.0, rel=1e-12)


class TestOpenStub:
    def test_quarter_wave_null(self):
        f, ee = 700e6, EPS_EFF_FROZEN
        beta = phase_constant(f, ee)
        lam = guided_wavelength(f, ee)
        z = open_stub_impedance(50.0, beta, lam / 4)
        assert abs(z) < 1e-9 * 50.0

    def test_eighth_wave_is_minus_j_z0(self):
        beta = phase_constant(700e6, 1.0)
        lam = guided_wavelength(700e6, 1.0)
        z = open_stub_impedance(50.0, beta, lam / 8)
        assert z == pytest.approx(-50j, rel=1e-12)

    def test_frozen_10mm_rt5880(self):
        beta = phase_constant(700e6, EPS_EFF_FROZEN)
        z = open_stub_impedance(50.0, beta, 10e-3)
        assert z.real == 0.0
        assert z.imag == pytest.approx(-245.894140944515, rel=1e-9)

    def test_half_wave_pole(self):
        beta = phase_constant(700e6, 1.0)
        lam = guided_wavelength(700e6, 1.0)
        assert is_pole(open_stub_impedance(50.0, beta, lam / 2))

    def test_half_wave_periodicity(self):
        beta = phase_constant(700e6, 1.0)
        lam = guided_wavelength(700e6, 1.0)
        rng = np.random.default_rng(3)
        for _ in range(50):
            l = rng.uniform(0.02, 0.2) * lam
            z1 = open_stub_impedance(50.0, beta, l)
            z2 = open_stub_impedance(50.0, beta, l + lam / 2)
            assert z2.imag == pytest.approx(z1.imag, rel=1e-9)


class TestSynthesis:
    LINE = MicrostripLine(W, H, EPS_R)

    def test_eighth_wave_case(self):
        f = 700e6
        lam = guided_wavelength(f, self.LINE.eps_eff)
        c = 1.0 / (2 * math.pi * f * self.LINE.z0)
        length = synthesize_stub_length(c, f, self.LINE)
        assert length == pytest.approx(lam / 8, rel=1e-10)

    def test_small_capacitance_small_length(self):
        length = synthesize_stub_length(1e-15, 700e6, self.LINE)
        lam = guided_wavelength(700e6, self.LINE.eps_eff)
        assert 0 < length < 1e-3 * lam

    def test_sixth_wave_round_trip(self):
        f = 700e6
        lam = guided_wavelength(f, self.LINE.eps_eff)
        x_target = self.LINE.z0 / math.tan(math.pi / 3)
        c = 1.0 / (2 * math.pi * f * x_target)
        length = synthesize_stub_length(c, f, self.LINE)
        assert length == pytest.approx(lam / 6, rel=1e-8)

    def test_round_trip_random(self):
        f = 700e6
        beta = phase_constant(f, self.LINE.eps_eff)
        rng = np.random.default_rng(11)
        for _ in range(1000):
            bl = rng.uniform(0.01, 0.99) * (math.pi / 2)
            x_target = self.LINE.z0 / math.tan(bl)
            c = 1.0 / (2 * math.pi * f * x_target)
            length = synthesize_stub_length(c, f, self.LINE)
            z = open_stub_impedance(self.LINE.z0, beta, length)
            assert -z.imag == pytest.approx(x_target, rel=1e-8)

    def test_unachievable_capacitance(self):
        with pytest.raises(SynthesisError, match="achievable"):
            synthesize_stub_length(1e-25, 700e6, self.LINE)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            synthesize_stub_length(-1e-12, 700e6, self.LINE)
        with pytest.raises(ValueError):
            synthesize_stub_length(1e-12, 0.0, self.LINE)


class TestLineSection:
    def test_open_section_matches_stub(self):
        line = MicrostripLine(W, H, EPS_R)
        sec = LineSection(line, 10e-3, OPEN)
        beta = phase_constant(700e6, line.eps_eff)
        assert sec.input_impedance(700e6) == open_stub_impedance(line.z0, beta, 10e-3)

    def test_terminated_section(self):
        line = MicrostripLine(W, H, EPS_R)
        sec = LineSection(line, 5e-3, 75.0 + 0j)
        z = sec.input_impedance(700e6)
        assert np.isfinite(z.real) and np.isfinite(z.imag)

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValueError):
            LineSection(MicrostripLine(W, H, EPS_R), 0.0)
