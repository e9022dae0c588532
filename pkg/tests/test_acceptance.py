"""End-to-end acceptance suite.

Each test prints a PASS/FAIL line so the suite doubles as a release
checklist when run with ``pytest -s tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from tsense.constants import CONCENTRATION_LADDER
from tsense.dielectric import (
    SalineDebyeParams,
    WaterDebyeParams,
    debye_pure_water,
    debye_saline,
)
from tsense.microstrip import (
    MicrostripLine,
    characteristic_impedance,
    effective_permittivity,
    guided_wavelength,
    open_stub_impedance,
    phase_constant,
    synthesize_stub_length,
)
from tsense.pipeline import (
    Action,
    PipelineConfig,
    band_peak_magnitude,
    bandpass,
    compute_stages,
    estimate_concentration,
    run_pipeline,
)
from tsense.response import (
    BasinState,
    build_calibration_curve,
    fit_exponential,
    mix_concentration,
)
from tsense.simulate import (
    FrequencyTrace,
    LiquidEvent,
    ScenarioConfig,
    SolidEvent,
    simulate_scenario,
)

DT = 0.110
FS = 1.0 / DT


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


class TestCriterion1DebyeReduction:
    def test_saline_collapses_to_pure_water(self):
        t0 = time.perf_counter()
        water = WaterDebyeParams(eps_inf=5.2, eps_static=78.36, tau=8.27e-12)
        saline = SalineDebyeParams(5.2, 78.36, 8.27e-12, conductivity=0.0)
        worst = 0.0
        for f in np.geomspace(1e8, 1e10, 200):
            ew = debye_pure_water(f, water).as_complex()
            es = debye_saline(f, saline).as_complex()
            worst = max(worst, abs(es - ew) / abs(ew))
        elapsed = time.perf_counter() - t0
        report(
            "criterion 1 (model reduction)",
            worst < 1e-12 and elapsed < 1.0,
            f"max rel err {worst:.2e}, {elapsed:.3f} s",
        )


class TestCriterion2Microstrip:
    W, H, EPS_R = 2.4e-3, 0.79e-3, 2.2

    def test_oracle_match_and_round_trip(self):
        t0 = time.perf_counter()
        eps_eff = effective_permittivity(self.W, self.H, self.EPS_R)
        z0 = characteristic_impedance(self.W, self.H, self.EPS_R)
        ok_fix = (
            abs(eps_eff - 1.8696799449853) / 1.8696799449853 < 1e-9
            and abs(z0 - 50.7605507611303) / 50.7605507611303 < 1e-9
        )

        f = 700e6
        beta = phase_constant(f, eps_eff)
        lam = guided_wavelength(f, eps_eff)
        z_quarter = open_stub_impedance(z0, beta, lam / 4)
        ok_quarter = abs(z_quarter) < 1e-9 * z0

        line = MicrostripLine(self.W, self.H, self.EPS_R)
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(1000):
            bl = rng.uniform(0.01, 0.99) * (math.pi / 2)
            c = 1.0 / (2 * math.pi * f * (z0 / math.tan(bl)))
            length = synthesize_stub_length(c, f, line)
            x = -open_stub_impedance(z0, beta, length).imag
            c_back = 1.0 / (2 * math.pi * f * x)
            worst = max(worst, abs(c_back - c) / c)
        elapsed = time.perf_counter() - t0
        report(
            "criterion 2 (microstrip oracle)",
            ok_fix and ok_quarter and worst < 1e-8 and elapsed < 1.0,
            f"round-trip max rel err {worst:.2e}, {elapsed:.3f} s",
        )


class TestCriterion3FitRecovery:
    def test_noiseless_and_noisy(self):
        t0 = time.perf_counter()
        v = np.arange(0.0, 501.0, 25.0)
        a_true, b_true = 2.0, 0.01
        clean = a_true * (1 - np.exp(-b_true * v))

        fit = fit_exponential(list(zip(v, clean)))
        ok_clean = (
            abs(fit.a - a_true) / a_true < 1e-6
            and abs(fit.b - b_true) / b_true < 1e-6
        )

        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            noisy = clean * (1 + 0.01 * rng.standard_normal(len(v)))
            f = fit_exponential(list(zip(v, noisy)))
            worst = max(
                worst, abs(f.a - a_true) / a_true, abs(f.b - b_true) / b_true
            )
        elapsed = time.perf_counter() - t0
        report(
            "criterion 3 (transient fit recovery)",
            ok_clean and worst < 0.05 and elapsed < 5.0,
            f"noisy max rel err {worst:.3f}, {elapsed:.3f} s",
        )


class TestCriterion4SpectralFidelity:
    def test_tone_magnitude_bin_and_rejection(self):
        t0 = time.perf_counter()
        n = 128
        tone = np.sin(2 * np.pi * 2.2 * DT * np.arange(n))
        mag = band_peak_magnitude(tone, (1.6, 3.0), FS)
        ok_mag = 0.85 <= mag <= 1.15

        w = np.hanning(n)
        spec = np.abs(np.fft.rfft(tone * w))
        freqs = np.fft.rfftfreq(n, DT)
        bin_width = freqs[1] - freqs[0]
        peak = freqs[int(np.argmax(spec))]
        ok_bin = abs(peak - 2.2) <= bin_width

        low = np.sin(2 * np.pi * 0.2 * DT * np.arange(2048))
        filt = bandpass(FrequencyTrace(0.0, DT, low)).samples
        atten = 20 * np.log10(
            np.sqrt(np.mean(filt[200:-200] ** 2) / np.mean(low[200:-200] ** 2))
        )
        ok_stop = atten <= -20.0
        elapsed = time.perf_counter() - t0
        report(
            "criterion 4 (spectral fidelity)",
            ok_mag and ok_bin and ok_stop and elapsed < 1.0,
            f"mag {mag:.3f}, peak {peak:.3f} Hz, 0.2 Hz atten {atten:.1f} dB, "
            f"{elapsed:.3f} s",
        )


class TestCriterion5ClassificationSeparation:
    def test_fifty_vs_fifty(self):
        t0 = time.perf_counter()
        cfg = PipelineConfig()

        def peak_mag(events, seed):
            sc = ScenarioConfig(duration=60.0, events=events, seed=seed)
            stages = compute_stages(simulate_scenario(sc), cfg)
            return float(stages["magnitude"].max())

        solid_mags = [
            peak_mag((SolidEvent(time=20.0),), seed) for seed in range(50)
        ]
        liquid_mags = [
            peak_mag(
                (LiquidEvent(start_time=20.0, concentration=0.125,
                             total_volume=220.0),),
                seed,
            )
            for seed in range(50)
        ]
        lo_solid, hi_liquid = min(solid_mags), max(liquid_mags)
        mis = sum(m <= cfg.solid_threshold for m in solid_mags)
        mis += sum(m > cfg.solid_threshold for m in liquid_mags)
        elapsed = time.perf_counter() - t0
        report(
            "criterion 5 (classification separation)",
            lo_solid > hi_liquid and mis == 0 and elapsed < 60.0,
            f"min solid {lo_solid:.3e} > max liquid {hi_liquid:.3e}, "
            f"{mis} misclassified, {elapsed:.1f} s",
        )


class TestCriterion6TwoStage:
    def test_event_sequencing_and_determinism(self):
        both = ScenarioConfig(
            duration=120.0,
            events=(
                SolidEvent(time=10.0),
                LiquidEvent(start_time=30.0, concentration=0.125,
                            total_volume=220.0),
            ),
            seed=1,
        )
        trace = simulate_scenario(both)
        r1 = list(run_pipeline(zip(trace.times, trace.samples), PipelineConfig()))
        r2 = list(run_pipeline(zip(trace.times, trace.samples), PipelineConfig()))
        actions = [r.action for r in r1]
        ok_seq = actions == [Action.FLUSH, Action.ANALYZE]
        ok_det = r1 == r2

        liquid_only = ScenarioConfig(
            duration=120.0,
            events=(
                LiquidEvent(start_time=20.0, concentration=0.125,
                            total_volume=220.0),
            ),
            seed=4,
        )
        tr = simulate_scenario(liquid_only)
        rl = list(run_pipeline(zip(tr.times, tr.samples), PipelineConfig()))
        ok_liq = not any(r.action is Action.FLUSH for r in rl)
        report(
            "criterion 6 (two-stage sequencing)",
            ok_seq and ok_det and ok_liq,
            f"actions {[a.value for a in actions]}, liquid-only FLUSH-free "
            f"{ok_liq}, deterministic {ok_det}",
        )


class TestCriterion7ConcentrationEstimation:
    def test_ladder_recovery_and_monotone_curve(self):
        cfg = PipelineConfig()

        def scenario(conc, noise, seed=0):
            return ScenarioConfig(
                duration=150.0,
                noise_sigma=noise,
                events=(LiquidEvent(start_time=20.0, concentration=conc,
                                    total_volume=220.0),),
                seed=seed,
            )

        worst = 0.0
        for conc in CONCENTRATION_LADDER:
            truth = mix_concentration(
                BasinState(4000.0, 0.0), 220.0, conc
            ).concentration
            _, est = estimate_concentration(
                simulate_scenario(scenario(conc, 0.0)), cfg
            )
            worst = max(worst, abs(est - truth) / truth)
        ok_clean = worst < 0.02

        truth = mix_concentration(BasinState(4000.0, 0.0), 220.0, 0.125).concentration
        hits = 0
        for seed in range(20):
            _, est = estimate_concentration(
                simulate_scenario(scenario(0.125, 200.0, seed)), cfg
            )
            if abs(est - truth) / truth < 0.10:
                hits += 1
        ok_noisy = hits >= 18

        curve = build_calibration_curve(CONCENTRATION_LADDER)
        ok_mono = all(b > a for a, b in zip(curve.shifts, curve.shifts[1:]))
        report(
            "criterion 7 (concentration estimation)",
            ok_clean and ok_noisy and ok_mono,
            f"noiseless max rel err {worst:.4f}, noisy hits {hits}/20, "
            f"curve monotone {ok_mono}",
        )


class TestCriterion8Performance:
    def test_ten_minute_trace(self):
        cfg = ScenarioConfig(
            duration=600.0,
            events=(
                SolidEvent(time=60.0),
                LiquidEvent(start_time=200.0, concentration=0.125,
                            total_volume=220.0),
            ),
            seed=0,
        )
        t0 = time.perf_counter()
        trace = simulate_scenario(cfg)
        t_sim = time.perf_counter() - t0

        t0 = time.perf_counter()
        reports = list(run_pipeline(zip(trace.times, trace.samples),
                                    PipelineConfig()))
        t_ana = time.perf_counter() - t0
        report(
            "criterion 8 (performance)",
            len(trace) >= 5400 and t_sim < 1.0 and t_ana < 1.0
            and len(reports) >= 1,
            f"{len(trace)} samples, simulate {t_sim:.3f} s, "
            f"analyze {t_ana:.3f} s",
        )
