"""Time-domain Monte Carlo: propagator exactness, noise synthesis spectra,
lock-in behavior, and the full measurement loop."""

import dataclasses
import math

import numpy as np
import pytest

from fmsense.constants import BOLTZMANN
from fmsense.model import RinSpectrum, ValidationError, angular
from fmsense.simulate import (
    MIN_SAMPLES_PER_PERIOD,
    SimConfig,
    Trajectory,
    colored_noise_series,
    lock_in_demodulate,
    predicted_experiment,
    propagate_oscillator,
    run_experiment,
    sim_config_violations,
    thermal_force_series,
    welch_psd,
)

from conftest import scaled_scenario


def _period(s):
    return 2.0 * math.pi / angular(s.cantilever.omega_0)


def test_sim_config_violations_aggregate():
    s = scaled_scenario()
    cfg = SimConfig(dt_s=-1.0, duration_s=0.0, seed=-3, burn_in_s=1.0)
    fields = {v.field for v in sim_config_violations(cfg, s)}
    assert fields == {"sim.dt_s", "sim.duration_s", "sim.burn_in_s", "sim.seed"}


def test_sim_config_enforces_sampling_rate():
    s = scaled_scenario()
    dt_max = _period(s) / MIN_SAMPLES_PER_PERIOD
    ok = SimConfig(dt_s=dt_max * 0.999, duration_s=1.0, seed=1)
    assert sim_config_violations(ok, s) == []
    coarse = SimConfig(dt_s=dt_max * 1.01, duration_s=1.0, seed=1)
    v = sim_config_violations(coarse, s)
    assert len(v) == 1 and "samples per resonance period" in v[0].message


def test_trajectory_is_read_only():
    traj = propagate_oscillator(scaled_scenario().cantilever, np.zeros(64), 1e-6)
    assert traj.duration_s == pytest.approx(64e-6)
    with pytest.raises(ValueError):
        traj.samples[0] = 1.0


def test_propagate_rejects_bad_input():
    c = scaled_scenario().cantilever
    with pytest.raises(ValueError, match="dt"):
        propagate_oscillator(c, np.zeros(8), 0.0)
    with pytest.raises(ValueError, match="1-d"):
        propagate_oscillator(c, np.zeros((4, 4)), 1e-6)


def test_free_decay_matches_analytic_solution():
    s = scaled_scenario()
    c = s.cantilever
    w0 = angular(c.omega_0)
    gamma = w0 / c.quality
    wd = math.sqrt(w0**2 - gamma**2 / 4.0)
    dt = _period(s) / 60.0
    n = 30000
    x0, v0 = 2.5e-9, 1.3e-4
    traj = propagate_oscillator(c, np.zeros(n), dt, x0=x0, v0=v0)
    t = np.arange(n) * dt
    analytic = np.exp(-gamma * t / 2.0) * (
        x0 * np.cos(wd * t) + (v0 + gamma * x0 / 2.0) / wd * np.sin(wd * t)
    )
    scale = max(abs(x0), abs(v0 / w0))
    assert np.max(np.abs(traj.samples - analytic)) < 1e-10 * scale


def test_resonant_drive_reaches_q_amplified_amplitude():
    # steady state of F0 cos(w0 t) has amplitude Q F0 / k; halving the step
    # must shrink the residual, showing the error is sampling, not physics
    s = scaled_scenario()
    c = s.cantilever
    w0 = angular(c.omega_0)
    period = _period(s)
    tau = 20.0 * period
    f0 = 1e-15
    target = c.quality * f0 / c.spring_N_per_m
    errors = []
    for spp in (50, 100):
        dt = period / spp
        n = int(round((0.08 + 10.0 * tau) / dt))
        force = f0 * np.cos(w0 * dt * np.arange(n))
        traj = propagate_oscillator(c, force, dt)
        i, q = lock_in_demodulate(traj, w0, tau)
        errors.append(abs(math.hypot(i, q) / target - 1.0))
    assert errors[0] < 2e-3
    assert errors[1] < errors[0]


def test_thermal_force_drives_equipartition():
    s = scaled_scenario()
    c = s.cantilever
    dt = _period(s) / 50.0
    n = int(round(0.3 / dt))
    burn = int(round(0.05 / dt))
    acc = 0.0
    trials = 20
    for trial in range(trials):
        force = thermal_force_series(c, dt, n, seed=424, trial=trial)
        x = propagate_oscillator(c, force, dt).samples[burn:]
        acc += float(np.var(x))
    target = BOLTZMANN * c.temperature_K / c.spring_N_per_m
    assert acc / trials == pytest.approx(target, rel=0.10)


def test_thermal_force_series_is_seeded():
    c = scaled_scenario().cantilever
    a = thermal_force_series(c, 1e-6, 1000, seed=12, trial=3)
    b = thermal_force_series(c, 1e-6, 1000, seed=12, trial=3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, thermal_force_series(c, 1e-6, 1000, seed=12, trial=4))
    assert not np.array_equal(a, thermal_force_series(c, 1e-6, 1000, seed=13, trial=3))
    with pytest.raises(ValueError):
        thermal_force_series(c, 0.0, 10, seed=1)


def test_colored_noise_spectrum_and_variance():
    r = RinSpectrum(xi_peak_rtHz=1.46e-4, omega_L=20e3, gamma=1e3)
    p0 = 1e-4
    dt = 1e-6
    n = 2**21
    series = colored_noise_series(r, p0, dt, n, seed=7)
    amp = p0 * r.xi_peak_rtHz
    # total variance of the shifted process is (peak density) * gamma_ang / 2
    var_exact = amp**2 * angular(r.gamma) / 2.0
    assert float(np.var(series)) == pytest.approx(var_exact, rel=0.05)

    f, psd = welch_psd(series, dt, 2**14)
    band = (f > r.omega_L - r.gamma / 2.0) & (f < r.omega_L + r.gamma / 2.0)
    # Lorentzian averaged over +-gamma/2 of the peak is 2 atan(1/2) of it
    flat_top = amp**2 * 2.0 * math.atan(0.5)
    assert float(psd[band].mean()) == pytest.approx(flat_top, rel=0.05)
    at_gamma = float(psd[np.argmin(np.abs(f - (r.omega_L + r.gamma)))])
    assert 0.4 < at_gamma / float(psd[band].mean()) < 0.65

    assert np.array_equal(series, colored_noise_series(r, p0, dt, n, seed=7))
    assert not np.array_equal(
        series[:1000], colored_noise_series(r, p0, dt, 1000, seed=8)
    )


def test_colored_noise_zero_amplitude_is_silent():
    r = RinSpectrum(xi_peak_rtHz=0.0, omega_L=2e4, gamma=1e3)
    assert not colored_noise_series(r, 1e-4, 1e-6, 256, seed=1).any()


def test_welch_psd_satisfies_parseval():
    rng = np.random.default_rng(99)
    x = rng.standard_normal(2**17)
    x -= x.mean()
    f, psd = welch_psd(x, 1e-3, 1024)
    df = f[1] - f[0]
    assert float(np.sum(psd) * df) == pytest.approx(float(np.var(x)), rel=0.01)


def test_welch_psd_validates_input():
    x = np.zeros(100)
    with pytest.raises(ValueError, match="segment length"):
        welch_psd(x, 1e-3, 4)
    with pytest.raises(ValueError, match="segment length"):
        welch_psd(x, 1e-3, 200)
    with pytest.raises(ValueError, match="overlap"):
        welch_psd(x, 1e-3, 64, overlap=1.0)
    with pytest.raises(ValueError, match="dt"):
        welch_psd(x, 0.0, 64)


def test_lock_in_recovers_pure_tone():
    w = 2.0 * math.pi * 1000.0
    dt = 1e-6
    t = np.arange(int(0.4 / dt)) * dt
    x = 3.7e-9 * np.cos(w * t) + 1.9e-9 * np.sin(w * t)
    i, q = lock_in_demodulate(Trajectory(dt_s=dt, samples=x), w, 0.05)
    assert i == pytest.approx(3.7e-9, rel=2e-3)
    assert q == pytest.approx(1.9e-9, rel=2e-3)


def test_lock_in_preconditions():
    w = 2.0 * math.pi * 1000.0
    traj = Trajectory(dt_s=1e-6, samples=np.zeros(400000))
    with pytest.raises(ValueError, match="reference frequency"):
        lock_in_demodulate(traj, 0.0, 0.05)
    with pytest.raises(ValueError, match="at least 10"):
        lock_in_demodulate(traj, w, 0.005)
    with pytest.raises(ValueError, match="5 time constants"):
        lock_in_demodulate(traj, w, 0.09)


def test_predicted_thermal_noise_matches_closed_form():
    # Lorentzian displacement line through a single-pole lock-in captures
    # b/(a+b) of the equipartition variance; amplitude rms is sqrt(2) that
    s = scaled_scenario()
    c = s.cantilever
    w0 = angular(c.omega_0)
    a = w0 / (2.0 * c.quality)
    var_x = BOLTZMANN * c.temperature_K / c.spring_N_per_m
    for periods in (20.0, 100.0):
        tau = periods * _period(s)
        b = 1.0 / tau
        closed = math.sqrt(2.0 * var_x * b / (a + b))
        pred = predicted_experiment(s, tau, channels=("thermal",))
        assert pred.noise_rms_m["thermal"] == pytest.approx(closed, rel=1e-3)


def test_run_experiment_is_deterministic():
    s = scaled_scenario()
    dt = _period(s) / 50.0
    tau = 20.0 * _period(s)
    cfg = SimConfig(dt_s=dt, duration_s=0.12, seed=5, burn_in_s=0.02)
    r1 = run_experiment(s, cfg, 3, time_constant_s=tau)
    r2 = run_experiment(s, cfg, 3, time_constant_s=tau)
    assert r1 == r2
    r3 = run_experiment(s, dataclasses.replace(cfg, seed=6), 3, time_constant_s=tau)
    assert r3.signal_amplitude_m != r1.signal_amplitude_m


def test_run_experiment_matches_prediction():
    s = scaled_scenario()
    period = _period(s)
    tau = 20.0 * period
    cfg = SimConfig(dt_s=period / 50.0, duration_s=0.3, seed=3, burn_in_s=0.02)
    res = run_experiment(s, cfg, 10, time_constant_s=tau)
    pred = predicted_experiment(s, tau)
    assert res.signal_amplitude_m == pytest.approx(pred.signal_amplitude_m, rel=0.10)
    for ch in ("thermal", "rin", "shot"):
        assert res.noise_rms_m[ch] == pytest.approx(pred.noise_rms_m[ch], rel=0.15)
        assert res.noise_uncertainty_m[ch] > 0.0
    assert res.snr == pytest.approx(pred.snr, rel=0.25)
    assert res.snr_uncertainty > 0.0
    assert res.n_trials == 10
    assert res.time_constant_s == tau


def test_run_experiment_channel_gating():
    s = scaled_scenario()
    period = _period(s)
    cfg = SimConfig(
        dt_s=period / 50.0, duration_s=0.12, seed=5, burn_in_s=0.02, thermal=False
    )
    assert cfg.enabled_channels() == ("rin", "shot")
    res = run_experiment(s, cfg, 2, time_constant_s=20.0 * period)
    assert tuple(res.noise_rms_m) == ("rin", "shot")


def test_run_experiment_requires_resonant_modulation():
    s = scaled_scenario()
    off = dataclasses.replace(
        s,
        modulation=dataclasses.replace(
            s.modulation, omega_mod=1.01 * s.cantilever.omega_0
        ),
    )
    period = _period(s)
    cfg = SimConfig(dt_s=period / 50.0, duration_s=0.12, seed=5)
    with pytest.raises(ValidationError, match="omega_0"):
        run_experiment(off, cfg, 1, time_constant_s=20.0 * period)


def test_run_experiment_rejects_bad_sampling():
    s = scaled_scenario()
    period = _period(s)
    with pytest.raises(ValidationError):
        run_experiment(
            s,
            SimConfig(dt_s=period / 5.0, duration_s=0.12, seed=5),
            1,
            time_constant_s=20.0 * period,
        )
    with pytest.raises(ValueError, match="n_trials"):
        run_experiment(
            s,
            SimConfig(dt_s=period / 50.0, duration_s=0.12, seed=5),
            0,
            time_constant_s=20.0 * period,
        )
    with pytest.raises(ValueError, match="duration too short"):
        run_experiment(
            s,
            SimConfig(dt_s=period / 50.0, duration_s=0.008, seed=5),
            1,
            time_constant_s=20.0 * period,
        )
