import dataclasses
import math

import numpy as np
import pytest
from scipy.special import jv

from fmsense.model import AbsorberLine, angular
from fmsense.optics import (
    INDEX_CAP,
    absorber_transfer,
    beat_signal,
    fm_component_spectrum,
    transmitted_power_series,
)
from fmsense.presets import load_preset


def _with_absorber(s, **kwargs):
    return dataclasses.replace(s, absorber=dataclasses.replace(s.absorber, **kwargs))


def _with_index(s, index):
    return dataclasses.replace(
        s, modulation=dataclasses.replace(s.modulation, index=index)
    )


def test_spectrum_signs_and_power():
    comps = {c.order: c.amplitude for c in fm_component_spectrum(0.3, 4)}
    assert comps[0] == pytest.approx(float(jv(0, 0.3)), rel=1e-15)
    for n in (1, 2, 3, 4):
        assert comps[-n] == pytest.approx((-1) ** n * comps[n], rel=1e-15)
    assert sum(a**2 for a in comps.values()) == pytest.approx(1.0, abs=1e-12)


def test_spectrum_drops_exact_zeros():
    comps = fm_component_spectrum(0.0, 3)
    assert [c.order for c in comps] == [0]
    assert comps[0].amplitude == 1.0
    with pytest.raises(ValueError):
        fm_component_spectrum(-0.1, 3)
    with pytest.raises(ValueError):
        fm_component_spectrum(0.1, -1)


def test_absorber_transfer_shape():
    line = AbsorberLine(omega_a=4.4e14, gamma_a=1e7, alpha_L_peak=2e-4)
    d0, p0 = absorber_transfer(line, 0.0)
    assert d0 == pytest.approx(1e-4, rel=1e-15)  # alpha_L/2 at line center
    assert p0 == 0.0
    dg, pg = absorber_transfer(line, 1e7)
    assert dg == pytest.approx(0.5e-4, rel=1e-15)  # half absorbance at gamma
    assert pg == pytest.approx(0.5e-4, rel=1e-15)  # dispersive peak at gamma
    dm, pm = absorber_transfer(line, -1e7)
    assert dm == dg
    assert pm == -pg


def test_beat_null_without_absorbance_is_exact():
    s = _with_absorber(load_preset("paper-main"), alpha_L_peak=0.0)
    b = beat_signal(s)
    assert b.inphase_W == 0.0
    assert b.quadrature_W == 0.0
    assert b.dc_power_W == s.laser.power_W


def test_beat_null_at_line_center_is_exact():
    rng = np.random.default_rng(1912)
    s0 = load_preset("paper-main")
    for _ in range(100):
        s = _with_absorber(
            s0,
            gamma_a=float(rng.uniform(1e5, 1e9)),
            alpha_L_peak=float(rng.uniform(0.0, 1.0)),
            carrier_detuning=0.0,
        )
        s = _with_index(s, float(rng.uniform(0.0, INDEX_CAP)))
        b = beat_signal(s)
        assert b.inphase_W == 0.0
        assert abs(b.quadrature_W) == 0.0


def test_beat_matches_three_component_field_demodulation():
    """Independent oracle: synthesize the three-component transmitted field,
    square it to intensity, and project one full period onto cos/sin."""
    rng = np.random.default_rng(4207)
    s0 = load_preset("paper-main")
    n = 4096
    for _ in range(25):
        s = _with_absorber(
            s0,
            gamma_a=float(rng.uniform(1e6, 1e8)),
            alpha_L_peak=float(rng.uniform(1e-5, 0.8)),
            carrier_detuning=float(rng.uniform(-3e7, 3e7)),
        )
        s = _with_index(s, float(rng.uniform(0.01, INDEX_CAP)))
        m = s.modulation.index
        j0, j1 = float(jv(0, m)), float(jv(1, m))
        dc0 = s.absorber.carrier_detuning
        omega = s.modulation.omega_mod
        amps = {0: j0, 1: j1, -1: -j1}
        w = angular(omega)
        t = np.arange(n) * (2.0 * math.pi / w / n)
        field = np.zeros(n, dtype=complex)
        for order, a in amps.items():
            d, ph = absorber_transfer(s.absorber, dc0 + order * omega)
            field += a * math.exp(-d) * np.exp(-1j * ph) * np.exp(1j * order * w * t)
        power = s.laser.power_W * np.abs(field) ** 2
        i_ref = 2.0 / n * float(np.sum(power * np.cos(w * t)))
        q_ref = 2.0 / n * float(np.sum(power * np.sin(w * t)))
        b = beat_signal(s)
        scale = max(abs(i_ref), abs(q_ref), 1e-30)
        assert abs(b.inphase_W - i_ref) <= 1e-9 * scale
        assert abs(b.quadrature_W - q_ref) <= 1e-9 * scale


def test_beat_reduces_to_first_order_form():
    # P0 * M * exp(-2 d0) * (d_minus - d_plus) for small index and absorbance
    s = load_preset("paper-main")
    s = _with_index(_with_absorber(s, alpha_L_peak=1e-6), 0.01)
    b = beat_signal(s)
    d0, _ = absorber_transfer(s.absorber, s.absorber.carrier_detuning)
    dp, _ = absorber_transfer(
        s.absorber, s.absorber.carrier_detuning + s.modulation.omega_mod
    )
    dm, _ = absorber_transfer(
        s.absorber, s.absorber.carrier_detuning - s.modulation.omega_mod
    )
    first_order = (
        s.laser.power_W * s.modulation.index * math.exp(-2.0 * d0) * (dm - dp)
    )
    assert b.inphase_W == pytest.approx(first_order, rel=1e-4)


def test_beat_scales_linearly_in_small_index():
    s0 = _with_absorber(load_preset("paper-main"), alpha_L_peak=1e-4)
    b1 = beat_signal(_with_index(s0, 0.05))
    b2 = beat_signal(_with_index(s0, 0.10))
    assert b2.inphase_W / b1.inphase_W == pytest.approx(2.0, rel=5e-3)
    assert b2.quadrature_W / b1.quadrature_W == pytest.approx(2.0, rel=5e-3)


def test_beat_scales_linearly_in_small_absorbance():
    # detuned off the line so the carrier attenuation exp(-2 d0) stays ~1
    s0 = _with_absorber(load_preset("paper-main"), carrier_detuning=3e7)
    b1 = beat_signal(_with_absorber(s0, alpha_L_peak=1e-6))
    b2 = beat_signal(_with_absorber(s0, alpha_L_peak=2e-6))
    assert b2.inphase_W / b1.inphase_W == pytest.approx(2.0, rel=1e-4)
    assert b2.quadrature_W / b1.quadrature_W == pytest.approx(2.0, rel=1e-4)


def test_index_above_cap_is_rejected_with_guidance():
    s = _with_index(load_preset("paper-main"), 0.6)
    with pytest.raises(ValueError, match="0.5"):
        beat_signal(s)


def test_transmitted_series_projects_back_to_beat():
    s = load_preset("paper-main")
    b = beat_signal(s)
    w = angular(s.modulation.omega_mod)
    n = 4096
    dt = 2.0 * math.pi / w / n
    series = transmitted_power_series(s, dt, n)
    t = np.arange(n) * dt
    assert 2.0 / n * np.sum(series * np.cos(w * t)) == pytest.approx(
        b.inphase_W, rel=1e-9
    )
    assert 2.0 / n * np.sum(series * np.sin(w * t)) == pytest.approx(
        b.quadrature_W, rel=1e-9
    )
    assert np.mean(series) == pytest.approx(b.dc_power_W, rel=1e-12)
    with pytest.raises(ValueError):
        transmitted_power_series(s, 0.0, 4)
    with pytest.raises(ValueError):
        transmitted_power_series(s, 1e-9, 0)
