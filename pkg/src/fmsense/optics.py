"""FM sideband optics: carrier/sideband spectrum, Lorentzian absorber
transfer, and the demodulated beat produced when the absorber breaks the
FM-to-AM cancellation.

The beat model keeps the carrier and the first sideband pair only (a good
description for modulation index <= 0.5) but evaluates their interference
exactly, so it agrees with brute-force demodulation of the three-component
field to machine precision.  To leading order in the index M and the
absorbance the in-phase beat reduces to the familiar
P0 * M * exp(-2*delta_0) * (delta_{-1} - delta_{+1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .model import AbsorberLine, Scenario, angular

INDEX_CAP = 0.5


@dataclass(frozen=True)
class SpectralComponent:
    """One FM spectral component: order n at omega_c + n*Omega."""

    order: int
    amplitude: float


@dataclass(frozen=True)
class BeatSignal:
    """Photodetector power decomposed at the modulation rate.

    dc_power_W   : mean transmitted power
    inphase_W    : amplitude of the cos(Omega t) beat (absorptive part)
    quadrature_W : amplitude of the sin(Omega t) beat (dispersive part)
    """

    dc_power_W: float
    inphase_W: float
    quadrature_W: float


def fm_component_spectrum(index: float, order_cap: int) -> list[SpectralComponent]:
    """Bessel amplitudes J_n(index) for orders -order_cap..order_cap.

    Orders whose amplitude is exactly zero (e.g. all sidebands at index 0)
    are omitted.  Signs follow J_{-n} = (-1)^n J_n, so the total power
    sum(amplitude^2) is 1 up to the truncation tail.
    """
    if index < 0.0:
        raise ValueError(f"modulation index must be >= 0, got {index}")
    if order_cap < 0:
        raise ValueError(f"order cap must be >= 0, got {order_cap}")
    out = []
    for n in range(-order_cap, order_cap + 1):
        a = float(jv(n, index))
        if a != 0.0:
            out.append(SpectralComponent(order=n, amplitude=a))
    return out


def absorber_transfer(line: AbsorberLine, detuning: float) -> tuple[float, float]:
    """Amplitude attenuation and phase shift at ``detuning`` from line center.

    Returns (delta, phi) for the single-pass field transmission
    exp(-delta - i*phi):

        delta = (alpha_L/2) * gamma_a^2 / (gamma_a^2 + detuning^2)
        phi   = (alpha_L/2) * gamma_a * detuning / (gamma_a^2 + detuning^2)
    """
    g2 = line.gamma_a**2
    den = g2 + detuning**2
    half = 0.5 * line.alpha_L_peak
    return half * g2 / den, half * line.gamma_a * detuning / den


def beat_signal(s: Scenario) -> BeatSignal:
    """Demodulated beat at the modulation rate after the absorber.

    Computes the exact interference of the carrier with the first sideband
    pair, each attenuated and phase shifted by the absorber at its own
    frequency.  With no absorber (alpha_L = 0), or with the carrier exactly
    at line center, the sideband beats cancel identically and both beat
    components are exactly zero.
    """
    m = s.modulation.index
    if m > INDEX_CAP:
        raise ValueError(
            f"modulation index {m} exceeds {INDEX_CAP}; the carrier plus "
            "first-sideband-pair beat model does not hold there. Synthesize "
            "the waveform at a lower index (transmitted_power_series) or "
            "extend the expansion."
        )
    line = s.absorber
    dc0 = s.absorber.carrier_detuning
    omega = s.modulation.omega_mod
    p0 = s.laser.power_W

    j0 = float(jv(0, m))
    j1 = float(jv(1, m))

    d0, ph0 = absorber_transfer(line, dc0)
    dp, php = absorber_transfer(line, dc0 + omega)
    dm, phm = absorber_transfer(line, dc0 - omega)

    t0 = complex(math.exp(-d0)) * complex(math.cos(ph0), -math.sin(ph0))
    tp = complex(math.exp(-dp)) * complex(math.cos(php), -math.sin(php))
    tm = complex(math.exp(-dm)) * complex(math.cos(phm), -math.sin(phm))

    # coefficient of exp(i*Omega*t) in |J0 t0 + J1 tp e^{iWt} - J1 tm e^{-iWt}|^2
    a = j0 * j1 * (tp * t0.conjugate() - t0 * tm.conjugate())

    return BeatSignal(
        dc_power_W=p0 * math.exp(-2.0 * d0),
        inphase_W=2.0 * p0 * a.real,
        quadrature_W=-2.0 * p0 * a.imag,
    )


def transmitted_power_series(s: Scenario, dt: float, n_samples: int) -> np.ndarray:
    """Transmitted power sampled at ``dt``:
    P(t) = dc + inphase*cos(W t) + quadrature*sin(W t), W angular.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    b = beat_signal(s)
    w = angular(s.modulation.omega_mod)
    t = np.arange(n_samples) * dt
    return b.dc_power_W + b.inphase_W * np.cos(w * t) + b.quadrature_W * np.sin(w * t)
