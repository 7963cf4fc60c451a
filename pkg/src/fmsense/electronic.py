"""Conventional photodiode + amplifier benchmark for the same FM signal.

Current-domain SNR with responsivity g = e*eta/hw:

    SNR = g^2 P0^2 (aL)^2 /
          ( df * e * (g P0 + 2 kB T / R_load) + df * g^2 xi_eff^2 P0^2 )

with xi_eff = xi * nf_linear.  The Johnson-noise term is implemented in
exactly this benchmark composition even though its dimensions are
suspect (the charge multiplying 2kT/R); the conventional current-noise
form 4 kB T df / R_load is available behind ``conventional_johnson`` and
is off by default so the default output reproduces the benchmark numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, ELEMENTARY_CHARGE
from .model import Scenario, photon_energy, xi_at


def responsivity(wavelength_m: float, quantum_efficiency: float) -> float:
    """Photodiode responsivity e*eta/(photon energy), A/W."""
    if not (0.0 < quantum_efficiency <= 1.0):
        raise ValueError(
            f"quantum efficiency must be within (0, 1], got {quantum_efficiency}"
        )
    return ELEMENTARY_CHARGE * quantum_efficiency / photon_energy(wavelength_m)


def total_noise_figure(stages_dB: tuple[float, ...]) -> tuple[float, float]:
    """Combine cascaded amplifier noise figures.

    Stage figures are quoted in dB and add in dB in the benchmark budget;
    returns (total_dB, linear power factor 10^(dB/10)).
    """
    for i, nf in enumerate(stages_dB):
        if nf < 0.0:
            raise ValueError(f"stage {i} noise figure must be >= 0 dB, got {nf}")
    total_db = float(sum(stages_dB))
    return total_db, 10.0 ** (total_db / 10.0)


def detection_bandwidth(omega_mod: float, source_quality: float) -> float:
    """Detection bandwidth omega_mod/source_quality, Hz, with the
    modulation rate in plain per-second units."""
    if omega_mod <= 0.0:
        raise ValueError(f"modulation rate must be > 0, got {omega_mod}")
    if source_quality <= 0.0:
        raise ValueError(f"source quality must be > 0, got {source_quality}")
    return omega_mod / source_quality


@dataclass(frozen=True)
class ElectronicBudget:
    """Current-domain signal and noise terms (A^2)."""

    responsivity_A_per_W: float
    noise_figure_linear: float
    bandwidth_Hz: float
    signal_term_A2: float
    shot_term_A2: float
    johnson_term_A2: float
    rin_term_A2: float

    def snr(self) -> float:
        return self.signal_term_A2 / (
            self.shot_term_A2 + self.johnson_term_A2 + self.rin_term_A2
        )


def electronic_budget(
    s: Scenario,
    alpha_L: float | None = None,
    *,
    conventional_johnson: bool = False,
) -> ElectronicBudget:
    """Signal and noise terms of the photodiode benchmark.

    ``alpha_L`` defaults to the scenario's absorber peak absorbance.  The
    RIN density is evaluated at the modulation rate, where the electronic
    scheme detects.
    """
    if alpha_L is None:
        alpha_L = s.absorber.alpha_L_peak
    if alpha_L < 0.0:
        raise ValueError(f"absorbance must be >= 0, got {alpha_L}")
    d = s.detector
    p0 = s.laser.power_W
    g = responsivity(s.laser.wavelength_m, d.quantum_efficiency)
    _, nf_linear = total_noise_figure(d.stage_noise_figures_dB)
    df = d.bandwidth_Hz
    xi_eff = xi_at(s.laser, s.modulation.omega_mod) * nf_linear

    if conventional_johnson:
        johnson = 4.0 * BOLTZMANN * d.temperature_K * df / d.load_resistance_ohm
    else:
        johnson = (
            df
            * ELEMENTARY_CHARGE
            * 2.0
            * BOLTZMANN
            * d.temperature_K
            / d.load_resistance_ohm
        )

    return ElectronicBudget(
        responsivity_A_per_W=g,
        noise_figure_linear=nf_linear,
        bandwidth_Hz=df,
        signal_term_A2=g**2 * p0**2 * alpha_L**2,
        shot_term_A2=df * ELEMENTARY_CHARGE * g * p0,
        johnson_term_A2=johnson,
        rin_term_A2=df * g**2 * xi_eff**2 * p0**2,
    )


def snr_electronic(
    s: Scenario,
    alpha_L: float | None = None,
    *,
    conventional_johnson: bool = False,
) -> float:
    """Benchmark-composition SNR of the photodiode detection chain."""
    d = s.detector
    p0 = s.laser.power_W
    if alpha_L is None:
        alpha_L = s.absorber.alpha_L_peak
    if alpha_L < 0.0:
        raise ValueError(f"absorbance must be >= 0, got {alpha_L}")
    g = responsivity(s.laser.wavelength_m, d.quantum_efficiency)
    _, nf_linear = total_noise_figure(d.stage_noise_figures_dB)
    df = d.bandwidth_Hz
    xi_eff = xi_at(s.laser, s.modulation.omega_mod) * nf_linear
    if conventional_johnson:
        electronics = 4.0 * BOLTZMANN * d.temperature_K * df / d.load_resistance_ohm
        den = df * ELEMENTARY_CHARGE * g * p0 + electronics
    else:
        den = df * ELEMENTARY_CHARGE * (
            g * p0 + 2.0 * BOLTZMANN * d.temperature_K / d.load_resistance_ohm
        )
    den += df * g**2 * xi_eff**2 * p0**2
    if den == 0.0:
        raise ValueError("zero noise denominator; SNR undefined")
    return g**2 * p0**2 * alpha_L**2 / den


def min_alpha_electronic(
    s: Scenario,
    mode: str = "full",
    *,
    conventional_johnson: bool = False,
) -> float:
    """Smallest detectable absorbance of the photodiode benchmark.

    rin_only : xi * nf_linear * sqrt(df)
    full     : includes shot and Johnson noise
    """
    d = s.detector
    p0 = s.laser.power_W
    if p0 <= 0.0:
        raise ValueError(f"laser power must be > 0, got {p0}")
    _, nf_linear = total_noise_figure(d.stage_noise_figures_dB)
    df = d.bandwidth_Hz
    xi = xi_at(s.laser, s.modulation.omega_mod)
    if mode == "rin_only":
        return xi * nf_linear * math.sqrt(df)
    if mode == "full":
        b = electronic_budget(s, 1.0, conventional_johnson=conventional_johnson)
        noise = b.shot_term_A2 + b.johnson_term_A2 + b.rin_term_A2
        return math.sqrt(noise) / (b.responsivity_A_per_W * p0)
    raise ValueError(f"mode must be 'rin_only' or 'full', got {mode!r}")
