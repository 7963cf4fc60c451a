"""Resonant micromechanical detection: radiation-pressure transduction,
closed-form noise budget, minimum detectable absorbance, and the
laser-noise thermal-limit condition.

All closed forms here use the plain per-second frequency convention (see
``fmsense.model``).  The noise budget is expressed as equivalent vibration
amplitudes at the resonance:

    x_sig = Q (1+R) (alpha L) P0 / (k c)
    x_T   = sqrt(4 kB T / k)           (benchmark composition convention)
    x_SN  = sqrt(Q (1+R)^2 w0 P0 hw) / (k c)
    x_N   = sqrt(Q (1+R)^2 w0) P_N(w0) / (k c)

and SNR = x_sig^2 / (x_T^2 + x_SN^2 + x_N^2).  The benchmark thermal term
4 kB T / k sits a factor 4 above the equipartition variance kB T / k; both
conventions are exposed via ``thermal_mode`` ("4kT" and "equipartition")
and the time-domain simulator validates the equipartition one (the
physically forced choice).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, SPEED_OF_LIGHT
from .model import (
    Cantilever,
    NumericError,
    RinSpectrum,
    Scenario,
    angular,
    photon_energy,
    xi_at,
)
from .optics import beat_signal

CHANNELS = ("thermal", "shot", "rin")

_BISECT_REL_TOL = 1e-6
_BISECT_MAX_ITER = 200


def radiation_force(power_W: float, reflectivity: float, enhancement: float = 1.0) -> float:
    """Radiation-pressure force enhancement*(1+R)*P/c on the resonator."""
    if power_W < 0.0:
        raise ValueError(f"power must be >= 0, got {power_W}")
    if not (0.0 <= reflectivity <= 1.0):
        raise ValueError(f"reflectivity must be within [0, 1], got {reflectivity}")
    return enhancement * (1.0 + reflectivity) * power_W / SPEED_OF_LIGHT


def mechanical_gain(c: Cantilever, drive_rad_per_s: float) -> float:
    """Displacement per unit force amplitude at angular drive frequency.

    |chi(w)| = (1/k) w0^2 / sqrt((w0^2 - w^2)^2 + (w0 w / Q)^2) with both
    frequencies angular; Q/k on resonance, 1/k statically.
    """
    if drive_rad_per_s < 0.0:
        raise ValueError(f"drive frequency must be >= 0, got {drive_rad_per_s}")
    w0 = angular(c.omega_0)
    w = drive_rad_per_s
    den = math.hypot(w0**2 - w**2, w0 * w / c.quality)
    if den == 0.0:
        raise ValueError("undamped resonance response is unbounded")
    return w0**2 / (c.spring_N_per_m * den)


def rin_power_density(r: RinSpectrum, power_W: float, omega: float) -> float:
    """Laser power-noise amplitude density P_N(omega) = P0 * xi(omega),
    W/sqrt(Hz), for the Lorentzian noise peak."""
    return power_W * r.xi_peak_rtHz * math.sqrt(
        r.gamma**2 / (r.gamma**2 + (r.omega_L - omega) ** 2)
    )


@dataclass(frozen=True)
class NoiseBudget:
    """Signal and noise as equivalent vibration amplitudes (meters)."""

    x_sig_m: float
    x_T_m: float
    x_SN_m: float
    x_N_m: float

    def noise_quadrature_m(self) -> float:
        return math.sqrt(self.x_T_m**2 + self.x_SN_m**2 + self.x_N_m**2)

    def snr(self) -> float:
        return self.x_sig_m**2 / (self.x_T_m**2 + self.x_SN_m**2 + self.x_N_m**2)


def _effective_alpha(s: Scenario, alpha_mode: str) -> float:
    if alpha_mode == "nominal":
        return s.absorber.alpha_L_peak
    if alpha_mode == "beat":
        b = beat_signal(s)
        return math.hypot(b.inphase_W, b.quadrature_W) / s.laser.power_W
    raise ValueError(f"alpha_mode must be 'nominal' or 'beat', got {alpha_mode!r}")


def _thermal_factor(thermal_mode: str) -> float:
    if thermal_mode == "4kT":
        return 4.0
    if thermal_mode == "equipartition":
        return 1.0
    raise ValueError(
        f"thermal_mode must be '4kT' or 'equipartition', got {thermal_mode!r}"
    )


def noise_budget(
    s: Scenario,
    *,
    alpha_mode: str = "nominal",
    thermal_mode: str = "4kT",
    channels: tuple[str, ...] = CHANNELS,
) -> NoiseBudget:
    """Equivalent-amplitude noise budget of the resonant scheme.

    ``channels`` selects which noise terms are included (the rest are
    reported as zero); useful for dominance studies and for matching
    simulator runs with individual channels enabled.
    """
    unknown = set(channels) - set(CHANNELS)
    if unknown:
        raise ValueError(f"unknown noise channels: {sorted(unknown)}")
    c = s.cantilever
    laser = s.laser
    q = c.quality
    k = c.spring_N_per_m
    r = c.reflectivity
    p0 = laser.power_W
    w0 = c.omega_0
    kc = k * SPEED_OF_LIGHT
    alpha = _effective_alpha(s, alpha_mode)

    x_sig = q * (1.0 + r) * alpha * p0 / kc

    x_t = 0.0
    if "thermal" in channels:
        x_t = math.sqrt(_thermal_factor(thermal_mode) * BOLTZMANN * c.temperature_K / k)

    x_sn = 0.0
    if "shot" in channels:
        hw = photon_energy(laser.wavelength_m)
        x_sn = math.sqrt(q * (1.0 + r) ** 2 * w0 * p0 * hw) / kc

    x_n = 0.0
    if "rin" in channels:
        p_n = p0 * xi_at(laser, w0)
        x_n = math.sqrt(q * (1.0 + r) ** 2 * w0) * p_n / kc

    return NoiseBudget(x_sig_m=x_sig, x_T_m=x_t, x_SN_m=x_sn, x_N_m=x_n)


def snr_cantilever(
    s: Scenario,
    *,
    alpha_mode: str = "nominal",
    thermal_mode: str = "4kT",
    channels: tuple[str, ...] = CHANNELS,
) -> float:
    """Closed-form power SNR of the resonant scheme,

        Q^2 (1+R)^2 (aL)^2 P0^2
        -----------------------------------------------
        4 kB T k c^2 + Q (1+R)^2 w0 [P0 hw + P_N(w0)^2]

    written exactly in this composition (not via the component amplitudes)
    so the budget/SNR consistency check is a genuine cross-check.
    """
    unknown = set(channels) - set(CHANNELS)
    if unknown:
        raise ValueError(f"unknown noise channels: {sorted(unknown)}")
    c = s.cantilever
    laser = s.laser
    q = c.quality
    k = c.spring_N_per_m
    r = c.reflectivity
    p0 = laser.power_W
    w0 = c.omega_0
    alpha = _effective_alpha(s, alpha_mode)

    numerator = q**2 * (1.0 + r) ** 2 * alpha**2 * p0**2
    den = 0.0
    if "thermal" in channels:
        den += (
            _thermal_factor(thermal_mode)
            * BOLTZMANN
            * c.temperature_K
            * k
            * SPEED_OF_LIGHT**2
        )
    optical = 0.0
    if "shot" in channels:
        optical += p0 * photon_energy(laser.wavelength_m)
    if "rin" in channels:
        optical += (p0 * xi_at(laser, w0)) ** 2
    den += q * (1.0 + r) ** 2 * w0 * optical
    if den == 0.0:
        raise ValueError("all noise channels disabled or zero; SNR undefined")
    return numerator / den


def min_alpha_cantilever(
    s: Scenario,
    mode: str = "full",
    *,
    thermal_mode: str = "4kT",
) -> float:
    """Smallest detectable absorbance alpha*L (unity SNR).

    rin_only : xi(w0) * sqrt(w0 / Q), the laser-noise-limited floor
    full     : includes thermal and photon shot noise as well
    """
    c = s.cantilever
    laser = s.laser
    p0 = laser.power_W
    if p0 <= 0.0:
        raise ValueError(f"laser power must be > 0, got {p0}")
    w0 = c.omega_0
    q = c.quality
    if mode == "rin_only":
        return xi_at(laser, w0) * math.sqrt(w0 / q)
    if mode == "full":
        k = c.spring_N_per_m
        r = c.reflectivity
        den = _thermal_factor(thermal_mode) * BOLTZMANN * c.temperature_K * k * (
            SPEED_OF_LIGHT**2
        ) + q * (1.0 + r) ** 2 * w0 * (
            p0 * photon_energy(laser.wavelength_m) + (p0 * xi_at(laser, w0)) ** 2
        )
        return math.sqrt(den) / (q * (1.0 + r) * p0)
    raise ValueError(f"mode must be 'rin_only' or 'full', got {mode!r}")


@dataclass(frozen=True)
class ThermalLimitReport:
    """Both sides of the thermal-dominance condition
    sqrt(mu/(1+mu^2)) * xi_peak < (c/((1+R) P0)) * sqrt(4 pi kB T k/(Q Gamma)),
    with mu = (w0 - w_L)/Gamma."""

    mu: float
    lhs: float
    rhs: float
    satisfied: bool


def _thermal_limit_rhs(s: Scenario) -> float:
    c = s.cantilever
    r = s.laser.rin
    assert r is not None
    return (SPEED_OF_LIGHT / ((1.0 + c.reflectivity) * s.laser.power_W)) * math.sqrt(
        4.0
        * math.pi
        * BOLTZMANN
        * c.temperature_K
        * c.spring_N_per_m
        / (c.quality * r.gamma)
    )


def thermal_limit_margin(s: Scenario) -> ThermalLimitReport:
    """Evaluate the thermal-dominance condition for a Lorentzian noise peak.

    Requires the laser to carry a Lorentzian RIN spectrum and the resonance
    to sit above the noise peak (mu > 0).
    """
    r = s.laser.rin
    if r is None:
        raise ValueError(
            "thermal-limit analysis requires a Lorentzian RIN spectrum "
            "(laser.rin is not set)"
        )
    mu = (s.cantilever.omega_0 - r.omega_L) / r.gamma
    if mu <= 0.0:
        raise ValueError(
            f"resonance must sit above the noise peak (mu > 0), got mu = {mu}"
        )
    lhs = math.sqrt(mu / (1.0 + mu**2)) * r.xi_peak_rtHz
    rhs = _thermal_limit_rhs(s)
    return ThermalLimitReport(mu=mu, lhs=lhs, rhs=rhs, satisfied=lhs < rhs)


@dataclass(frozen=True)
class ResonanceRequirement:
    """Smallest resonance that keeps laser noise below thermal noise.

    constrained is False when the condition holds for every mu (the noise
    peak is too weak to matter anywhere); mu_star/omega_0_min are None then.
    """

    constrained: bool
    mu_star: float | None
    omega_0_min: float | None


def min_resonant_frequency(s: Scenario) -> ResonanceRequirement:
    """Solve the thermal-dominance condition for the minimum resonance.

    The left side sqrt(mu/(1+mu^2))*xi_peak peaks at mu = 1 and decreases
    beyond; the equality is root-found on that decreasing branch by
    bisection (robust and monotone, no derivatives), to 1e-6 relative.
    """
    r = s.laser.rin
    if r is None:
        raise ValueError(
            "thermal-limit analysis requires a Lorentzian RIN spectrum "
            "(laser.rin is not set)"
        )
    rhs = _thermal_limit_rhs(s)
    xi = r.xi_peak_rtHz

    def lhs(mu: float) -> float:
        return math.sqrt(mu / (1.0 + mu**2)) * xi

    if lhs(1.0) < rhs:
        return ResonanceRequirement(constrained=False, mu_star=None, omega_0_min=None)

    hi = 2.0
    for _ in range(_BISECT_MAX_ITER):
        if lhs(hi) < rhs:
            break
        hi *= 2.0
    else:
        raise NumericError("could not bracket the thermal-limit crossing")

    lo = 1.0
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if lhs(mid) >= rhs:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= _BISECT_REL_TOL * hi:
            break
    else:
        raise NumericError("thermal-limit bisection did not converge")

    mu_star = 0.5 * (lo + hi)
    return ResonanceRequirement(
        constrained=True,
        mu_star=mu_star,
        omega_0_min=r.omega_L + mu_star * r.gamma,
    )


def thermal_force_sensitivity(c: Cantilever) -> float:
    """Thermal-noise-limited force sensitivity sqrt(4 kB T k / (Q w0)),
    N/sqrt(Hz), in plain per-second frequency units."""
    return math.sqrt(
        4.0
        * BOLTZMANN
        * c.temperature_K
        * c.spring_N_per_m
        / (c.quality * c.omega_0)
    )
