"""Domain types, validation, and the frequency-unit convention.

Unit convention
---------------
Every rate-like quantity (resonance ``omega_0``, modulation rate
``omega_mod``, noise-peak position ``omega_L``, linewidths ``gamma``,
``gamma_a``) is stored and used by the closed-form analysis exactly as the
headline values are quoted: a 20 MHz resonance enters as ``2.0e7``, with no
factor of 2*pi.  All analytic formulas in this package are written for that
convention, and mixing it with true angular frequencies is the classic way
to be silently wrong by ~6.28x.

The time-domain simulator is the one consumer that needs real angular
frequencies; it converts at its boundary via :func:`angular` and never
compares against plain-convention numbers directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import HBAR, SPEED_OF_LIGHT

TAU = 2.0 * math.pi


class ValidationError(ValueError):
    """Raised when a scenario (or config input) violates its invariants.

    Carries the complete list of violations, not just the first one found.
    """

    def __init__(self, violations: list["Violation"]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} invalid value(s): {lines}")


class NumericError(RuntimeError):
    """Raised when an iterative numeric routine fails to converge."""


@dataclass(frozen=True)
class Violation:
    """One violated invariant: which field, and what was expected."""

    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field} {self.message}"


@dataclass(frozen=True)
class RinSpectrum:
    """Lorentzian relative-intensity-noise peak of the laser.

    xi_peak_rtHz : peak RIN amplitude density, 1/sqrt(Hz)
    omega_L      : peak position (plain per-second units)
    gamma        : half width at half maximum of the power spectrum
                   (plain per-second units)
    """

    xi_peak_rtHz: float
    omega_L: float
    gamma: float


@dataclass(frozen=True)
class LaserSource:
    """Probe laser.

    power_W           : optical power at the detector/cantilever
    wavelength_m      : vacuum wavelength
    broadband_rin_rtHz: flat RIN amplitude density, used whenever no
                        Lorentzian structure (``rin``) is attached
    rin               : optional Lorentzian noise peak; when present it is
                        the laser's noise spectrum and the broadband value
                        is ignored by the analytic chain
    """

    power_W: float
    wavelength_m: float
    broadband_rin_rtHz: float
    rin: RinSpectrum | None = None


@dataclass(frozen=True)
class ModulationSpec:
    """Frequency modulation applied to the carrier.

    omega_mod      : modulation rate (plain per-second units)
    index          : modulation index (phase-modulation depth)
    source_quality : quality factor of the modulation source; sets the
                     detection bandwidth omega_mod/source_quality for the
                     electronic scheme (optional)
    """

    omega_mod: float
    index: float
    source_quality: float | None = None


@dataclass(frozen=True)
class AbsorberLine:
    """Lorentzian absorption line probed by the FM carrier.

    omega_a          : line-center frequency (plain per-second units)
    gamma_a          : half width at half maximum (plain per-second units)
    alpha_L_peak     : peak single-pass absorbance alpha*L (dimensionless)
    carrier_detuning : carrier frequency minus line center
    """

    omega_a: float
    gamma_a: float
    alpha_L_peak: float
    carrier_detuning: float = 0.0


@dataclass(frozen=True)
class Cantilever:
    """Micromechanical resonator used as the optical-power detector.

    spring_N_per_m    : spring constant
    quality           : mechanical quality factor
    omega_0           : resonance (plain per-second units)
    reflectivity      : optical reflectivity in [0, 1]
    temperature_K     : bath temperature
    force_enhancement : multi-bounce/cavity force multiplier (>= 1 typical)
    """

    spring_N_per_m: float
    quality: float
    omega_0: float
    reflectivity: float
    temperature_K: float
    force_enhancement: float = 1.0


@dataclass(frozen=True)
class DetectorChain:
    """Photodiode plus amplifier chain for the electronic benchmark.

    quantum_efficiency     : photodiode quantum efficiency in (0, 1]
    load_resistance_ohm    : load resistance
    stage_noise_figures_dB : per-stage amplifier noise figures, summed in dB
    bandwidth_Hz           : detection bandwidth
    temperature_K          : electronics temperature (room temperature by
                             default; the cryogenic value belongs to the
                             cantilever, not to the amplifier chain)
    """

    quantum_efficiency: float
    load_resistance_ohm: float
    stage_noise_figures_dB: tuple[float, ...]
    bandwidth_Hz: float
    temperature_K: float = 300.0


@dataclass(frozen=True)
class Scenario:
    """Complete description of one measurement configuration."""

    laser: LaserSource
    modulation: ModulationSpec
    absorber: AbsorberLine
    cantilever: Cantilever
    detector: DetectorChain


def angular(frequency: float) -> float:
    """Convert a plain per-second rate to an angular frequency (rad/s)."""
    return TAU * frequency


def photon_energy(wavelength_m: float) -> float:
    """Photon energy 2*pi*hbar*c/lambda in joules."""
    if wavelength_m <= 0.0:
        raise ValueError(f"wavelength must be > 0, got {wavelength_m}")
    return TAU * HBAR * SPEED_OF_LIGHT / wavelength_m


def xi_at(laser: LaserSource, omega: float) -> float:
    """RIN amplitude density of the laser at detection frequency ``omega``.

    Evaluates the Lorentzian peak when one is attached, otherwise the flat
    broadband value.  Plain per-second units for ``omega``.
    """
    r = laser.rin
    if r is None:
        return laser.broadband_rin_rtHz
    return r.xi_peak_rtHz * math.sqrt(
        r.gamma**2 / (r.gamma**2 + (r.omega_L - omega) ** 2)
    )


def _positive(violations: list[Violation], name: str, value: float) -> None:
    if not (value > 0.0) or not math.isfinite(value):
        violations.append(Violation(name, f"must be > 0, got {value!r}"))


def _non_negative(violations: list[Violation], name: str, value: float) -> None:
    if not (value >= 0.0) or not math.isfinite(value):
        violations.append(Violation(name, f"must be >= 0, got {value!r}"))


def scenario_violations(s: Scenario) -> list[Violation]:
    """Collect every violated invariant of a scenario (empty list if valid)."""
    v: list[Violation] = []

    _positive(v, "laser.power_W", s.laser.power_W)
    _positive(v, "laser.wavelength_m", s.laser.wavelength_m)
    _non_negative(v, "laser.broadband_rin_rtHz", s.laser.broadband_rin_rtHz)
    if s.laser.rin is not None:
        _non_negative(v, "laser.rin.xi_peak_rtHz", s.laser.rin.xi_peak_rtHz)
        _positive(v, "laser.rin.omega_L", s.laser.rin.omega_L)
        _positive(v, "laser.rin.gamma", s.laser.rin.gamma)

    _positive(v, "modulation.omega_mod", s.modulation.omega_mod)
    _non_negative(v, "modulation.index", s.modulation.index)
    if s.modulation.source_quality is not None:
        _positive(v, "modulation.source_quality", s.modulation.source_quality)

    _positive(v, "absorber.omega_a", s.absorber.omega_a)
    _positive(v, "absorber.gamma_a", s.absorber.gamma_a)
    _non_negative(v, "absorber.alpha_L_peak", s.absorber.alpha_L_peak)
    if not math.isfinite(s.absorber.carrier_detuning):
        v.append(Violation("absorber.carrier_detuning", "must be finite"))

    _positive(v, "cantilever.spring_N_per_m", s.cantilever.spring_N_per_m)
    _positive(v, "cantilever.quality", s.cantilever.quality)
    _positive(v, "cantilever.omega_0", s.cantilever.omega_0)
    if not (0.0 <= s.cantilever.reflectivity <= 1.0):
        v.append(
            Violation(
                "cantilever.reflectivity",
                f"must be within [0, 1], got {s.cantilever.reflectivity!r}",
            )
        )
    _positive(v, "cantilever.temperature_K", s.cantilever.temperature_K)
    _positive(v, "cantilever.force_enhancement", s.cantilever.force_enhancement)

    d = s.detector
    if not (0.0 < d.quantum_efficiency <= 1.0):
        v.append(
            Violation(
                "detector.quantum_efficiency",
                f"must be within (0, 1], got {d.quantum_efficiency!r}",
            )
        )
    _positive(v, "detector.load_resistance_ohm", d.load_resistance_ohm)
    for i, nf in enumerate(d.stage_noise_figures_dB):
        _non_negative(v, f"detector.stage_noise_figures_dB[{i}]", nf)
    _positive(v, "detector.bandwidth_Hz", d.bandwidth_Hz)
    _positive(v, "detector.temperature_K", d.temperature_K)

    return v


def validate_scenario(s: Scenario) -> Scenario:
    """Return the scenario unchanged if valid, else raise ValidationError.

    Idempotent: validating an already-validated scenario returns the same
    (frozen) object.
    """
    v = scenario_violations(s)
    if v:
        raise ValidationError(v)
    return s
