"""Built-in operating points.

All frequencies follow the package convention: plain per-second rates, as
they would be quoted next to the closed-form budget expressions.
"""

from __future__ import annotations

from .model import (
    AbsorberLine,
    Cantilever,
    DetectorChain,
    LaserSource,
    ModulationSpec,
    RinSpectrum,
    Scenario,
)

_WAVELENGTH = 680e-9
_ABSORBER_OMEGA = 4.409e14  # c / 680 nm

_DETECTOR = DetectorChain(
    quantum_efficiency=0.8,
    load_resistance_ohm=50.0,
    stage_noise_figures_dB=(2.0, 4.0, 4.0),
    bandwidth_Hz=100.0,
    temperature_K=300.0,
)


def _main() -> Scenario:
    return Scenario(
        laser=LaserSource(
            power_W=1e-4,
            wavelength_m=_WAVELENGTH,
            broadband_rin_rtHz=1.8e-5,
        ),
        modulation=ModulationSpec(omega_mod=2e7, index=0.1),
        absorber=AbsorberLine(
            omega_a=_ABSORBER_OMEGA,
            gamma_a=1e7,
            alpha_L_peak=1.8e-4,
            carrier_detuning=1e7,
        ),
        cantilever=Cantilever(
            spring_N_per_m=0.3,
            quality=2e5,
            omega_0=2e7,
            reflectivity=0.5,
            temperature_K=4.0,
        ),
        detector=_DETECTOR,
    )


def _electronic() -> Scenario:
    s = _main()
    return Scenario(
        laser=s.laser,
        modulation=ModulationSpec(omega_mod=2e10, index=0.1, source_quality=2e8),
        absorber=s.absorber,
        cantilever=s.cantilever,
        detector=s.detector,
    )


def _structured_rin() -> Scenario:
    s = _main()
    return Scenario(
        laser=LaserSource(
            power_W=s.laser.power_W,
            wavelength_m=s.laser.wavelength_m,
            broadband_rin_rtHz=s.laser.broadband_rin_rtHz,
            rin=RinSpectrum(xi_peak_rtHz=1.46e-4, omega_L=0.3e6, gamma=1e6),
        ),
        modulation=s.modulation,
        absorber=s.absorber,
        cantilever=s.cantilever,
        detector=s.detector,
    )


def _tabletop() -> Scenario:
    # soft room-temperature lever read out at 10 kHz
    omega_0 = 62831.85307179586  # 2 pi x 1e4
    s = _main()
    return Scenario(
        laser=LaserSource(
            power_W=4e-5,
            wavelength_m=_WAVELENGTH,
            broadband_rin_rtHz=1.8e-5,
        ),
        modulation=ModulationSpec(omega_mod=omega_0, index=0.1),
        absorber=s.absorber,
        cantilever=Cantilever(
            spring_N_per_m=4.4e-3,
            quality=1e5,
            omega_0=omega_0,
            reflectivity=0.5,
            temperature_K=300.0,
        ),
        detector=s.detector,
    )


_BUILDERS = {
    "paper-main": _main,
    "paper-electronic": _electronic,
    "paper-eq4": _structured_rin,
    "yang2002": _tabletop,
}

PRESET_NAMES = tuple(sorted(_BUILDERS))


def preset_names() -> tuple[str, ...]:
    return PRESET_NAMES


def load_preset(name: str) -> Scenario:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(PRESET_NAMES)
        raise KeyError(f"unknown preset {name!r}; available: {known}") from None
    return builder()
