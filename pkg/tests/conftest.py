import math

import numpy as np

from fmsense.model import (
    AbsorberLine,
    Cantilever,
    DetectorChain,
    LaserSource,
    ModulationSpec,
    RinSpectrum,
    Scenario,
)

_DETECTOR = DetectorChain(
    quantum_efficiency=0.8,
    load_resistance_ohm=50.0,
    stage_noise_figures_dB=(2.0, 4.0, 4.0),
    bandwidth_Hz=100.0,
)


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Broad but physically valid scenario draw for property loops."""

    def logu(lo, hi):
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    omega_0 = logu(1e4, 1e8)
    rin = None
    if rng.random() < 0.5:
        rin = RinSpectrum(
            xi_peak_rtHz=logu(1e-7, 1e-3),
            omega_L=logu(1e3, 1e8),
            gamma=logu(1e3, 1e7),
        )
    return Scenario(
        laser=LaserSource(
            power_W=logu(1e-6, 1e-2),
            wavelength_m=logu(4e-7, 1.6e-6),
            broadband_rin_rtHz=logu(1e-7, 1e-3),
            rin=rin,
        ),
        modulation=ModulationSpec(omega_mod=omega_0, index=float(rng.uniform(0.01, 0.5))),
        absorber=AbsorberLine(
            omega_a=logu(1e14, 1e15),
            gamma_a=logu(1e5, 1e9),
            alpha_L_peak=logu(1e-6, 1e-2),
            carrier_detuning=float(rng.uniform(-1e8, 1e8)),
        ),
        cantilever=Cantilever(
            spring_N_per_m=logu(1e-3, 10.0),
            quality=logu(1e2, 1e6),
            omega_0=omega_0,
            reflectivity=float(rng.uniform(0.0, 1.0)),
            temperature_K=logu(0.1, 300.0),
        ),
        detector=_DETECTOR,
    )


def scaled_scenario() -> Scenario:
    """Monte Carlo benchmark point: slow resonance so runs stay cheap,
    noise levels arranged so every channel is visible above float noise."""
    omega_0 = 1e5 / (2.0 * math.pi)
    return Scenario(
        laser=LaserSource(
            power_W=1e-4,
            wavelength_m=680e-9,
            broadband_rin_rtHz=1.8e-5,
        ),
        modulation=ModulationSpec(omega_mod=omega_0, index=0.4),
        absorber=AbsorberLine(
            omega_a=4.409e14,
            gamma_a=omega_0,
            alpha_L_peak=0.35,
            carrier_detuning=omega_0,
        ),
        cantilever=Cantilever(
            spring_N_per_m=0.3,
            quality=500.0,
            omega_0=omega_0,
            reflectivity=0.5,
            temperature_K=4.0,
        ),
        detector=_DETECTOR,
    )
