"""Sensitivity analysis and time-domain simulation of FM spectroscopy
read out by a resonant micro-cantilever or a fast photodiode chain."""

__version__ = "0.1.0"

from .model import (
    AbsorberLine,
    Cantilever,
    DetectorChain,
    LaserSource,
    ModulationSpec,
    NumericError,
    RinSpectrum,
    Scenario,
    ValidationError,
    Violation,
    angular,
    photon_energy,
    scenario_violations,
    validate_scenario,
    xi_at,
)
from .optics import (
    BeatSignal,
    SpectralComponent,
    absorber_transfer,
    beat_signal,
    fm_component_spectrum,
    transmitted_power_series,
)
from .cantilever import (
    NoiseBudget,
    ResonanceRequirement,
    ThermalLimitReport,
    mechanical_gain,
    min_alpha_cantilever,
    min_resonant_frequency,
    noise_budget,
    radiation_force,
    rin_power_density,
    snr_cantilever,
    thermal_force_sensitivity,
    thermal_limit_margin,
)
from .electronic import (
    ElectronicBudget,
    detection_bandwidth,
    electronic_budget,
    min_alpha_electronic,
    responsivity,
    snr_electronic,
    total_noise_figure,
)
from .analysis import (
    DominanceReport,
    METRICS,
    ResonanceOptimum,
    SchemeComparison,
    SweepAxis,
    SweepTable,
    compare_schemes,
    dominance_analysis,
    optimize_resonance,
    sweep,
)
from .simulate import (
    ExperimentResult,
    PredictedExperiment,
    SimConfig,
    Trajectory,
    colored_noise_series,
    lock_in_demodulate,
    predicted_experiment,
    propagate_oscillator,
    run_experiment,
    thermal_force_series,
    welch_psd,
)
from .config import (
    load_scenario,
    parse_config_text,
    scenario_fingerprint,
    scenario_to_config_text,
    set_by_key,
)
from .presets import load_preset, preset_names
from .cli import run_cli
