"""Flat key/value configuration for scenarios.

Grammar: one `section.key = value` per line, `#` starts a comment, blank
lines ignored.  Later assignments win, so a file can be layered on top of
a preset and `--set` overrides layered on top of both.  Keys naming plain
per-second frequencies carry a `_paperHz` suffix as a reminder that the
stored numbers are the ones quoted next to the closed-form expressions,
not angular frequencies.

All problems in a configuration (unknown keys, bad numbers, missing
required keys, physical-range violations) are reported together in a
single ValidationError rather than one at a time.
"""

from __future__ import annotations

import hashlib

from .model import (
    AbsorberLine,
    Cantilever,
    DetectorChain,
    LaserSource,
    ModulationSpec,
    RinSpectrum,
    Scenario,
    ValidationError,
    Violation,
    validate_scenario,
)
from .presets import load_preset

# key -> (required, kind); declaration order is the canonical file order
KEYS: dict[str, tuple[bool, str]] = {
    "laser.power_W": (True, "float"),
    "laser.wavelength_m": (True, "float"),
    "laser.broadband_rin_rtHz": (True, "float"),
    "laser.rin.xi_peak_rtHz": (False, "float"),
    "laser.rin.omega_L_paperHz": (False, "float"),
    "laser.rin.gamma_paperHz": (False, "float"),
    "modulation.omega_mod_paperHz": (True, "float"),
    "modulation.index": (True, "float"),
    "modulation.source_quality": (False, "float"),
    "absorber.omega_a_paperHz": (True, "float"),
    "absorber.gamma_a_paperHz": (True, "float"),
    "absorber.alpha_L_peak": (True, "float"),
    "absorber.carrier_detuning_paperHz": (False, "float"),
    "cantilever.spring_N_per_m": (True, "float"),
    "cantilever.quality": (True, "float"),
    "cantilever.omega_0_paperHz": (True, "float"),
    "cantilever.reflectivity": (True, "float"),
    "cantilever.temperature_K": (True, "float"),
    "cantilever.force_enhancement": (False, "float"),
    "detector.quantum_efficiency": (True, "float"),
    "detector.load_resistance_ohm": (True, "float"),
    "detector.stage_noise_figures_dB": (True, "nf_list"),
    "detector.bandwidth_Hz": (True, "float"),
    "detector.temperature_K": (False, "float"),
}

_RIN_KEYS = (
    "laser.rin.xi_peak_rtHz",
    "laser.rin.omega_L_paperHz",
    "laser.rin.gamma_paperHz",
)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    return repr(float(value))


def _parse_value(key: str, raw: str):
    kind = KEYS[key][1]
    if kind == "nf_list":
        return tuple(float(part) for part in raw.split(","))
    return float(raw)


def scenario_to_mapping(s: Scenario) -> dict[str, object]:
    """Flatten a scenario to the canonical key set (optional keys omitted
    when unset)."""
    m: dict[str, object] = {
        "laser.power_W": s.laser.power_W,
        "laser.wavelength_m": s.laser.wavelength_m,
        "laser.broadband_rin_rtHz": s.laser.broadband_rin_rtHz,
        "modulation.omega_mod_paperHz": s.modulation.omega_mod,
        "modulation.index": s.modulation.index,
        "absorber.omega_a_paperHz": s.absorber.omega_a,
        "absorber.gamma_a_paperHz": s.absorber.gamma_a,
        "absorber.alpha_L_peak": s.absorber.alpha_L_peak,
        "absorber.carrier_detuning_paperHz": s.absorber.carrier_detuning,
        "cantilever.spring_N_per_m": s.cantilever.spring_N_per_m,
        "cantilever.quality": s.cantilever.quality,
        "cantilever.omega_0_paperHz": s.cantilever.omega_0,
        "cantilever.reflectivity": s.cantilever.reflectivity,
        "cantilever.temperature_K": s.cantilever.temperature_K,
        "cantilever.force_enhancement": s.cantilever.force_enhancement,
        "detector.quantum_efficiency": s.detector.quantum_efficiency,
        "detector.load_resistance_ohm": s.detector.load_resistance_ohm,
        "detector.stage_noise_figures_dB": s.detector.stage_noise_figures_dB,
        "detector.bandwidth_Hz": s.detector.bandwidth_Hz,
        "detector.temperature_K": s.detector.temperature_K,
    }
    if s.laser.rin is not None:
        m["laser.rin.xi_peak_rtHz"] = s.laser.rin.xi_peak_rtHz
        m["laser.rin.omega_L_paperHz"] = s.laser.rin.omega_L
        m["laser.rin.gamma_paperHz"] = s.laser.rin.gamma
    if s.modulation.source_quality is not None:
        m["modulation.source_quality"] = s.modulation.source_quality
    return m


def mapping_to_scenario(mapping: dict[str, object]) -> Scenario:
    """Materialize and validate a flat mapping; raises ValidationError
    listing every missing key and range violation at once."""
    violations: list[Violation] = []
    for key, (required, _) in KEYS.items():
        if required and key not in mapping:
            violations.append(Violation(key, "required key is missing"))
    present = [k for k in _RIN_KEYS if k in mapping]
    if 0 < len(present) < len(_RIN_KEYS):
        missing = ", ".join(k for k in _RIN_KEYS if k not in mapping)
        violations.append(
            Violation(present[0], f"structured RIN needs all of: {missing}")
        )
    if violations:
        raise ValidationError(violations)

    rin = None
    if len(present) == len(_RIN_KEYS):
        rin = RinSpectrum(
            xi_peak_rtHz=mapping["laser.rin.xi_peak_rtHz"],
            omega_L=mapping["laser.rin.omega_L_paperHz"],
            gamma=mapping["laser.rin.gamma_paperHz"],
        )
    s = Scenario(
        laser=LaserSource(
            power_W=mapping["laser.power_W"],
            wavelength_m=mapping["laser.wavelength_m"],
            broadband_rin_rtHz=mapping["laser.broadband_rin_rtHz"],
            rin=rin,
        ),
        modulation=ModulationSpec(
            omega_mod=mapping["modulation.omega_mod_paperHz"],
            index=mapping["modulation.index"],
            source_quality=mapping.get("modulation.source_quality"),
        ),
        absorber=AbsorberLine(
            omega_a=mapping["absorber.omega_a_paperHz"],
            gamma_a=mapping["absorber.gamma_a_paperHz"],
            alpha_L_peak=mapping["absorber.alpha_L_peak"],
            carrier_detuning=mapping.get("absorber.carrier_detuning_paperHz", 0.0),
        ),
        cantilever=Cantilever(
            spring_N_per_m=mapping["cantilever.spring_N_per_m"],
            quality=mapping["cantilever.quality"],
            omega_0=mapping["cantilever.omega_0_paperHz"],
            reflectivity=mapping["cantilever.reflectivity"],
            temperature_K=mapping["cantilever.temperature_K"],
            force_enhancement=mapping.get("cantilever.force_enhancement", 1.0),
        ),
        detector=DetectorChain(
            quantum_efficiency=mapping["detector.quantum_efficiency"],
            load_resistance_ohm=mapping["detector.load_resistance_ohm"],
            stage_noise_figures_dB=tuple(mapping["detector.stage_noise_figures_dB"]),
            bandwidth_Hz=mapping["detector.bandwidth_Hz"],
            temperature_K=mapping.get("detector.temperature_K", 300.0),
        ),
    )
    return validate_scenario(s)


def parse_config_text(text: str, source: str = "config") -> dict[str, object]:
    """Parse `key = value` lines; aggregates every malformed line, unknown
    key, and unparseable value into one ValidationError."""
    mapping: dict[str, object] = {}
    violations: list[Violation] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            violations.append(
                Violation(f"{source}:{lineno}", f"expected 'key = value', got {line.strip()!r}")
            )
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in KEYS:
            violations.append(Violation(f"{source}:{lineno}", f"unknown key {key!r}"))
            continue
        try:
            mapping[key] = _parse_value(key, raw)
        except ValueError:
            violations.append(
                Violation(f"{source}:{lineno}", f"cannot parse value {raw!r} for {key}")
            )
    if violations:
        raise ValidationError(violations)
    return mapping


def parse_overrides(pairs: tuple[str, ...] | list[str]) -> dict[str, object]:
    """Parse repeated `--set key=value` arguments with aggregate errors."""
    mapping: dict[str, object] = {}
    violations: list[Violation] = []
    for pair in pairs:
        if "=" not in pair:
            violations.append(Violation("--set", f"expected key=value, got {pair!r}"))
            continue
        key, raw = (part.strip() for part in pair.split("=", 1))
        if key not in KEYS:
            violations.append(Violation("--set", f"unknown key {key!r}"))
            continue
        try:
            mapping[key] = _parse_value(key, raw)
        except ValueError:
            violations.append(Violation("--set", f"cannot parse value {raw!r} for {key}"))
    if violations:
        raise ValidationError(violations)
    return mapping


def scenario_to_config_text(s: Scenario) -> str:
    """Canonical config rendering; parsing it back reproduces the scenario
    bit for bit (floats are written with repr)."""
    mapping = scenario_to_mapping(s)
    lines = [f"{key} = {_format_value(mapping[key])}" for key in KEYS if key in mapping]
    return "\n".join(lines) + "\n"


def scenario_fingerprint(s: Scenario, exclude: tuple[str, ...] = ()) -> str:
    """sha256 of the canonical config text, optionally with some keys
    dropped (a sweep drops its axis so the fingerprint names the family)."""
    text = scenario_to_config_text(s)
    if exclude:
        kept = [
            line
            for line in text.splitlines()
            if line.split("=", 1)[0].strip() not in exclude
        ]
        text = "\n".join(kept) + "\n"
    return hashlib.sha256(text.encode()).hexdigest()


def set_by_key(s: Scenario, key: str, value: float) -> Scenario:
    """Return a copy of the scenario with one canonical key replaced."""
    if key not in KEYS:
        known = ", ".join(KEYS)
        raise KeyError(f"unknown key {key!r}; known keys: {known}")
    mapping = scenario_to_mapping(s)
    mapping[key] = value
    return mapping_to_scenario(mapping)


def load_scenario(
    preset: str | None = None,
    config_path: str | None = None,
    overrides: tuple[str, ...] | list[str] = (),
) -> tuple[Scenario, dict]:
    """Assemble a scenario from preset, then config file, then overrides.

    Returns the validated scenario plus a provenance record suitable for
    embedding in reports.
    """
    if preset is None and config_path is None:
        raise ValidationError(
            [Violation("scenario", "pass a preset name or a config file")]
        )
    mapping: dict[str, object] = {}
    if preset is not None:
        mapping.update(scenario_to_mapping(load_preset(preset)))
    if config_path is not None:
        with open(config_path, encoding="utf-8") as fh:
            mapping.update(parse_config_text(fh.read(), source=config_path))
    if overrides:
        mapping.update(parse_overrides(overrides))
    scenario = mapping_to_scenario(mapping)
    provenance = {
        "preset": preset,
        "config_path": config_path,
        "overrides": list(overrides),
    }
    return scenario, provenance
