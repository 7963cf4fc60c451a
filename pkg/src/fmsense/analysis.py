"""Cross-cutting questions: which noise channel wins, how the two readout
schemes compare, parameter sweeps, and the lowest usable resonance."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cantilever import (
    min_alpha_cantilever,
    noise_budget,
    snr_cantilever,
    thermal_limit_margin,
)
from .config import scenario_fingerprint, set_by_key
from .constants import SPEED_OF_LIGHT
from .electronic import min_alpha_electronic, snr_electronic
from .model import NumericError, Scenario, validate_scenario

# widely quoted solid-state laser RIN at the standard operating point
SOLID_STATE_RIN_BENCHMARK = 1.8e-5


@dataclass(frozen=True)
class DominanceReport:
    """Which displacement-noise channel dominates, and where laser noise
    would take over."""

    dominant: str
    x_T_m: float
    x_SN_m: float
    x_N_m: float
    xi_crossover_rtHz: float
    xi_crossover_quadrature_rtHz: float
    note: str


def dominance_analysis(s: Scenario, *, thermal_mode: str = "4kT") -> DominanceReport:
    """Rank the noise channels and locate the RIN crossover.

    The crossover is the spectral density at which laser noise equals the
    strongest of the other channels; the quadrature variant equates it to
    their quadrature sum instead.  Both invert the laser-noise amplitude
    formula, so they hold for any operating point.
    """
    b = noise_budget(s, thermal_mode=thermal_mode)
    amplitudes = {"thermal": b.x_T_m, "shot": b.x_SN_m, "rin": b.x_N_m}
    dominant = max(amplitudes, key=lambda ch: amplitudes[ch])

    c = s.cantilever
    scale = (1.0 + c.reflectivity) * s.laser.power_W * math.sqrt(c.quality * c.omega_0)
    per_xi = scale / (c.spring_N_per_m * SPEED_OF_LIGHT)
    target = max(b.x_T_m, b.x_SN_m)
    xi_star = target / per_xi
    xi_star_q = math.hypot(b.x_T_m, b.x_SN_m) / per_xi

    factor = SOLID_STATE_RIN_BENCHMARK / xi_star if xi_star > 0.0 else math.inf
    note = (
        f"derived crossover xi* = {xi_star:.4e} /sqrt(Hz); the commonly "
        f"quoted {SOLID_STATE_RIN_BENCHMARK:.1e} /sqrt(Hz) solid-state "
        f"dominance threshold sits a factor {factor:.3g} above it. The "
        "constant-factor discrepancy is unreconciled; both numbers are kept."
    )
    return DominanceReport(
        dominant=dominant,
        x_T_m=b.x_T_m,
        x_SN_m=b.x_SN_m,
        x_N_m=b.x_N_m,
        xi_crossover_rtHz=xi_star,
        xi_crossover_quadrature_rtHz=xi_star_q,
        note=note,
    )


@dataclass(frozen=True)
class SchemeComparison:
    """Minimum detectable absorbance of the mechanical and electronic
    readouts on (possibly different) operating points."""

    cantilever_rin_only: float
    cantilever_full: float
    electronic_rin_only: float
    electronic_full: float

    @property
    def ratio_rin_only(self) -> float:
        return self.cantilever_rin_only / self.electronic_rin_only

    @property
    def ratio_full(self) -> float:
        return self.cantilever_full / self.electronic_full


def compare_schemes(
    s: Scenario, electronic: Scenario | None = None
) -> SchemeComparison:
    """Compare sensitivities; the electronic side may use its own scenario
    (modulation far above the mechanical resonance), defaulting to the
    same one."""
    e = electronic if electronic is not None else s
    return SchemeComparison(
        cantilever_rin_only=min_alpha_cantilever(s, "rin_only"),
        cantilever_full=min_alpha_cantilever(s, "full"),
        electronic_rin_only=min_alpha_electronic(e, "rin_only"),
        electronic_full=min_alpha_electronic(e, "full"),
    )


def _metric_xi_crossover(s: Scenario) -> float:
    return dominance_analysis(s).xi_crossover_rtHz


def _metric_xi_crossover_quadrature(s: Scenario) -> float:
    return dominance_analysis(s).xi_crossover_quadrature_rtHz


def _metric_thermal_lhs(s: Scenario) -> float:
    return thermal_limit_margin(s).lhs


def _metric_thermal_rhs(s: Scenario) -> float:
    return thermal_limit_margin(s).rhs


def _metric_thermal_margin(s: Scenario) -> float:
    r = thermal_limit_margin(s)
    return r.rhs - r.lhs


def _metric_ratio_rin_only(s: Scenario) -> float:
    return compare_schemes(s).ratio_rin_only


def _metric_ratio_full(s: Scenario) -> float:
    return compare_schemes(s).ratio_full


METRICS = {
    "min_alpha_cantilever_rin_only": lambda s: min_alpha_cantilever(s, "rin_only"),
    "min_alpha_cantilever_full": lambda s: min_alpha_cantilever(s, "full"),
    "min_alpha_electronic_rin_only": lambda s: min_alpha_electronic(s, "rin_only"),
    "min_alpha_electronic_full": lambda s: min_alpha_electronic(s, "full"),
    "snr_cantilever": snr_cantilever,
    "snr_electronic": lambda s: snr_electronic(s),
    "xi_crossover": _metric_xi_crossover,
    "xi_crossover_quadrature": _metric_xi_crossover_quadrature,
    "thermal_limit_lhs": _metric_thermal_lhs,
    "thermal_limit_rhs": _metric_thermal_rhs,
    "thermal_limit_margin": _metric_thermal_margin,
    "scheme_ratio_rin_only": _metric_ratio_rin_only,
    "scheme_ratio_full": _metric_ratio_full,
}


@dataclass(frozen=True)
class SweepAxis:
    """Grid over one canonical config key."""

    key: str
    start: float
    stop: float
    count: int
    log: bool = False

    def values(self) -> np.ndarray:
        if self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")
        if self.log:
            if self.start <= 0.0 or self.stop <= 0.0:
                raise ValueError("log axis needs strictly positive endpoints")
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepTable:
    axis_key: str
    axis_values: tuple[float, ...]
    metric: str
    metric_values: tuple[float, ...]
    scenario_fingerprint: str


def sweep(s: Scenario, axis: SweepAxis, metric: str) -> SweepTable:
    """Evaluate one metric over a one-axis grid.

    Every grid point is validated before evaluation, so a sweep cannot
    silently wander into an unphysical corner; non-finite metric values
    raise NumericError.  The fingerprint hashes the scenario with the
    swept key removed, naming the sweep family rather than any single
    point.
    """
    try:
        fn = METRICS[metric]
    except KeyError:
        known = ", ".join(sorted(METRICS))
        raise KeyError(f"unknown metric {metric!r}; available: {known}") from None
    values = axis.values()
    out = []
    for v in values:
        point = set_by_key(s, axis.key, float(v))
        try:
            result = float(fn(point))
        except (ZeroDivisionError, OverflowError) as exc:
            raise NumericError(
                f"metric {metric} failed at {axis.key} = {v!r}: {exc}"
            ) from exc
        if not math.isfinite(result):
            raise NumericError(
                f"metric {metric} is not finite at {axis.key} = {v!r}"
            )
        out.append(result)
    return SweepTable(
        axis_key=axis.key,
        axis_values=tuple(float(v) for v in values),
        metric=metric,
        metric_values=tuple(out),
        scenario_fingerprint=scenario_fingerprint(s, exclude=(axis.key,)),
    )


@dataclass(frozen=True)
class ResonanceOptimum:
    """Best feasible resonance for full-budget sensitivity, or a report
    that no grid point satisfied the thermal-dominance constraint."""

    feasible: bool
    omega_0: float | None
    min_alpha: float | None


def _thermally_dominated(s: Scenario) -> bool:
    if s.laser.rin is None:
        return True
    try:
        return thermal_limit_margin(s).satisfied
    except ValueError:
        # peak at or below the resonance: constraint cannot hold there
        return False


def optimize_resonance(
    s: Scenario, omega_bounds: tuple[float, float], grid: int = 64
) -> ResonanceOptimum:
    """Minimize full-budget minimum absorbance over the resonance,
    subject to staying thermally dominated against the structured RIN
    peak.

    Bracketing scan on a log grid followed by golden-section refinement
    of each local minimum; infeasible points are treated as infinite.
    """
    lo, hi = omega_bounds
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < lower < upper bounds, got {omega_bounds!r}")
    validate_scenario(s)

    def objective(w: float) -> float:
        point = replace(s, cantilever=replace(s.cantilever, omega_0=w))
        if not _thermally_dominated(point):
            return math.inf
        return min_alpha_cantilever(point, "full")

    grid_w = np.geomspace(lo, hi, grid)
    grid_f = np.array([objective(w) for w in grid_w])
    if not np.any(np.isfinite(grid_f)):
        return ResonanceOptimum(feasible=False, omega_0=None, min_alpha=None)

    # refine around every finite local minimum (run edges included)
    candidates = []
    for i in range(len(grid_w)):
        if not math.isfinite(grid_f[i]):
            continue
        left = grid_f[i - 1] if i > 0 else math.inf
        right = grid_f[i + 1] if i < len(grid_w) - 1 else math.inf
        if grid_f[i] <= left and grid_f[i] <= right:
            candidates.append(i)

    best_w, best_f = None, math.inf
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    for i in candidates:
        a = grid_w[max(i - 1, 0)]
        b = grid_w[min(i + 1, len(grid_w) - 1)]
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = objective(c), objective(d)
        while (b - a) > 1e-8 * b:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = objective(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = objective(d)
        w = c if fc <= fd else d
        f = min(fc, fd)
        if f < best_f:
            best_w, best_f = w, f
    if best_w is None or not math.isfinite(best_f):
        return ResonanceOptimum(feasible=False, omega_0=None, min_alpha=None)
    return ResonanceOptimum(feasible=True, omega_0=float(best_w), min_alpha=float(best_f))
