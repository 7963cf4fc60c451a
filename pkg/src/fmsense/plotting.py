"""Headless figure rendering for CLI reports.

matplotlib is imported lazily with the Agg backend so library users who
never plot do not pay for it (and the package works without a display).
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import DominanceReport, SchemeComparison, SweepTable
from .cantilever import NoiseBudget, ResonanceRequirement, ThermalLimitReport
from .model import Scenario, angular

_DPI = 160


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_budget_figure(
    budget: NoiseBudget, dominance: DominanceReport, path: str
) -> str:
    plt = _pyplot()
    labels = ["signal", "thermal", "shot", "rin"]
    values = [budget.x_sig_m, budget.x_T_m, budget.x_SN_m, budget.x_N_m]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    colors = ["#2a6f97", "#c44536", "#c44536", "#c44536"]
    ax.bar(labels, values, color=colors)
    ax.set_yscale("log")
    ax.set_ylabel("vibration amplitude (m)")
    ax.set_title(f"noise budget (dominant: {dominance.dominant})")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_min_alpha_figure(values: dict[str, float], path: str) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    names = list(values)
    ax.bar(names, [values[n] for n in names], color="#2a6f97")
    ax.set_yscale("log")
    ax.set_ylabel("minimum detectable absorbance")
    ax.tick_params(axis="x", labelrotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_compare_figure(cmp: SchemeComparison, path: str) -> str:
    return save_min_alpha_figure(
        {
            "cantilever rin_only": cmp.cantilever_rin_only,
            "cantilever full": cmp.cantilever_full,
            "electronic rin_only": cmp.electronic_rin_only,
            "electronic full": cmp.electronic_full,
        },
        path,
    )


def save_thermal_limit_figure(
    s: Scenario,
    report: ThermalLimitReport,
    requirement: ResonanceRequirement,
    path: str,
) -> str:
    plt = _pyplot()
    r = s.laser.rin
    mu = np.geomspace(0.05, max(20.0, 3.0 * report.mu), 400)
    lhs = np.sqrt(mu / (1.0 + mu**2)) * r.xi_peak_rtHz
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(mu, lhs, label="laser-noise side", color="#c44536")
    ax.axhline(report.rhs, color="#2a6f97", label="thermal side")
    ax.axvline(report.mu, color="#555555", linestyle=":", label="operating point")
    if requirement.constrained and requirement.mu_star is not None:
        ax.axvline(
            requirement.mu_star, color="#2a6f97", linestyle="--", label="minimum mu"
        )
    ax.set_xscale("log")
    ax.set_xlabel("normalized detuning from the noise peak")
    ax.set_ylabel("spectral amplitude (Hz$^{-1/2}$)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_sweep_figure(table: SweepTable, log_axis: bool, path: str) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(table.axis_values, table.metric_values, color="#2a6f97")
    if log_axis:
        ax.set_xscale("log")
    finite = [v for v in table.metric_values if v > 0.0 and math.isfinite(v)]
    if len(finite) == len(table.metric_values) and finite:
        span = max(finite) / min(finite)
        if span > 50.0:
            ax.set_yscale("log")
    ax.set_xlabel(table.axis_key)
    ax.set_ylabel(table.metric)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_simulation_figure(
    measured: dict[str, float],
    measured_err: dict[str, float],
    predicted: dict[str, float],
    path: str,
) -> str:
    """Grouped bars: Monte Carlo estimate (with error bars) next to the
    analytic expectation for the signal and each noise channel."""
    plt = _pyplot()
    names = list(measured)
    x = np.arange(len(names), dtype=float)
    width = 0.38
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.bar(
        x - width / 2,
        [measured[n] for n in names],
        width,
        yerr=[measured_err.get(n, 0.0) for n in names],
        capsize=3,
        label="measured",
        color="#2a6f97",
    )
    ax.bar(
        x + width / 2,
        [predicted.get(n, 0.0) for n in names],
        width,
        label="predicted",
        color="#c44536",
    )
    ax.set_xticks(x, names)
    ax.set_yscale("log")
    ax.set_ylabel("demodulated amplitude (m)")
    ax.tick_params(axis="x", labelrotation=15)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_oscillator_figure(s: Scenario, traj_samples, dt: float, path: str) -> str:
    """Quick-look trajectory segment with the resonance period marked."""
    plt = _pyplot()
    n = len(traj_samples)
    t = np.arange(n) * dt
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    ax.plot(t, traj_samples, color="#2a6f97", linewidth=0.7)
    period = 2.0 * math.pi / angular(s.cantilever.omega_0)
    ax.set_xlabel(f"time (s); resonance period {period:.3e} s")
    ax.set_ylabel("displacement (m)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
