"""Command-line surface.

Reports are deterministic: no timestamps, insertion-ordered keys, floats
serialized with repr (shortest round-trip form).  Figures requested with
--plot are written next to the report and announced on stderr so stdout
payloads stay byte-stable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .analysis import compare_schemes, dominance_analysis, sweep, METRICS, SweepAxis
from .cantilever import (
    min_alpha_cantilever,
    min_resonant_frequency,
    noise_budget,
    thermal_force_sensitivity,
    thermal_limit_margin,
)
from .config import load_scenario, scenario_fingerprint, scenario_to_mapping
from .electronic import min_alpha_electronic
from .model import NumericError, Scenario, ValidationError, angular
from .presets import load_preset, preset_names, PRESET_NAMES
from .simulate import SimConfig, predicted_experiment, run_experiment

_MODES = ("rin_only", "full")


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", metavar="NAME", help=f"built-in scenario: {', '.join(PRESET_NAMES)}")
    p.add_argument("--config", metavar="PATH", help="flat key=value scenario file")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one scenario key (repeatable, applied last)",
    )


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument(
        "--plot",
        nargs="?",
        const="auto",
        default=None,
        metavar="PATH",
        help="also render a figure (PNG); without a path, named after the report",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmsense",
        description="sensitivity analysis and simulation of FM spectroscopy "
        "with mechanical or electronic detection",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", help="vibration noise budget and channel dominance")
    _add_scenario_args(p)
    _add_output_args(p)

    p = sub.add_parser("min-alpha", help="minimum detectable absorbance, both schemes")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument("--mode", choices=_MODES, help="restrict to one noise model")

    p = sub.add_parser("compare", help="mechanical vs electronic sensitivity ratio")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument(
        "--preset-electronic",
        metavar="NAME",
        help="evaluate the electronic scheme on this preset instead",
    )

    p = sub.add_parser(
        "thermal-limit", help="thermal-dominance condition and minimum resonance"
    )
    _add_scenario_args(p)
    _add_output_args(p)

    p = sub.add_parser("sweep", help="one metric over a one-parameter grid")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument("--axis", required=True, metavar="KEY", help="config key to sweep")
    p.add_argument("--min", type=float, required=True, help="axis start")
    p.add_argument("--max", type=float, required=True, help="axis stop")
    p.add_argument("--count", type=int, default=33, help="number of grid points")
    p.add_argument("--log", action="store_true", help="log-spaced axis")
    p.add_argument(
        "--metric",
        required=True,
        choices=sorted(METRICS),
        help="quantity to evaluate at each point",
    )

    p = sub.add_parser("simulate", help="Monte Carlo of the mechanical readout")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument("--seed", type=int, default=12345, help="base RNG seed (uint64)")
    p.add_argument("--trials", type=int, default=2, help="independent repetitions")
    p.add_argument("--dt", type=float, help="step (s); default 1/50 of a period")
    p.add_argument("--duration", type=float, help="record length (s)")
    p.add_argument("--burn-in", dest="burn_in", type=float, help="discard (s)")
    p.add_argument(
        "--time-constant",
        dest="time_constant",
        type=float,
        help="lock-in time constant (s); default 20 periods",
    )

    p = sub.add_parser("presets", help="list built-in scenarios")
    _add_output_args(p)

    return parser


def _scenario_json(s: Scenario) -> dict:
    return {
        k: (list(v) if isinstance(v, tuple) else v)
        for k, v in scenario_to_mapping(s).items()
    }


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render(command, results, scenario, provenance, fmt) -> str:
    if fmt == "json":
        obj: dict = {"command": command}
        if scenario is not None:
            obj["scenario"] = _scenario_json(scenario)
        obj["results"] = {
            name: {"value": value, "units": units}
            for name, (value, units) in results.items()
        }
        if provenance is not None:
            obj["provenance"] = provenance
        obj["version"] = __version__
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value", "units"])
    for name, (value, units) in results.items():
        w.writerow([name, _csv_cell(value), units])
    return buf.getvalue()


def _render_sweep(table, scenario, provenance, fmt) -> str:
    if fmt == "json":
        obj = {
            "command": "sweep",
            "scenario": _scenario_json(scenario),
            "results": {
                "axis_key": table.axis_key,
                "axis_values": list(table.axis_values),
                "metric": table.metric,
                "metric_values": list(table.metric_values),
                "scenario_fingerprint": table.scenario_fingerprint,
            },
            "provenance": provenance,
            "version": __version__,
        }
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([table.axis_key, table.metric])
    for x, y in zip(table.axis_values, table.metric_values):
        w.writerow([repr(x), repr(y)])
    return buf.getvalue()


def _write_report(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _plot_path(args) -> str | None:
    if args.plot is None:
        return None
    if args.plot != "auto":
        return args.plot
    if args.output:
        return os.path.splitext(args.output)[0] + ".png"
    return f"{args.command}.png"


def _announce_figure(path: str) -> None:
    print(f"figure written to {path}", file=sys.stderr)


def _provenance(args) -> dict:
    return {
        "preset": getattr(args, "preset", None),
        "config_path": getattr(args, "config", None),
        "overrides": list(getattr(args, "overrides", [])),
        "seed": getattr(args, "seed", None),
    }


def _load(args):
    s, _ = load_scenario(args.preset, args.config, args.overrides)
    return s


def _cmd_budget(args) -> int:
    s = _load(args)
    b = noise_budget(s)
    d = dominance_analysis(s)
    results = {
        "x_sig_m": (b.x_sig_m, "m"),
        "x_T_m": (b.x_T_m, "m"),
        "x_SN_m": (b.x_SN_m, "m"),
        "x_N_m": (b.x_N_m, "m"),
        "noise_quadrature_m": (b.noise_quadrature_m(), "m"),
        "snr": (b.snr(), "dimensionless"),
        "dominant_channel": (d.dominant, "text"),
        "xi_crossover_rtHz": (d.xi_crossover_rtHz, "Hz^-1/2"),
        "xi_crossover_quadrature_rtHz": (d.xi_crossover_quadrature_rtHz, "Hz^-1/2"),
        "thermal_force_N_rtHz": (thermal_force_sensitivity(s.cantilever), "N Hz^-1/2"),
        "note": (d.note, "text"),
    }
    _write_report(_render("budget", results, s, _provenance(args), args.format), args.output)
    path = _plot_path(args)
    if path:
        from .plotting import save_budget_figure

        _announce_figure(save_budget_figure(b, d, path))
    return 0


def _cmd_min_alpha(args) -> int:
    s = _load(args)
    modes = (args.mode,) if args.mode else _MODES
    results = {}
    for mode in modes:
        results[f"min_alpha_cantilever_{mode}"] = (
            min_alpha_cantilever(s, mode),
            "dimensionless",
        )
    for mode in modes:
        results[f"min_alpha_electronic_{mode}"] = (
            min_alpha_electronic(s, mode),
            "dimensionless",
        )
    _write_report(
        _render("min-alpha", results, s, _provenance(args), args.format), args.output
    )
    path = _plot_path(args)
    if path:
        from .plotting import save_min_alpha_figure

        _announce_figure(
            save_min_alpha_figure({k: v for k, (v, _) in results.items()}, path)
        )
    return 0


def _cmd_compare(args) -> int:
    s = _load(args)
    electronic = load_preset(args.preset_electronic) if args.preset_electronic else None
    cmp = compare_schemes(s, electronic)
    results = {
        "min_alpha_cantilever_rin_only": (cmp.cantilever_rin_only, "dimensionless"),
        "min_alpha_cantilever_full": (cmp.cantilever_full, "dimensionless"),
        "min_alpha_electronic_rin_only": (cmp.electronic_rin_only, "dimensionless"),
        "min_alpha_electronic_full": (cmp.electronic_full, "dimensionless"),
        "scheme_ratio_rin_only": (cmp.ratio_rin_only, "dimensionless"),
        "scheme_ratio_full": (cmp.ratio_full, "dimensionless"),
    }
    _write_report(
        _render("compare", results, s, _provenance(args), args.format), args.output
    )
    path = _plot_path(args)
    if path:
        from .plotting import save_compare_figure

        _announce_figure(save_compare_figure(cmp, path))
    return 0


def _cmd_thermal_limit(args) -> int:
    s = _load(args)
    rep = thermal_limit_margin(s)
    req = min_resonant_frequency(s)
    results = {
        "mu": (rep.mu, "dimensionless"),
        "lhs_rtHz": (rep.lhs, "Hz^-1/2"),
        "rhs_rtHz": (rep.rhs, "Hz^-1/2"),
        "satisfied": (rep.satisfied, "bool"),
        "constrained": (req.constrained, "bool"),
    }
    if req.mu_star is not None:
        results["mu_star"] = (req.mu_star, "dimensionless")
    if req.omega_0_min is not None:
        results["omega_0_min_paperHz"] = (req.omega_0_min, "paperHz")
    _write_report(
        _render("thermal-limit", results, s, _provenance(args), args.format),
        args.output,
    )
    path = _plot_path(args)
    if path:
        from .plotting import save_thermal_limit_figure

        _announce_figure(save_thermal_limit_figure(s, rep, req, path))
    return 0


def _cmd_sweep(args) -> int:
    s = _load(args)
    axis = SweepAxis(
        key=args.axis, start=args.min, stop=args.max, count=args.count, log=args.log
    )
    table = sweep(s, axis, args.metric)
    _write_report(_render_sweep(table, s, _provenance(args), args.format), args.output)
    path = _plot_path(args)
    if path:
        from .plotting import save_sweep_figure

        _announce_figure(save_sweep_figure(table, args.log, path))
    return 0


def _cmd_simulate(args) -> int:
    s = _load(args)
    period = 2.0 * math.pi / angular(s.cantilever.omega_0)
    ring = 2.0 * s.cantilever.quality / angular(s.cantilever.omega_0)
    tau = args.time_constant if args.time_constant is not None else 20.0 * period
    dt = args.dt if args.dt is not None else period / 50.0
    burn_in = args.burn_in if args.burn_in is not None else 3.0 * ring
    duration = args.duration if args.duration is not None else burn_in + 12.0 * tau
    cfg = SimConfig(dt_s=dt, duration_s=duration, seed=args.seed, burn_in_s=burn_in)
    res = run_experiment(s, cfg, args.trials, time_constant_s=tau)
    pred = predicted_experiment(s, res.time_constant_s, cfg.enabled_channels())

    results = {
        "signal_amplitude_m": (res.signal_amplitude_m, "m"),
        "signal_uncertainty_m": (res.signal_uncertainty_m, "m"),
    }
    for ch in cfg.enabled_channels():
        results[f"noise_rms_{ch}_m"] = (res.noise_rms_m[ch], "m")
        results[f"noise_uncertainty_{ch}_m"] = (res.noise_uncertainty_m[ch], "m")
    results["snr"] = (res.snr, "dimensionless")
    results["snr_uncertainty"] = (res.snr_uncertainty, "dimensionless")
    results["predicted_signal_amplitude_m"] = (pred.signal_amplitude_m, "m")
    for ch in cfg.enabled_channels():
        results[f"predicted_noise_rms_{ch}_m"] = (pred.noise_rms_m[ch], "m")
    results["predicted_snr"] = (pred.snr, "dimensionless")
    results["time_constant_s"] = (res.time_constant_s, "s")
    results["dt_s"] = (cfg.dt_s, "s")
    results["duration_s"] = (cfg.duration_s, "s")
    results["burn_in_s"] = (cfg.burn_in_s, "s")
    results["n_trials"] = (res.n_trials, "count")
    results["scenario_fingerprint"] = (scenario_fingerprint(s), "text")

    _write_report(
        _render("simulate", results, s, _provenance(args), args.format), args.output
    )
    path = _plot_path(args)
    if path:
        from .plotting import save_simulation_figure

        measured = {"signal": res.signal_amplitude_m}
        errs = {"signal": res.signal_uncertainty_m}
        predicted = {"signal": pred.signal_amplitude_m}
        for ch in cfg.enabled_channels():
            measured[ch] = res.noise_rms_m[ch]
            errs[ch] = res.noise_uncertainty_m[ch]
            predicted[ch] = pred.noise_rms_m[ch]
        _announce_figure(save_simulation_figure(measured, errs, predicted, path))
    return 0


def _cmd_presets(args) -> int:
    results = {}
    for name in preset_names():
        s = load_preset(name)
        c = s.cantilever
        summary = (
            f"k={c.spring_N_per_m} N/m, Q={c.quality}, T={c.temperature_K} K, "
            f"P0={s.laser.power_W} W, omega_0={c.omega_0} paperHz"
            + (", structured RIN" if s.laser.rin is not None else "")
        )
        results[name] = (summary, "text")
    _write_report(_render("presets", results, None, None, args.format), args.output)
    return 0


_DISPATCH = {
    "budget": _cmd_budget,
    "min-alpha": _cmd_min_alpha,
    "compare": _cmd_compare,
    "thermal-limit": _cmd_thermal_limit,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "presets": _cmd_presets,
}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except ValidationError as exc:
        print("error: invalid configuration", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v.field}: {v.message}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return 3
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run_cli())
