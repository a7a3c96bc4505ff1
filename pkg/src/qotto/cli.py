"""Command-line front end: dynamics traces, witness scans, cycles, sweeps.

Commands
--------
* ``dynamics`` -- power-ratio trace sin^2 F(t) for both analytic profiles.
* ``witness``  -- coupling, phase, rate and CP-divisibility witness scan.
* ``cycle``    -- one strongly coupled cycle: per-stroke CSV plus a summary.
* ``sweep``    -- grid over one cycle parameter, one CSV row per point.

Output is CSV with '#'-prefixed metadata lines, decimal serialization at 17
significant digits. Exit codes: 0 success, 1 usage/config error, 2
runtime/I-O error, 3 audit failure. ``QOTTO_OUT_DIR`` supplies the default
directory for relative output paths.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .cycle import (CycleConfig, CycleReport, apply_axis, max_energy_deviation,
                    strong_cycle, strong_cycle_via_oracle, STROKE_ORDER)
from .errors import ConfigError, IntegrationFailureError, QottoError, SingularGeneratorError
from .profiles import (MarkovianProfile, NonMarkovianProfile, load_tabulated,
                       rate_gamma, thermalization_weight)
from .dynamics import cp_divisibility_witness, vectorized_reps
from .tolerances import TOL

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_AUDIT = 3

SWEEP_AXES = ("tau_h", "tau_c", "g_h", "g_c", "omega_h", "omega_c", "beta_h", "beta_c")

_NUMERIC_KEYS = ("omega_c", "omega_h", "beta_c", "beta_h",
                 "tau_u1", "tau_h", "tau_u2", "tau_c")
_PROFILE_KEYS = ("profile_h", "profile_c")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _resolve_out(path: str | None):
    if path is None:
        return None
    if not os.path.isabs(path):
        base = os.environ.get("QOTTO_OUT_DIR")
        if base:
            path = os.path.join(base, path)
    return path


def _write_csv(path: str | None, header: list[str], rows: list[list],
               metadata: dict) -> None:
    def emit(stream):
        stream.write(f"# qotto {__version__}\n")
        for key, value in metadata.items():
            stream.write(f"# {key} = {_fmt(value)}\n")
        stream.write(",".join(header) + "\n")
        for row in rows:
            stream.write(",".join(_fmt(cell) for cell in row) + "\n")

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8") as stream:
            emit(stream)


def read_csv(path):
    """Re-parse an emitted CSV: (metadata, header, rows with floats restored)."""
    metadata, header, rows = {}, None, []
    with open(path, encoding="utf-8") as stream:
        for line in stream:
            line = line.rstrip("\n")
            if line.startswith("#"):
                if "=" in line:
                    key, _, value = line[1:].partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                continue
            parsed = []
            for cell in cells:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
            rows.append(parsed)
    return metadata, header, rows


# --- configuration ----------------------------------------------------------

_DEFAULT_CONFIG = {
    "omega_c": 1.0, "omega_h": 2.0, "beta_c": 1.0, "beta_h": 0.2,
    "tau_u1": 0.0, "tau_h": 2.0, "tau_u2": 0.0, "tau_c": 2.0,
    "profile_h": "markovian", "profile_c": "markovian",
}


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError([f"--set expects key=value, got '{pair}'"])
        key = key.strip()
        if key in _NUMERIC_KEYS:
            try:
                out[key] = float(value)
            except ValueError:
                raise ConfigError([f"{key} must be numeric, got '{value}'"])
        elif key in _PROFILE_KEYS:
            out[key] = value.strip()
        else:
            raise ConfigError([f"unknown config key '{key}'"])
    return out


def _build_profile(spec: str, g: float):
    if spec == "markovian":
        return MarkovianProfile(g=g)
    if spec == "nonmarkovian":
        return NonMarkovianProfile(g=g)
    if spec.startswith("tabulated:"):
        return load_tabulated(spec.split(":", 1)[1], g=g)
    raise ConfigError([f"unknown profile '{spec}' (markovian|nonmarkovian|tabulated:PATH)"])


def load_cycle_config(path: str | None, overrides: dict) -> tuple[CycleConfig, dict]:
    raw = dict(_DEFAULT_CONFIG)
    if path is not None:
        with open(path, encoding="utf-8") as stream:
            data = json.load(stream)
        unknown = set(data) - set(_DEFAULT_CONFIG)
        if unknown:
            raise ConfigError([f"unknown config key '{k}'" for k in sorted(unknown)])
        raw.update(data)
    raw.update(overrides)

    g_h = math.tanh(raw["beta_h"] * raw["omega_h"])
    g_c = math.tanh(raw["beta_c"] * raw["omega_c"])
    if g_h <= 0.0:
        raise ConfigError(["beta_h must be > 0 so that the hot profile has g > 0"])
    config = CycleConfig(
        omega_c=raw["omega_c"], omega_h=raw["omega_h"],
        beta_c=raw["beta_c"], beta_h=raw["beta_h"],
        tau_h=raw["tau_h"], tau_c=raw["tau_c"],
        tau_u1=raw["tau_u1"], tau_u2=raw["tau_u2"],
        profile_h=_build_profile(raw["profile_h"], g_h),
        profile_c=_build_profile(raw["profile_c"], g_c))
    return config, raw


def _config_metadata(raw: dict) -> dict:
    return {f"config.{key}": raw[key] for key in sorted(raw)}


# --- commands ----------------------------------------------------------------

def run_power_trace(args) -> int:
    """Thermalization-weight trace sin^2 F(t) for both analytic profiles."""
    if args.t_max <= 0.0:
        raise ConfigError([f"--t-max must be positive, got {args.t_max}"])
    if args.points < 2:
        raise ConfigError([f"--points must be >= 2, got {args.points}"])
    markovian = MarkovianProfile(g=args.g)
    nonmarkovian = NonMarkovianProfile(g=args.g)
    rows = []
    for t in np.linspace(0.0, args.t_max, args.points):
        rows.append([float(t),
                     thermalization_weight(markovian, float(t)),
                     thermalization_weight(nonmarkovian, float(t))])
    meta = {"command": "dynamics", "g": args.g, "t_max": args.t_max,
            "points": args.points, "seed": args.seed}
    _write_csv(_resolve_out(args.out), ["t", "p_ratio_markovian", "p_ratio_nonmarkovian"],
               rows, meta)
    return EXIT_OK


def run_witness_scan(args) -> int:
    """Rate and CP-divisibility witness scan over (0, t_max] for both profiles."""
    if args.t_max <= 0.0:
        raise ConfigError([f"--t-max must be positive, got {args.t_max}"])
    if args.points < 2:
        raise ConfigError([f"--points must be >= 2, got {args.points}"])
    omega = 1.0  # the projected witness spectrum does not depend on omega
    profiles = {"markovian": MarkovianProfile(g=args.g),
                "nonmarkovian": NonMarkovianProfile(g=args.g)}
    header = ["t"]
    for name in profiles:
        header += [f"f_{name}", f"F_{name}", f"gamma_{name}",
                   f"markovian_flag_{name}", f"witness_min_eig_{name}"]
    rows = []
    ts = args.t_max * np.arange(1, args.points + 1) / args.points
    for t_raw in ts:
        t = float(t_raw)
        row = [t]
        for profile in profiles.values():
            try:
                gamma = rate_gamma(profile, t)
                _, evals = cp_divisibility_witness(vectorized_reps(profile, omega, t))
                wmin = float(evals.min())
            except SingularGeneratorError:
                gamma = math.nan
                wmin = math.nan
            row += [profile.f(t), profile.phase(t), gamma,
                    int(gamma >= TOL.rate_floor) if not math.isnan(gamma) else -1,
                    wmin]
        rows.append(row)
    meta = {"command": "witness", "g": args.g, "t_max": args.t_max,
            "points": args.points, "omega": omega, "seed": args.seed}
    _write_csv(_resolve_out(args.out), header, rows, meta)
    return EXIT_OK


def _stroke_rows(report: CycleReport, oracle: CycleReport | None) -> tuple[list, list]:
    header = ["stroke", "work", "heat", "energy_initial", "energy_final",
              "entropy_production"]
    if oracle is not None:
        header += ["work_oracle", "heat_oracle"]
    rows = []
    for name in STROKE_ORDER:
        lg = report.strokes[name]
        row = [name, lg.work, lg.heat, lg.internal_energy_initial,
               lg.internal_energy_final, lg.entropy_production]
        if oracle is not None:
            row += [oracle.strokes[name].work, oracle.strokes[name].heat]
        rows.append(row)
    first = report.strokes[STROKE_ORDER[0]]
    last = report.strokes[STROKE_ORDER[-1]]
    total = ["total", report.work_total, report.heat_hot + report.heat_cold,
             first.internal_energy_initial, last.internal_energy_final,
             sum(report.strokes[n].entropy_production for n in STROKE_ORDER)]
    if oracle is not None:
        total += [oracle.work_total, oracle.heat_hot + oracle.heat_cold]
    rows.append(total)
    return header, rows


def _summary(report: CycleReport, oracle_dev: float | None) -> str:
    audits = report.law_audits()
    lines = [
        f"regime: {report.regime} (frequency-ratio rule says: {report.ratio_rule_regime})",
        f"W = {report.work_total:.10g}   Q_h = {report.heat_hot:.10g}   "
        f"Q_c = {report.heat_cold:.10g}   tau = {report.tau:.10g}",
        f"thermal weights: hot {report.thermal_weight_hot:.10g}, "
        f"cold {report.thermal_weight_cold:.10g}",
    ]
    if report.regime == "refrigerator":
        lines.append(f"K = {report.cop:.10g} (K0 = {report.cop0:.10g}, "
                     f"Carnot bound {report.carnot_cop:.10g})")
        lines.append(f"kappa = {report.kappa:.10g} (kappa0 = {report.kappa0:.10g})")
    else:
        lines.append(f"eta = {report.eta:.10g} (eta0 = {report.eta0:.10g}, "
                     f"Carnot bound {report.carnot_eta:.10g})")
        lines.append(f"P = {report.power:.10g} (P0 = {report.power0:.10g})")
    lines.append(f"cyclicity residual: {report.cyclicity_residual:.3e}   "
                 f"stored-energy mismatch: {report.energy_residual:.10g}")
    for name, (value, ok) in audits.items():
        lines.append(f"audit {name}: {'pass' if ok else 'FAIL'} ({value:.3e})")
    if oracle_dev is not None:
        ok = oracle_dev <= TOL.oracle_match * 10
        lines.append(f"audit oracle_match: {'pass' if ok else 'FAIL'} ({oracle_dev:.3e})")
    return "\n".join(lines)


def run_cycle(args) -> int:
    """One strongly coupled cycle: per-stroke CSV plus human-readable summary."""
    config, raw = load_cycle_config(args.config, _parse_overrides(args.set))
    report = strong_cycle(config)
    oracle = strong_cycle_via_oracle(config, steps=args.steps) if args.oracle else None
    oracle_dev = max_energy_deviation(report, oracle) if oracle is not None else None

    header, rows = _stroke_rows(report, oracle)
    meta = {"command": "cycle", "seed": args.seed, **_config_metadata(raw)}
    for profile, name in ((config.profile_h, "profile_h"), (config.profile_c, "profile_c")):
        if getattr(profile, "head_phase_approximated", False):
            meta[f"{name}.head_phase_approximated"] = True
    if oracle_dev is not None:
        meta["oracle_max_energy_deviation"] = oracle_dev
    out = _resolve_out(args.out)
    _write_csv(out, header, rows, meta)

    summary = _summary(report, oracle_dev)
    print(summary, file=sys.stderr if out is None else sys.stdout)

    failed = [name for name, (_, ok) in report.law_audits().items() if not ok]
    if oracle_dev is not None and oracle_dev > TOL.oracle_match * 10:
        failed.append("oracle_match")
    if failed:
        print(f"audit failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


_SWEEP_METRICS = ["work", "heat_hot", "heat_cold", "eta", "power", "kappa", "cop",
                  "eta0", "power0", "kappa0", "cop0", "carnot_eta", "carnot_cop",
                  "thermal_weight_hot", "thermal_weight_cold",
                  "w_connect_hot", "w_disconnect_hot", "w_connect_cold",
                  "w_disconnect_cold", "cyclicity_residual", "energy_residual"]


def _metric_row(report: CycleReport) -> list:
    bw = report.boundary_works()
    return [report.work_total, report.heat_hot, report.heat_cold, report.eta,
            report.power, report.kappa, report.cop, report.eta0, report.power0,
            report.kappa0, report.cop0, report.carnot_eta, report.carnot_cop,
            report.thermal_weight_hot, report.thermal_weight_cold,
            bw["connect_hot"], bw["disconnect_hot"], bw["connect_cold"],
            bw["disconnect_cold"], report.cyclicity_residual, report.energy_residual]


def run_sweep(args) -> int:
    """Grid over one cycle parameter; deterministic row order by grid index."""
    if args.sweep is None:
        raise ConfigError(["sweep requires --sweep AXIS:LO:HI:N"])
    parts = args.sweep.split(":")
    if len(parts) != 4:
        raise ConfigError([f"--sweep expects AXIS:LO:HI:N, got '{args.sweep}'"])
    axis, lo, hi, count = parts[0], parts[1], parts[2], parts[3]
    if axis not in SWEEP_AXES:
        raise ConfigError([f"sweep axis must be one of {', '.join(SWEEP_AXES)}, got '{axis}'"])
    try:
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigError([f"--sweep bounds must be numeric, got '{args.sweep}'"])
    if count < 1 or (count > 1 and hi <= lo):
        raise ConfigError([f"degenerate sweep range '{args.sweep}'"])

    base, raw = load_cycle_config(args.config, _parse_overrides(args.set))
    values = np.linspace(lo, hi, count)
    header = ["index", axis, "valid", "regime"] + _SWEEP_METRICS + ["error"]
    rows = []
    for index, value in enumerate(values):
        try:
            config = apply_axis(base, axis, float(value))
            report = strong_cycle(config)
            rows.append([index, float(value), 1, report.regime]
                        + _metric_row(report) + [""])
        except (ConfigError, ValueError, QottoError) as exc:
            rows.append([index, float(value), 0, "skipped"]
                        + [math.nan] * len(_SWEEP_METRICS) + [str(exc)])
    meta = {"command": "sweep", "axis": axis, "lo": lo, "hi": hi, "count": count,
            "seed": args.seed, **_config_metadata(raw)}
    _write_csv(_resolve_out(args.out), header, rows, meta)
    return EXIT_OK


# --- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qotto",
                     description="Two-qubit Otto cycle simulator with finite single-qubit baths")
    parser.add_argument("--version", action="version", version=f"qotto {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, default=0,
                       help="echoed into metadata for reproducible pipelines")

    p_dyn = sub.add_parser("dynamics", help="power-ratio trace for both profiles")
    p_dyn.add_argument("--g", type=float, default=0.8)
    p_dyn.add_argument("--t-max", type=float, default=5.0, dest="t_max")
    p_dyn.add_argument("--points", type=int, default=500)
    common(p_dyn)

    p_wit = sub.add_parser("witness", help="rate and CP-divisibility witness scan")
    p_wit.add_argument("--g", type=float, default=0.8)
    p_wit.add_argument("--t-max", type=float, default=2.0, dest="t_max")
    p_wit.add_argument("--points", type=int, default=2000)
    common(p_wit)

    p_cyc = sub.add_parser("cycle", help="run one strongly coupled Otto cycle")
    p_cyc.add_argument("--config", default=None, help="JSON config file (flat keys)")
    p_cyc.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config entry (repeatable)")
    p_cyc.add_argument("--oracle", action="store_true",
                       help="also integrate every contact stroke numerically")
    p_cyc.add_argument("--steps", type=int, default=None,
                       help="cap the oracle step size at stroke_duration/steps")
    common(p_cyc)

    p_swp = sub.add_parser("sweep", help="sweep one cycle parameter")
    p_swp.add_argument("--config", default=None)
    p_swp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_swp.add_argument("--sweep", default=None, metavar="AXIS:LO:HI:N")
    common(p_swp)

    return parser


_COMMANDS = {"dynamics": run_power_trace, "witness": run_witness_scan,
             "cycle": run_cycle, "sweep": run_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, IntegrationFailureError, QottoError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
