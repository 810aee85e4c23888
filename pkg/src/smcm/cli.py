"""Command-line interface.

Subcommands: ``run`` integrates one configuration and writes the time
series CSV; ``scan`` sweeps lattice sizes or shot counts and writes the
fluctuation-scaling CSV; ``report`` refits scan CSVs and prints the
exponents and the quantum/Monte-Carlo prefactor ratio. Flags may also be
given in a ``key = value`` config file; explicit flags win.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 insufficient shots.
"""

from __future__ import annotations

import argparse
import sys

from .core import DegenerateRatesError, StepSizeError
from .experiments import (
    ConfigError,
    ExperimentConfig,
    dump_scan,
    dump_timeseries,
    read_scan,
    run_simulation,
    scaling_scan,
    shot_gap,
    write_scan,
    write_timeseries,
)
from .lcu import SubnormalizationError
from .linalg import ConvergenceError, NotPsdError
from .qsim import InsufficientShotsError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SHOTS = 4

_RUN_KEYS = {
    "mode": str,
    "cape": float,
    "dryness": float,
    "dt": float,
    "t_end": float,
    "sites": int,
    "shots": int,
    "seed": int,
    "out": str,
    "spinup": float,
}
_SCAN_KEYS = {**_RUN_KEYS, "values": str, "repeats": int}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smcm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key = value file; explicit flags override it")
        p.add_argument("--mode", choices=("deterministic", "montecarlo", "quantum"))
        p.add_argument("--cape", type=float, help="CAPE driver (default 0.25)")
        p.add_argument("--dryness", type=float, help="dryness driver (default 0.75)")
        p.add_argument("--dt", type=float, help="step size in hours (default 0.1)")
        p.add_argument("--t-end", type=float, help="integration length in hours (default 100)")
        p.add_argument("--sites", type=int, help="lattice sites for montecarlo (default 400)")
        p.add_argument(
            "--shots", type=int, help="shots per step for quantum; 0 = exact decode (default 40000)"
        )
        p.add_argument("--seed", type=int, help="run seed (default 0)")
        p.add_argument("--spinup", type=float, help="hours to drop before statistics (default 20)")
        p.add_argument("--out", help="output CSV path (default: stdout)")

    run = sub.add_parser("run", help="integrate one configuration, write the time series")
    add_common(run)

    scan = sub.add_parser("scan", help="sweep sites/shots, write fluctuation RMS per value")
    add_common(scan)
    scan.add_argument("--values", help="comma-separated sweep values, e.g. 100,400,1600,6400")
    scan.add_argument("--repeats", type=int, help="seeds per sweep value (default 5)")

    report = sub.add_parser("report", help="refit scan CSVs and print exponents and ratio")
    report.add_argument("--mc", help="scan CSV from a montecarlo sweep")
    report.add_argument("--quantum", help="scan CSV from a quantum sweep")
    return parser


def _read_config_file(path: str, allowed: dict) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key = key.strip().replace("-", "_")
                if key not in allowed:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    values[key] = allowed[key](value.strip())
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _merge_options(args: argparse.Namespace, allowed: dict) -> dict:
    merged = {}
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config, allowed))
    for key in allowed:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _build_config(options: dict) -> ExperimentConfig:
    t_end = options.get("t_end", 100.0)
    # keep the 20 h default usable for short runs
    spinup = options.get("spinup", min(20.0, 0.2 * t_end))
    return ExperimentConfig(
        mode=options.get("mode", "deterministic"),
        cape=options.get("cape", 0.25),
        dryness=options.get("dryness", 0.75),
        dt=options.get("dt", 0.1),
        t_end=t_end,
        n_sites=options.get("sites", 400),
        n_shots=options.get("shots", 40000),
        seed=options.get("seed", 0),
        spinup=spinup,
    )


def _emit_timeseries(series, out: str | None) -> None:
    if out is None:
        dump_timeseries(series, sys.stdout)
    else:
        write_timeseries(series, out)


def _parse_values(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad sweep values {text!r}: {exc}") from exc


def _cmd_run(args) -> int:
    options = _merge_options(args, _RUN_KEYS)
    series = run_simulation(_build_config(options))
    _emit_timeseries(series, options.get("out"))
    return EXIT_OK


def _cmd_scan(args) -> int:
    options = _merge_options(args, _SCAN_KEYS)
    cfg = _build_config(options)
    values = _parse_values(options.get("values", "100,400,1600,6400"))
    result = scaling_scan(cfg, values, options.get("repeats", 5))
    out = options.get("out")
    if out is None:
        dump_scan(result, sys.stdout)
    else:
        write_scan(result, out)
        print(f"{cfg.mode}: exponent={result.exponent:.4f} prefactor={result.prefactor:.6g}")
    return EXIT_OK


def _cmd_report(args) -> int:
    if not args.mc and not args.quantum:
        raise ConfigError("report needs --mc and/or --quantum scan files")
    results = {}
    for label, path in (("montecarlo", args.mc), ("quantum", args.quantum)):
        if path:
            try:
                results[label] = read_scan(path)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read scan file {path}: {exc}") from exc
            result = results[label]
            print(f"{label}: exponent={result.exponent:.4f} prefactor={result.prefactor:.6g}")
    if len(results) == 2:
        ratio = shot_gap(results["montecarlo"], results["quantum"])
        print(f"prefactor ratio (quantum / montecarlo): {ratio:.4f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "scan": _cmd_scan, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        SubnormalizationError,
        NotPsdError,
        StepSizeError,
        DegenerateRatesError,
        ConvergenceError,
    ) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InsufficientShotsError as exc:
        print(f"insufficient shots: {exc}", file=sys.stderr)
        return EXIT_SHOTS


if __name__ == "__main__":
    sys.exit(main())
