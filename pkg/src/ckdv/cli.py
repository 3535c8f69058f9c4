"""Command-line front end.

Each subcommand runs one experiment kind from a JSON config and exits
0 on pass, 1 on an experiment failure or error, 2 on a usage or
configuration problem.  CKDV_THREADS caps the worker count used by
multi-kernel runs (default: machine parallelism).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import record_for
from .harness import (
    DIAGNOSTICS_SCHEMA,
    ConfigError,
    _strict,
    build_system,
    config_from_dict,
    load_config,
    run,
)
from .io import read_snapshot, write_csv

_SUBCOMMAND_KIND = {
    "simulate": "simulate",
    "picard": "picard_study",
    "lipschitz": "lipschitz_probe",
    "scaling": "scaling_probe",
    "bourgain": "bourgain_suite",
    "kernels": "kernel_suite",
    "noneq": "nonequivalence",
    "convergence": "convergence_study",
}

# kinds that run with built-in defaults when --config is omitted
_CONFIG_OPTIONAL = {"bourgain_suite", "kernel_suite", "nonequivalence"}


def _u64(text: str) -> int:
    v = int(text)
    if not (0 <= v < 2**64):
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckdv",
        description="Spectral simulation and estimate verification for coupled third-order wave systems.",
        epilog="Set CKDV_THREADS to cap worker parallelism.",
    )
    sub = parser.add_subparsers(dest="cmd")
    for name, kind in _SUBCOMMAND_KIND.items():
        p = sub.add_parser(name, help=f"run a '{kind}' experiment")
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=_u64, help="RNG seed (overrides the config)")
        p.add_argument("--quiet", action="store_true", help="suppress the summary printout")
    p = sub.add_parser("diagnose", help="conserved functionals of one stored snapshot")
    p.add_argument("--config", required=True, help="JSON with 'system' and 'snapshot' keys")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--seed", type=_u64, help="accepted for uniformity; unused")
    p.add_argument("--quiet", action="store_true")
    return parser


def _emit(msg: str, quiet: bool) -> None:
    if not quiet:
        print(msg)


def _cmd_experiment(args, kind: str) -> int:
    if args.config is not None:
        cfg = load_config(args.config)
    elif kind in _CONFIG_OPTIONAL:
        cfg = config_from_dict({"kind": kind})
    else:
        raise ConfigError(f"subcommand for kind '{kind}' requires --config")
    if cfg.kind != kind:
        raise ConfigError(f"config kind '{cfg.kind}' does not match subcommand kind '{kind}'")
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw = dict(cfg.raw, seed=args.seed)
    manifest = run(cfg, out_dir=args.out)
    out = Path(args.out if args.out is not None else (cfg.output_dir or "."))
    _emit(f"status: {manifest.status}", args.quiet)
    if manifest.error:
        _emit(f"error: {manifest.error}", args.quiet)
    for key, val in manifest.summary.items():
        _emit(f"{key}: {val}", args.quiet)
    _emit(f"manifest: {out / 'manifest.json'}", args.quiet)
    return 0 if manifest.status == "pass" else 1


def _cmd_diagnose(args) -> int:
    try:
        d = json.loads(Path(args.config).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {args.config}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {args.config} is not valid JSON: {e}") from None
    if not isinstance(d, dict):
        raise ConfigError("diagnose configuration must be a JSON object")
    _strict(d, {"system", "snapshot", "s", "output_dir"}, "diagnose config")
    for key in ("system", "snapshot"):
        if key not in d:
            raise ConfigError(f"diagnose config missing '{key}'")
    spec = build_system(d["system"])
    try:
        state = read_snapshot(d["snapshot"])
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot load snapshot: {e}") from None
    rec = record_for(state, spec, float(d.get("s", 1.0)))
    out = Path(args.out if args.out is not None else (d.get("output_dir") or "."))
    out.mkdir(parents=True, exist_ok=True)
    write_csv([rec.row()], DIAGNOSTICS_SCHEMA, out / "diagnostics.csv")
    if not args.quiet:
        print(",".join(DIAGNOSTICS_SCHEMA))
        print(",".join("%.17g" % v for v in rec.row()))
    return 0 if rec.valid else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.cmd == "diagnose":
            return _cmd_diagnose(args)
        return _cmd_experiment(args, _SUBCOMMAND_KIND[args.cmd])
    except ConfigError as e:
        print(f"ckdv: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
