"""Command-line interface.

Subcommands: exact | simulate | limit-check | oracle-check | list-models.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, Optional, Sequence

from .errors import MixPoissonError
from .harness import ExperimentConfig, run_exact, run_limit_check, run_mc, run_oracle_check
from .models import MODEL_TAGS, ModelSpec

_PARAM_FLAGS = [
    ("n", int),
    ("j", int),
    ("k", int),
    ("ell", int),
    ("m", int),
    ("alpha", Fraction),
    ("beta", Fraction),
    ("gamma", Fraction),
    ("delta", Fraction),
    ("w0", int),
    ("b0", int),
    ("a", Fraction),
    ("theta", Fraction),
    ("d", int),
    ("kappa", float),
]

_MODE_BY_COMMAND = {"exact": "exact", "simulate": "mc", "limit-check": "limit-check", "oracle-check": "oracle-check"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixpoisson", description="Exact moments, simulators, and mixed Poisson checks for combinatorial models")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, help_text in (
        ("exact", "exact factorial moments"),
        ("simulate", "Monte Carlo factorial-moment estimates with z-scores"),
        ("limit-check", "empirical PMF against the mixed Poisson limit"),
        ("oracle-check", "exact values against exhaustive enumeration"),
    ):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--model", required=False, choices=MODEL_TAGS)
        for name, _typ in _PARAM_FLAGS:
            p.add_argument(f"--{name}", default=None)
        p.add_argument("--family", default=None, choices=("rect", "gport", "dary"))
        p.add_argument("--smax", type=int, default=3)
        p.add_argument("--replicates", type=int, default=10000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", default="csv", choices=("csv", "json"))
        p.add_argument("--config", default=None, help="JSON config file (overrides flags)")
    sub.add_parser("list-models", help="list model tags")
    return parser


def _params_from_args(args: argparse.Namespace) -> Dict:
    params: Dict = {}
    for name, typ in _PARAM_FLAGS:
        raw = getattr(args, name, None)
        if raw is not None:
            params[name] = typ(raw)
    if getattr(args, "family", None):
        params["family"] = args.family
    return params


_CONFIG_KEYS = {"schema", "model", "params", "mode", "replicates", "seed", "smax", "out", "format"}


def _config_from_json(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    if raw.get("schema") != 1:
        raise ValueError("config schema must be 1")
    params = {}
    for key, val in raw.get("params", {}).items():
        if key in ("family",):
            params[key] = str(val)
        elif key in ("kappa",):
            params[key] = float(val)
        elif key in ("alpha", "beta", "gamma", "delta", "a", "theta"):
            params[key] = Fraction(str(val))
        else:
            params[key] = int(val)
    return ExperimentConfig(
        model=ModelSpec(raw["model"], params),
        mode=raw.get("mode", "exact"),
        replicates=int(raw.get("replicates", 10000)),
        seed=int(raw.get("seed", 0)),
        smax=int(raw.get("smax", 3)),
        out=raw.get("out"),
        fmt=raw.get("format", "csv"),
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "list-models":
        for tag in MODEL_TAGS:
            print(tag)
        return 0
    try:
        if args.config:
            config = _config_from_json(args.config)
            config = ExperimentConfig(
                model=config.model,
                mode=_MODE_BY_COMMAND[args.command],
                replicates=config.replicates,
                seed=config.seed,
                smax=config.smax,
                out=config.out if args.out is None else args.out,
                fmt=config.fmt if args.format == "csv" else args.format,
            )
        else:
            if not args.model:
                parser.error("--model is required without --config")
            config = ExperimentConfig(
                model=ModelSpec(args.model, _params_from_args(args)),
                mode=_MODE_BY_COMMAND[args.command],
                replicates=args.replicates,
                seed=args.seed,
                smax=args.smax,
                out=args.out,
                fmt=args.format,
            )
        if config.mode == "exact":
            report = run_exact(config)
        elif config.mode == "mc":
            report = run_mc(config)
        elif config.mode == "limit-check":
            report = run_limit_check(config)
        else:
            report, ok = run_oracle_check(config)
            _emit(report.render(config.fmt), config.out)
            if not ok:
                for note in report.notes:
                    print(note, file=sys.stderr)
                return 1
            return 0
        _emit(report.render(config.fmt), config.out)
        return 0
    except (MixPoissonError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
