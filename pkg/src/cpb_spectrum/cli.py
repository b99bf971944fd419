"""Command line front end: ``spectrum run`` and ``spectrum sweep``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import PRESETS, SWEEP_AXES, RunConfig, load_preset, parse_config
from .errors import ConfigError, SpectrumError
from .runner import run, sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _source(parser):
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="strict JSON run configuration")
    src.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", type=Path, help="output path (default from config)")
    parser.add_argument("--paper-axis", action="store_true",
                        help="write the abscissa as (nu - omega) / lambda_paper")
    parser.add_argument("--workers", type=int, help="threads for grid evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectrum",
        description="Transient spectrum of a Cooper-pair box driven by a quantised cavity field.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate one configuration")
    _source(p_run)
    p_run.add_argument("--oracle", action="store_true",
                       help="also run the time-domain oracle and write a comparison report")

    p_sweep = sub.add_parser("sweep", help="repeat a run over one parameter")
    _source(p_sweep)
    p_sweep.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEP_AXES)}")
    p_sweep.add_argument("--values", required=True, help="comma separated values")
    return parser


def _load(args) -> RunConfig:
    if args.preset:
        cfg = load_preset(args.preset)
    else:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
        cfg = parse_config(text)
    output = cfg.output
    if args.format:
        path = str(args.out) if args.out else str(Path(output.path).with_suffix(f".{args.format}"))
        output = replace(output, format=args.format, path=path)
    elif args.out:
        fmt = args.out.suffix.lstrip(".")
        output = replace(output, path=str(args.out), format=fmt if fmt in ("csv", "json") else output.format)
    if args.paper_axis:
        output = replace(output, paper_axis=True)
    cfg = replace(cfg, output=output)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = replace(cfg, workers=args.workers)
    if getattr(args, "oracle", False):
        cfg = replace(cfg, oracle=replace(cfg.oracle, enabled=True))
    return cfg


def _parse_values(axis: str, text: str) -> list:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    values = []
    for tok in tokens:
        try:
            values.append(int(tok) if axis == "M" else float(tok))
        except ValueError:
            raise ConfigError(f"--values: cannot read {tok!r} as a value for {axis!r}") from None
    return values


def _error(exc, code) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(doc), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        if args.command == "run":
            paths = run(cfg)
        else:
            if args.axis not in SWEEP_AXES:
                raise ConfigError(f"unknown sweep axis {args.axis!r}; choose from {SWEEP_AXES}")
            paths = sweep(cfg, args.axis, _parse_values(args.axis, args.values))
    except ConfigError as exc:
        return _error(exc, EXIT_CONFIG)
    except SpectrumError as exc:
        return _error(exc, EXIT_NUMERIC)
    except OSError as exc:
        return _error(exc, EXIT_IO)
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
