"""Command-line entry point.

Exit status: 0 on success, 1 on a validation error, 2 when an oracle
check exceeds its tolerance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .config import ExperimentConfig
from .errors import InvalidInputError
from .report import PlotSpec, emit_svg

COMMANDS = ("model", "fig3", "sweep", "oracle", "density", "phase")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrordeco",
        description="Decoherence of a cavity-driven many-particle mirror.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="TOML experiment file (defaults if omitted)")
    parser.add_argument("--out", type=Path, help="output path (default: config or stdout)")
    parser.add_argument("--svg", type=Path, help="also write a line plot")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0, help="seed for oracle random draws")
    return parser


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        cfg.validate()
        if args.threads < 1:
            raise InvalidInputError("--threads must be >= 1")
        out = args.out or (Path(cfg.outputs.csv) if cfg.outputs.csv else None)
        svg = args.svg or (Path(cfg.outputs.svg) if cfg.outputs.svg else None)

        status = 0
        plot = None
        if args.command == "model":
            _write(experiments.describe_model(cfg), out)
            return 0
        if args.command == "fig3":
            table = experiments.run_fig3(cfg, args.threads)
            plot = PlotSpec("t", "abs_F", group="N", title=f"|F_{cfg.m}{cfg.n}(t)|",
                            xlabel="t", ylabel="|F|")
        elif args.command == "sweep":
            table = experiments.run_sweep(cfg, args.threads)
            var = cfg.sweep.variable
            plot = PlotSpec(var, "abs_F", log_y=True, title=f"|F| vs {var}", ylabel="|F|")
        elif args.command == "density":
            table = experiments.run_density(cfg)
        elif args.command == "phase":
            table = experiments.run_phase(cfg)
        else:
            if not cfg.oracle.enabled:
                raise InvalidInputError("oracle.enabled is false")
            table, passed = experiments.run_oracle_suite(cfg, args.seed, args.threads)
            status = 0 if passed else 2
        _write(table.to_csv(), out)
        if svg is not None:
            if plot is None:
                raise InvalidInputError(f"no plot defined for '{args.command}'")
            _write(emit_svg(table, plot), svg)
        return status
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
