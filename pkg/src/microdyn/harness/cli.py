"""Batch command line: one scenario per invocation.

    microdyn <scenario> [--config PATH] [--out DIR] [--seed N] [--quiet]

Exit status: 0 success, 2 configuration error, 3 numerical error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, MicrodynError
from .config import SCENARIOS, ExperimentConfig, load_config, validate
from .experiments import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="microdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="configuration file (defaults used when omitted)")
        p.add_argument("--out", help="output directory (overrides [output] path)")
        p.add_argument("--seed", type=int, help="random seed (overrides [numerics] seed)")
        p.add_argument("--quiet", action="store_true", help="print nothing on success")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config)
            if cfg.scenario != args.scenario:
                raise ConfigError(
                    f"config scenario {cfg.scenario!r} does not match command {args.scenario!r}",
                    field="experiment.scenario",
                )
        else:
            cfg = validate(ExperimentConfig(scenario=args.scenario))
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be >= 0", field="numerics.seed")
        result = run_experiment(cfg, out_dir=args.out, seed=args.seed)
    except ConfigError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MicrodynError, ArithmeticError, ValueError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if not args.quiet:
        print(f"{result.scenario}: wrote {result.data_path} and {result.metadata_path}")
        for key, value in result.summary.items():
            print(f"  {key} = {value}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
