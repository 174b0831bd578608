#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Multact Lab CLI
Runs named experiments on multiplicative actions from json5 configs and manages the
sieve cache.
"""

import argparse
import logging
import sys

from console import setup_logging
from errors import MultactError, SchemaError
from experiment_config import load_config, validate, with_overrides
from experiments import REGISTRY, __version__, describe, run
from numtheory import build_factor_table, load_factor_table, save_factor_table, set_default_table

logger = logging.getLogger("multact_lab")

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_SCHEMA = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multact-lab",
        description="Multiplicative actions lab - experiment runner",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Usage examples:
  # List the registered experiments
  python multact_lab.py list

  # Run one experiment, writing CSV + JSON into results/
  python multact_lab.py run configs/folner-density.json5

  # Override seed, worker count and output directory, and render an SVG
  python multact_lab.py run configs/digits.json5 --seed 7 --threads 4 --out runs/digits --plot

  # Build a sieve cache once, reuse it for the large progression runs
  python multact_lab.py sieve --limit 20000000 --sieve-cache spf.bin
  python multact_lab.py run configs/aperiodicity-liouville.json5 --sieve-cache spf.bin
        ''',
    )
    parser.add_argument("--version", action="version", version=f"multact-lab {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run the experiment described by a config file")
    run_parser.add_argument("config", help="json5 experiment config")
    run_parser.add_argument("--seed", type=int, help="Override the config seed (unsigned 64-bit)")
    run_parser.add_argument("--threads", type=int, help="Cap on worker processes")
    run_parser.add_argument("--out", help="Output directory for CSV/JSON/SVG")
    run_parser.add_argument("--plot", action="store_true", help="Also write an SVG of the result table")
    run_parser.add_argument("--sieve-cache", metavar="PATH", help="Load a cached factor table before computing")
    run_parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    commands.add_parser("list", help="List the registered experiments")

    sieve_parser = commands.add_parser("sieve", help="Build a smallest-prime-factor table and cache it")
    sieve_parser.add_argument("--limit", type=int, required=True, help="Largest integer covered by the table")
    sieve_parser.add_argument("--sieve-cache", metavar="PATH", required=True, help="Cache file to write")
    sieve_parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    return parser


def command_list() -> int:
    width = max(len(name) for name in REGISTRY)
    for entry in describe():
        print(f"  {entry.name:<{width}}  {entry.summary}")
    return EXIT_OK


def command_sieve(args) -> int:
    table = build_factor_table(args.limit)
    save_factor_table(table, args.sieve_cache)
    logger.info(f"🎉 Sieve cache ready: {args.sieve_cache} (limit={args.limit:,})")
    return EXIT_OK


def command_run(args) -> int:
    config = with_overrides(
        validate(load_config(args.config), REGISTRY),
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        plot=args.plot,
    )
    if args.sieve_cache:
        set_default_table(load_factor_table(args.sieve_cache))
    artifacts = run(config)
    print(f"✅ {config.experiment}: {artifacts.csv_path}, {artifacts.json_path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "verbose", False))

    try:
        if args.command == "list":
            return command_list()
        if args.command == "sieve":
            return command_sieve(args)
        return command_run(args)
    except SchemaError as e:
        logger.error(f"❌ Config error: {e}")
        return EXIT_SCHEMA
    except MultactError as e:
        logger.error(f"❌ Computation failed: {e}")
        return EXIT_COMPUTATION
    except OSError as e:
        logger.error(f"❌ File error: {e}")
        return EXIT_COMPUTATION
    finally:
        set_default_table(None)


if __name__ == "__main__":
    sys.exit(main())
